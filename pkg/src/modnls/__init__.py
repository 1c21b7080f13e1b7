"""Numerical laboratory for the modulated-dispersion NLS on the torus.

The equation i du/dt = Laplace(u) dw/dt + |u|^(2k) u is studied through its
interaction-variable formulation: oscillatory integrals of the modulation
path w, a multilinear Young kernel, Euler/Picard time steppers, and
brute-force verification of the multilinear counting estimates that back
the well-posedness theory.

Submodules load lazily so the command-line front end can pin thread
environment variables before numpy comes in.
"""

from importlib import import_module

__version__ = "0.1.0"

_SUBMODULES = ("errors", "paths", "phi", "spectral", "young", "solver",
               "resonance", "cli")


def __getattr__(name):
    if name in _SUBMODULES:
        mod = import_module(f".{name}", __name__)
        globals()[name] = mod
        return mod
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(_SUBMODULES))
