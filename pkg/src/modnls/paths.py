"""Modulation paths driving the dispersion clock.

A path is a piecewise-linear real function on [0, T] stored by its node
values, normalized so w(0) = 0.  The constant path keeps its level in
``offset``: downstream oscillatory integrals evaluate e^{i a w} with the
offset added back, which is the only place the level matters.

Generators: linear (w = t), constant, fractional Brownian motion via
circulant embedding of the increment covariance, and a fast-oscillation
path w(t) = integral of eps^{-1} m(r/eps^2) for a tabulated periodic
profile m.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericsError

__all__ = [
    "SamplePath",
    "make_linear_path",
    "make_constant_path",
    "make_fbm_path",
    "make_modulated_path",
    "eval_path",
    "modulation_value",
    "save_path_csv",
    "load_path_csv",
]


@dataclass
class SamplePath:
    """Piecewise-linear path on [0, T] sampled at strictly increasing nodes."""

    t_grid: np.ndarray
    values: np.ndarray
    kind: str
    offset: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.t_grid.ndim != 1 or self.t_grid.shape != self.values.shape:
            raise ConfigError("t_grid and values must be 1d arrays of equal length")
        if self.t_grid.size < 2:
            raise ConfigError("a path needs at least one segment (M >= 1)")
        if self.t_grid[0] != 0.0:
            raise ConfigError("the time grid must start at t = 0")
        if not np.all(np.diff(self.t_grid) > 0):
            raise ConfigError("the time grid must be strictly increasing")
        if self.values[0] != 0.0:
            raise ConfigError("paths are normalized to w(0) = 0; shift into offset")
        if not (np.all(np.isfinite(self.t_grid)) and np.all(np.isfinite(self.values))):
            raise ConfigError("path nodes must be finite")

    @property
    def T(self) -> float:
        return float(self.t_grid[-1])

    @property
    def M(self) -> int:
        return self.t_grid.size - 1


def make_linear_path(T: float, M: int) -> SamplePath:
    """The identity clock w(t) = t on a uniform grid of M segments."""
    _check_T_M(T, M)
    t = np.linspace(0.0, T, M + 1)
    return SamplePath(t_grid=t, values=t.copy(), kind="linear")


def make_constant_path(c: float, T: float, M: int) -> SamplePath:
    """Frozen clock at level c; the level is stored as offset, values are 0."""
    _check_T_M(T, M)
    t = np.linspace(0.0, T, M + 1)
    return SamplePath(t_grid=t, values=np.zeros(M + 1), kind="constant",
                      offset=float(c))


def make_fbm_path(H: float, T: float, M: int, seed: int) -> SamplePath:
    """Fractional Brownian motion, exact in law via circulant embedding.

    M must be a power of two.  Increments are stationary Gaussians with
    Var = (T/M)^{2H}; the same seed always reproduces the same path.
    """
    _check_T_M(T, M)
    if not (0.0 < H < 1.0):
        raise ConfigError(f"Hurst index must lie in (0, 1), got {H}")
    if M & (M - 1) != 0:
        raise ConfigError(f"fbm grid size M must be a power of two, got {M}")
    rng = np.random.default_rng(seed)
    fgn, method = _fgn_unit_step(H, M, rng)
    values = np.concatenate([[0.0], np.cumsum(fgn)]) * (T / M) ** H
    values[0] = 0.0
    t = np.linspace(0.0, T, M + 1)
    return SamplePath(t_grid=t, values=values, kind="fbm",
                      meta={"H": H, "seed": seed, "method": method})


def _fgn_unit_step(H: float, n: int, rng) -> tuple[np.ndarray, str]:
    """n samples of unit-step fractional Gaussian noise."""
    k = np.arange(n + 1, dtype=float)
    gamma = 0.5 * ((k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))
    row = np.concatenate([gamma, gamma[-2:0:-1]])  # circulant embedding, length 2n
    lam = np.fft.fft(row).real
    if lam.min() < -1e-8 * lam.max():
        return _fgn_covariance_sqrt(gamma[:n], n, rng), "covariance-sqrt"
    lam = np.clip(lam, 0.0, None)
    u = rng.standard_normal(n + 1)
    v = rng.standard_normal(n - 1)
    y = np.zeros(2 * n, dtype=complex)
    y[0] = np.sqrt(lam[0]) * u[0]
    y[n] = np.sqrt(lam[n]) * u[n]
    y[1:n] = np.sqrt(lam[1:n] / 2.0) * (u[1:n] + 1j * v)
    y[n + 1:] = np.conj(y[1:n][::-1])
    x = np.fft.fft(y).real / np.sqrt(2 * n)
    return x[:n], "circulant"


def _fgn_covariance_sqrt(gamma_head: np.ndarray, n: int, rng) -> np.ndarray:
    """Fallback sampler through an explicit covariance square root."""
    if n > 4096:
        raise NumericsError(
            f"circulant embedding failed and M={n} is too large for the dense fallback"
        )
    from scipy.linalg import toeplitz

    cov = toeplitz(gamma_head)
    eigval, eigvec = np.linalg.eigh(cov)
    eigval = np.clip(eigval, 0.0, None)
    root = eigvec * np.sqrt(eigval)
    return root @ rng.standard_normal(n)


def make_modulated_path(profile, eps: float, T: float, M: int) -> SamplePath:
    """Fast-oscillation clock w(t) = integral_0^t eps^{-1} m(r/eps^2) dr.

    `profile` tabulates m on a uniform grid over one period [0, 1); it is
    interpolated piecewise-linearly and extended periodically, and the
    integral of that interpolant is accumulated exactly.  Requires
    eps^2 >= 4 T/M so each grid step resolves the oscillation.
    """
    _check_T_M(T, M)
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    if eps * eps < 4.0 * T / M:
        raise ConfigError(
            f"eps too small for the grid: need eps^2 >= 4 T/M, "
            f"got eps^2 = {eps * eps:.3e} < {4.0 * T / M:.3e}"
        )
    prof = np.atleast_1d(np.asarray(profile, dtype=float))
    if prof.ndim != 1 or prof.size < 1 or not np.all(np.isfinite(prof)):
        raise ConfigError("profile must be a finite 1d table of samples")
    P = prof.size
    closed = np.concatenate([prof, prof[:1]])
    cell = (closed[:-1] + closed[1:]) / (2.0 * P)  # exact integral per cell
    prefix = np.concatenate([[0.0], np.cumsum(cell)])
    per_period = prefix[P]

    def antiderivative(x):
        n_per, frac = np.divmod(x, 1.0)
        idx = np.minimum((frac * P).astype(int), P - 1)
        u = frac - idx / P
        m0 = closed[idx]
        m1 = closed[idx + 1]
        part = m0 * u + 0.5 * (m1 - m0) * P * u * u
        return n_per * per_period + prefix[idx] + part

    t = np.linspace(0.0, T, M + 1)
    values = eps * antiderivative(t / (eps * eps))
    values[0] = 0.0
    return SamplePath(t_grid=t, values=values, kind="modulated",
                      meta={"eps": eps, "profile_size": P})


def eval_path(path: SamplePath, t) -> float | np.ndarray:
    """Normalized path value w(t) by linear interpolation; t must lie in [0, T]."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0) or np.any(tt > path.T):
        raise ValueError(f"t outside the path domain [0, {path.T}]")
    out = np.interp(tt, path.t_grid, path.values)
    return float(out) if np.isscalar(t) or tt.ndim == 0 else out


def modulation_value(path: SamplePath, t) -> float | np.ndarray:
    """Actual clock value w(t) + offset, the quantity entering e^{i a w}."""
    out = eval_path(path, t)
    return out + path.offset


def save_path_csv(path: SamplePath, filename) -> None:
    """Write node rows "t,w" with 17 significant digits.

    The w column carries the actual clock level values + offset, so a
    reload through load_path_csv recovers the same modulation values.
    """
    data = np.column_stack([path.t_grid, path.values + path.offset])
    np.savetxt(filename, data, fmt="%.17g", delimiter=",", header="t,w", comments="")


def load_path_csv(filename) -> SamplePath:
    """Read a "t,w" CSV; any initial level is moved into the offset."""
    data = np.loadtxt(filename, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise ConfigError(f"path CSV must have two columns, got {data.shape[1]}")
    t_grid = data[:, 0]
    values = data[:, 1]
    offset = float(values[0])
    return SamplePath(t_grid=t_grid, values=values - offset, kind="external",
                      offset=offset)


def _check_T_M(T: float, M: int) -> None:
    if not (T > 0 and np.isfinite(T)):
        raise ConfigError(f"horizon T must be positive and finite, got {T}")
    if int(M) != M or M < 1:
        raise ConfigError(f"grid size M must be a positive integer, got {M}")
