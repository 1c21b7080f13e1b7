"""Truncated Fourier states on Z^d and the power nonlinearity.

A state holds the coefficients phi(n) for |n_i| <= N on a dense
(2N+1)^d grid; axis index i corresponds to n_i = i - N. All physics in
this package happens in these interaction variables, with the modulation
entering only through e^{-i|n|^2 w(t)} phase factors (apply_U).

The nonlinearity of degree 2k+1 is the signed convolution

    c(n) = sum_{n = sum_j zeta_j n_j} prod_j (J_j psi_j)(n_j)

with zeta_j = +1 for odd j, -1 for even j, and J_j conjugating even
slots. The direct scipy convolution is the reference implementation; the
zero-padded FFT path must match it to near machine precision and is the
default for larger grids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.fft import next_fast_len
from scipy.signal import convolve

from .errors import ConfigError

__all__ = [
    "SpectralState",
    "zero_state",
    "unit_mode",
    "random_state",
    "hs_norm",
    "apply_U",
    "conj_state",
    "nonlinearity",
    "resonance_offset",
    "mode_grid",
    "save_state_csv",
    "load_state_csv",
]

_DIRECT_CUTOFF = 9  # direct convolution up to (2N+1)^d grids of this side length


def _check_dN(d: int, N: int) -> None:
    if d not in (1, 2, 3):
        raise ConfigError(f"dimension d must be 1, 2 or 3, got {d}")
    if int(N) != N or N < 1:
        raise ConfigError(f"mode cutoff N must be a positive integer, got {N}")


@dataclass
class SpectralState:
    """Fourier coefficients on the centered cube |n_i| <= N."""

    d: int
    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        _check_dN(self.d, self.N)
        expect = (2 * self.N + 1,) * self.d
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != expect:
            raise ConfigError(
                f"coefficient array has shape {self.coeffs.shape}, expected {expect}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ConfigError("coefficients must be finite")

    @property
    def side(self) -> int:
        return 2 * self.N + 1

    def copy(self) -> "SpectralState":
        return SpectralState(self.d, self.N, self.coeffs.copy())

    def __getitem__(self, n) -> complex:
        idx = tuple(int(c) + self.N for c in np.atleast_1d(n))
        if len(idx) != self.d:
            raise KeyError(f"mode index needs {self.d} components")
        if any(not 0 <= c < self.side for c in idx):
            raise KeyError(f"mode {tuple(np.atleast_1d(n))} outside |n_i| <= {self.N}")
        return complex(self.coeffs[idx])


def zero_state(d: int, N: int) -> SpectralState:
    _check_dN(d, N)
    return SpectralState(d, N, np.zeros((2 * N + 1,) * d, dtype=complex))


def unit_mode(d: int, N: int, n, amplitude: complex = 1.0) -> SpectralState:
    """The single-mode state amplitude * delta_n."""
    st = zero_state(d, N)
    idx = tuple(int(c) + N for c in np.atleast_1d(n))
    if len(idx) != d:
        raise ConfigError(f"mode index needs {d} components")
    if any(not 0 <= c < st.side for c in idx):
        raise ConfigError(f"mode {tuple(np.atleast_1d(n))} outside |n_i| <= {N}")
    st.coeffs[idx] = amplitude
    return st


def mode_grid(d: int, N: int) -> np.ndarray:
    """Array of shape (2N+1,)*d + (d,) with the integer mode at each entry."""
    _check_dN(d, N)
    axes = np.meshgrid(*([np.arange(-N, N + 1)] * d), indexing="ij")
    return np.stack(axes, axis=-1)


def _sq_norms(d: int, N: int) -> np.ndarray:
    n = np.arange(-N, N + 1) ** 2
    out = n
    for _ in range(d - 1):
        out = out[..., None] + n
    return out


def hs_norm(state: SpectralState, s: float) -> float:
    """Sobolev norm (sum <n>^{2s} |phi(n)|^2)^{1/2} with <n>^2 = 1 + |n|^2."""
    jap = 1.0 + _sq_norms(state.d, state.N)
    return float(np.sqrt(np.sum(jap ** s * np.abs(state.coeffs) ** 2)))


def apply_U(state: SpectralState, w_value: float,
            direction: str = "forward") -> SpectralState:
    """Multiply by e^{-i|n|^2 w} (forward) or its inverse e^{+i|n|^2 w}.

    Forward with w = w(t) turns interaction-variable coefficients into
    physical ones; inverse undoes it (U^w composed with U^{-w} is the
    identity).
    """
    if direction not in ("forward", "inverse"):
        raise ConfigError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    sign = +1 if direction == "forward" else -1
    phase = np.exp(-1j * sign * w_value * _sq_norms(state.d, state.N))
    return SpectralState(state.d, state.N, state.coeffs * phase)


def conj_state(state: SpectralState) -> SpectralState:
    """Coefficients of the complex conjugate function: conj(phi(-n))."""
    flipped = np.flip(np.conj(state.coeffs))
    return SpectralState(state.d, state.N, flipped)


def random_state(d: int, N: int, s: float, seed, scale: float = 1.0,
                 decay: float | None = None) -> SpectralState:
    """Random state with coefficients g(n)/<n>^{s + d/2 + 0.01}, g complex normal.

    The decay keeps the H^s norm stable under cutoff doubling; pass a
    larger `decay` exponent explicitly for smoother samples. `seed` is an
    integer or an existing numpy Generator.
    """
    _check_dN(d, N)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if decay is None:
        decay = s + d / 2 + 0.01
    shape = (2 * N + 1,) * d
    g = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    jap = np.sqrt(1.0 + _sq_norms(d, N))
    return SpectralState(d, N, scale * g / jap ** decay)


def _slot_arrays(factors: list[SpectralState]) -> list[np.ndarray]:
    """Slot j carries factor j, conjugated via conj_state on even slots."""
    out = []
    for j, st in enumerate(factors, start=1):
        out.append(st.coeffs if j % 2 == 1 else np.flip(np.conj(st.coeffs)))
    return out


def _check_factors(factors, k: int | None):
    if k is None:
        if len(factors) % 2 == 0:
            raise ConfigError(f"need an odd number 2k+1 of factors, got {len(factors)}")
        k = (len(factors) - 1) // 2
    if len(factors) != 2 * k + 1:
        raise ConfigError(f"need 2k+1 = {2 * k + 1} factors, got {len(factors)}")
    d, N = factors[0].d, factors[0].N
    for st in factors:
        if (st.d, st.N) != (d, N):
            raise ConfigError("all factors must share the same d and N")
    return k, d, N


def _convolve_direct(slots: list[np.ndarray], N: int) -> np.ndarray:
    acc = slots[0]
    for arr in slots[1:]:
        acc = convolve(acc, arr, mode="full", method="direct")
    return acc


def _convolve_fft(slots: list[np.ndarray], d: int, N: int) -> np.ndarray:
    # alias-free length: mode sums reach (2k+1)N, so 2(2k+1)N + 1 entries
    m = len(slots)
    full = 2 * m * N + 1
    P = next_fast_len(full)
    shape = (P,) * d
    axes = tuple(range(d))
    spec = np.ones(shape, dtype=complex)
    for arr in slots:
        spec = spec * np.fft.fftn(arr, s=shape, axes=axes)
    conv = np.fft.ifftn(spec)
    # circular equals linear since P >= full support; mode n sits at n + mN
    return conv[tuple(slice(0, full) for _ in range(d))]


def nonlinearity(factors: list[SpectralState], k: int | None = None,
                 method: str = "auto", truncate: bool = True) -> SpectralState | np.ndarray:
    """Signed multilinear convolution of 2k+1 factors.

    With truncate=True (default) the result is cropped back to |n_i| <= N
    and returned as a state; otherwise the full product array over
    |n_i| <= (2k+1)N is returned.

    method: "direct" (scipy reference), "fft" (zero-padded), or "auto".
    """
    k, d, N = _check_factors(factors, k)
    if method not in ("auto", "direct", "fft"):
        raise ConfigError(f"unknown method {method!r}")
    slots = _slot_arrays(factors)
    if method == "auto":
        method = "direct" if 2 * N + 1 <= _DIRECT_CUTOFF and d <= 2 else "fft"
    if method == "direct":
        full = _convolve_direct(slots, N)
    else:
        full = _convolve_fft(slots, d, N)
    if not truncate:
        return full
    centre = k * 2 * N  # full array spans |n_i| <= (2k+1)N
    sl = tuple(slice(centre, centre + 2 * N + 1) for _ in range(d))
    return SpectralState(d, N, full[sl].copy())


def resonance_offset(n, tuple_modes, k: int | None = None) -> int:
    """Omega = |n|^2 - sum_j zeta_j |n_j|^2 for the (2k+1)-tuple."""
    n = np.atleast_1d(np.asarray(n, dtype=int))
    modes = np.atleast_2d(np.asarray(tuple_modes, dtype=int))
    if k is not None and modes.shape[0] != 2 * k + 1:
        raise ConfigError(f"need {2 * k + 1} tuple modes, got {modes.shape[0]}")
    if modes.shape[0] % 2 == 0:
        raise ConfigError("tuple length must be odd")
    zeta = np.where(np.arange(1, modes.shape[0] + 1) % 2 == 1, 1, -1)
    return int(np.dot(n, n) - np.sum(zeta * np.sum(modes * modes, axis=1)))


def save_state_csv(state: SpectralState, filename) -> None:
    """Rows "n_1,...,n_d,re,im", zero modes omitted; JSON sidecar {"d","N"}."""
    modes = mode_grid(state.d, state.N).reshape(-1, state.d)
    flat = state.coeffs.ravel()
    keep = flat != 0
    data = np.column_stack([modes[keep], flat[keep].real, flat[keep].imag])
    header = ",".join(f"n_{i + 1}" for i in range(state.d)) + ",re,im"
    fmt = ["%d"] * state.d + ["%.17g", "%.17g"]
    np.savetxt(filename, data, fmt=fmt, delimiter=",", header=header, comments="")
    sidecar = Path(str(filename)).with_suffix(".json")
    sidecar.write_text(json.dumps({"d": state.d, "N": state.N}) + "\n")


def load_state_csv(filename) -> SpectralState:
    sidecar = Path(str(filename)).with_suffix(".json")
    if not sidecar.exists():
        raise ConfigError(f"missing sidecar {sidecar}")
    meta = json.loads(sidecar.read_text())
    d, N = int(meta["d"]), int(meta["N"])
    _check_dN(d, N)
    st = zero_state(d, N)
    body = [ln for ln in Path(str(filename)).read_text().splitlines()[1:] if ln.strip()]
    if not body:
        return st
    data = np.loadtxt(body, delimiter=",", ndmin=2)
    if data.shape[1] != d + 2:
        raise ConfigError(f"state file has {data.shape[1]} columns, expected {d + 2}")
    idx = tuple(data[:, i].astype(int) + N for i in range(d))
    if any(a.min() < 0 or a.max() >= 2 * N + 1 for a in idx):
        raise ConfigError("mode indices outside the declared cube")
    st.coeffs[idx] = data[:, d] + 1j * data[:, d + 1]
    return st
