"""The multilinear operator increment X_{s;t} in Fourier variables.

For factors psi_1..psi_{2k+1} the output coefficient at n is

    X_{s;t}(n) = -i sum_{n = sum_j zeta_j n_j}
                    [Phi_t(Omega) - Phi_s(Omega)] prod_j (J_j psi_j)(n_j)

with zeta_j = +/-1 alternating (odd slots +), J conjugating even slots,
and Omega = |n|^2 - sum_j zeta_j |n_j|^2. Phi increments come from a
precomputed OscillatoryTable, so each call costs one bucketed
convolution; x_increment_direct enumerates every interaction tuple and
is the reference the convolution path is validated against.

With w identically zero every Phi increment equals t - s and X_{s;t}
collapses to -i (t - s) times the plain nonlinearity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._fold import Slot, fold
from .errors import ConfigError
from .phi import OscillatoryTable
from .spectral import SpectralState, _sq_norms, hs_norm, random_state

__all__ = ["YoungKernelConfig", "x_increment", "x_increment_direct",
           "x_norm_estimate"]

# direct-enumeration cost is (2N+1)^{d(2k+1)}; anything above needs allow_large
_N_CAPS = {(1, 1): 32, (1, 2): 10, (2, 1): 8}
_DEFAULT_CAP = 4
_DIRECT_TUPLE_LIMIT = 5_000_000


@dataclass
class YoungKernelConfig:
    """Validated (d, k, N) box plus the Phi table driving the kernel."""

    d: int
    k: int
    N: int
    table: OscillatoryTable
    allow_large: bool = False
    _sq: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigError(f"dimension d must be 1, 2 or 3, got {self.d}")
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError(f"nonlinearity index k must be a positive integer, got {self.k}")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"mode cutoff N must be a positive integer, got {self.N}")
        cap = _N_CAPS.get((self.d, self.k), _DEFAULT_CAP)
        if self.N > cap and not self.allow_large:
            raise ConfigError(
                f"N={self.N} exceeds the desk-scale cap {cap} for (d,k)=({self.d},{self.k}); "
                "pass allow_large=True to override")
        required = (2 * self.k + 2) * self.d * self.N * self.N
        if self.table.mu_max < required:
            raise ConfigError(
                f"table mu_max={self.table.mu_max} is too small for the mode box; "
                f"need at least (2k+2) d N^2 = {required}")
        self._sq = _sq_norms(self.d, self.N)

    @property
    def n_factors(self) -> int:
        return 2 * self.k + 1


def _check_states(cfg: YoungKernelConfig, states) -> None:
    if len(states) != cfg.n_factors:
        raise ConfigError(f"need 2k+1 = {cfg.n_factors} factors, got {len(states)}")
    for st in states:
        if (st.d, st.N) != (cfg.d, cfg.N):
            raise ConfigError("factor state does not match the kernel box")


def _grid_indices(cfg: YoungKernelConfig, s: float, t: float) -> tuple[int, int]:
    try:
        i_s = cfg.table.index_of_time(s)
        i_t = cfg.table.index_of_time(t)
    except KeyError as exc:
        raise ConfigError(f"kernel times must lie on the table grid: {exc}") from exc
    if i_t < i_s:
        raise ConfigError(f"need s <= t, got s={s}, t={t}")
    return i_s, i_t


def _slots(states) -> list[Slot]:
    out = []
    for j, st in enumerate(states, start=1):
        if j % 2 == 1:
            out.append(Slot(st.coeffs, +1))
        else:
            out.append(Slot(np.conj(st.coeffs), -1))
    return out


def x_increment(cfg: YoungKernelConfig, s: float, t: float, states,
                method: str = "auto") -> SpectralState:
    """X_{s;t}(psi_1, ..., psi_{2k+1}) for table grid times s <= t."""
    _check_states(cfg, states)
    i_s, i_t = _grid_indices(cfg, s, t)
    if i_s == i_t:
        return SpectralState(cfg.d, cfg.N, np.zeros((2 * cfg.N + 1,) * cfg.d, complex))
    dphi = cfg.table.increment(i_s, i_t)
    res = fold(_slots(states), cfg.d, method=method).crop_spatial(cfg.N)
    omega = cfg._sq[None, ...] - res.q_values.reshape((-1,) + (1,) * cfg.d)
    weights = dphi[omega + cfg.table.mu_max]
    coeffs = -1j * (weights * res.table).sum(axis=0)
    return SpectralState(cfg.d, cfg.N, coeffs)


def x_increment_direct(cfg: YoungKernelConfig, s: float, t: float, states) -> SpectralState:
    """Reference evaluation by explicit enumeration of all interaction tuples."""
    _check_states(cfg, states)
    i_s, i_t = _grid_indices(cfg, s, t)
    d, N, m = cfg.d, cfg.N, cfg.n_factors
    side_flat = (2 * N + 1) ** d
    if side_flat ** m > _DIRECT_TUPLE_LIMIT:
        raise ConfigError(
            f"direct enumeration over {side_flat}^{m} tuples exceeds the budget")
    dphi = cfg.table.increment(i_s, i_t)
    axes = np.meshgrid(*([np.arange(-N, N + 1)] * d), indexing="ij")
    modes = np.stack([a.ravel() for a in axes], axis=1)  # (S, d)
    sq = (modes ** 2).sum(axis=1)
    prod = np.ones((1,) * m, dtype=complex)
    qsum = np.zeros((1,) * m, dtype=np.int64)
    out_comp = [np.zeros((1,) * m, dtype=np.int64) for _ in range(d)]
    for j in range(1, m + 1):
        st = states[j - 1]
        vals = st.coeffs.ravel() if j % 2 == 1 else np.conj(st.coeffs).ravel()
        shape = [1] * m
        shape[j - 1] = side_flat
        zeta = 1 if j % 2 == 1 else -1
        prod = prod * vals.reshape(shape)
        qsum = qsum + zeta * sq.reshape(shape)
        for c in range(d):
            out_comp[c] = out_comp[c] + zeta * modes[:, c].reshape(shape)
    inside = np.ones(prod.shape, dtype=bool)
    for c in range(d):
        inside &= np.abs(out_comp[c]) <= N
    out_sq = sum(oc * oc for oc in out_comp)
    omega = out_sq - qsum
    flat = np.zeros(side_flat, dtype=complex)
    idx = np.zeros(prod.shape, dtype=np.int64)
    for c in range(d):
        idx = idx * (2 * N + 1) + (out_comp[c] + N)
    # gather phases only for in-box outputs; outside ones can carry
    # offsets beyond the tabulated |mu| <= mu_max window
    sel = inside.ravel()
    contrib = (-1j) * prod.ravel()[sel] * dphi[omega.ravel()[sel] + cfg.table.mu_max]
    np.add.at(flat, idx.ravel()[sel], contrib)
    return SpectralState(d, N, flat.reshape((2 * N + 1,) * d))


def x_norm_estimate(cfg: YoungKernelConfig, gamma: float, s: float,
                    trials: int, seed) -> float:
    """Lower bound on the C^gamma L_{2k+1}(H^s) norm from random probes.

    Each trial draws 2k+1 random H^s states and one grid pair (t_1, t_2)
    and evaluates hs_norm(X_{t_1;t_2}) / (|t_2-t_1|^gamma prod_j
    hs_norm(psi_j)); the max over trials is returned. The trial sequence
    is a deterministic function of the seed, so enlarging `trials`
    extends (never reshuffles) the sampled set.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if not (0.0 < gamma <= 1.0):
        raise ConfigError(f"gamma must lie in (0, 1], got {gamma}")
    rng = np.random.default_rng(seed)
    t_grid = cfg.table.t_grid
    if t_grid.size < 2:
        raise ConfigError("table grid needs at least two times")
    best = 0.0
    for _ in range(trials):
        psis = [random_state(cfg.d, cfg.N, s, rng) for _ in range(cfg.n_factors)]
        i, j = sorted(rng.choice(t_grid.size, size=2, replace=False))
        inc = x_increment(cfg, float(t_grid[i]), float(t_grid[j]), psis)
        denom = (t_grid[j] - t_grid[i]) ** gamma
        for p in psis:
            denom *= hs_norm(p, s)
        if denom > 0:
            best = max(best, hs_norm(inc, s) / denom)
    return best
