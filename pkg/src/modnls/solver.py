"""Time stepping for the Young equation phi(t) = phi_0 + int_0^t X_{dtau}(phi).

Two schemes share the same kernel evaluations on a fixed partition:
Euler-Young steps phi_{j+1} = phi_j + X_{t_j;t_{j+1}}(phi_j), and Picard
iterates whole trajectories psi_{m+1}(t_i) = phi_0 + sum_{j<i}
X_{t_j;t_{j+1}}(psi_m(t_j)) until successive iterates agree in the
discrete C^{0,lambda} metric. On a fixed partition the Picard fixed
point satisfies the Euler recursion exactly, so the two schemes differ
only while the iteration is still converging.

reference_split_step integrates the unmodulated equation (w(t) = t) by
Strang splitting on a padded collocation grid and serves as an
independent oracle; plane_wave_exact is the closed-form single-mode
solution in interaction variables.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

from .errors import BlowUpError, ConfigError, NonConvergenceError
from .phi import OscillatoryTable
from .spectral import SpectralState, _sq_norms, hs_norm, unit_mode, zero_state
from .young import YoungKernelConfig, x_increment

__all__ = [
    "SolverConfig",
    "Trajectory",
    "uniform_partition",
    "young_integral",
    "solve_euler_young",
    "solve_picard",
    "holder_seminorm",
    "sup_norm",
    "holder_norm",
    "c0lambda_distance",
    "reference_split_step",
    "plane_wave_exact",
]

_BLOWUP_FACTOR = 1e6


def uniform_partition(T: float, M: int) -> np.ndarray:
    if T <= 0 or int(M) != M or M < 1:
        raise ConfigError(f"need T > 0 and integer M >= 1, got T={T}, M={M}")
    return np.linspace(0.0, T, int(M) + 1)


@dataclass
class SolverConfig:
    """Validated solve parameters; `lam` is the Holder exponent lambda."""

    d: int
    k: int
    N: int
    s: float
    gamma: float
    lam: float
    rho: float
    T: float
    partition: np.ndarray
    scheme: str = "picard"
    tol: float = 1e-10
    max_iter: int = 50
    allow_large: bool = False

    def __post_init__(self):
        for name, v in (("d", self.d), ("k", self.k), ("N", self.N)):
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v}")
        if not (0.0 < self.lam < self.gamma <= 1.0) or not self.gamma + self.lam > 1.0:
            raise ConfigError(
                "Holder exponents must satisfy 0 < lambda < gamma <= 1 and "
                f"gamma + lambda > 1; got gamma={self.gamma}, lambda={self.lam}")
        if self.rho <= 0:
            raise ConfigError(f"rho must be positive, got {self.rho}")
        if self.T <= 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if self.scheme not in ("euler_young", "picard"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.tol <= 0 or int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError("need tol > 0 and integer max_iter >= 1")
        self.partition = np.asarray(self.partition, dtype=float)
        p = self.partition
        if p.ndim != 1 or p.size < 2 or p[0] != 0.0 or not np.all(np.diff(p) > 0):
            raise ConfigError("partition must start at 0 and increase strictly")
        if abs(p[-1] - self.T) > 1e-12 * max(1.0, self.T):
            raise ConfigError(f"partition ends at {p[-1]}, config says T={self.T}")
        threshold = self.d / 2 - self.rho / self.k
        if self.s <= threshold:
            warnings.warn(
                f"s={self.s} is at or below the advisory threshold "
                f"d/2 - rho/k = {threshold}; the solve may be outside the "
                "proven regime", stacklevel=2)

    def kernel(self, table: OscillatoryTable) -> YoungKernelConfig:
        return YoungKernelConfig(self.d, self.k, self.N, table,
                                 allow_large=self.allow_large)


@dataclass
class Trajectory:
    """States on the partition times, plus scheme metadata."""

    times: np.ndarray
    states: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size != len(self.states):
            raise ConfigError("times and states lengths differ")

    @property
    def M(self) -> int:
        return self.times.size - 1

    def state_at(self, t: float) -> SpectralState:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-12 * max(1.0, self.times[-1]):
            raise KeyError(f"t={t} is not a trajectory time")
        return self.states[i]


def _tuple_args(cfg: SolverConfig, state: SpectralState) -> list:
    return [state] * (2 * cfg.k + 1)


def young_integral(cfg: SolverConfig, g: Trajectory, s_idx: int, t_idx: int,
                   table: OscillatoryTable) -> SpectralState:
    """Left-point Riemann sum sum_j X_{t_j;t_{j+1}}(g(t_j)) over the partition."""
    p = cfg.partition
    if not 0 <= s_idx <= t_idx <= p.size - 1:
        raise ConfigError(f"indices ({s_idx}, {t_idx}) outside the partition")
    kc = cfg.kernel(table)
    acc = zero_state(cfg.d, cfg.N)
    for j in range(s_idx, t_idx):
        inc = x_increment(kc, float(p[j]), float(p[j + 1]),
                          _tuple_args(cfg, g.states[j]))
        acc.coeffs += inc.coeffs
    return acc


def _guard(step: int, state: SpectralState, s: float, limit: float) -> None:
    norm = hs_norm(state, s) if np.all(np.isfinite(state.coeffs.view(float))) else np.inf
    if not np.isfinite(norm) or norm > limit:
        raise BlowUpError(step, norm, limit)


def solve_euler_young(cfg: SolverConfig, phi0: SpectralState,
                      table: OscillatoryTable) -> Trajectory:
    """One-step scheme phi_{j+1} = phi_j + X_{t_j;t_{j+1}}(phi_j)."""
    kc = cfg.kernel(table)
    p = cfg.partition
    norm0 = hs_norm(phi0, cfg.s)
    limit = _BLOWUP_FACTOR * norm0 if norm0 > 0 else 1.0
    states = [phi0.copy()]
    cur = phi0.copy()
    for j in range(p.size - 1):
        inc = x_increment(kc, float(p[j]), float(p[j + 1]), _tuple_args(cfg, cur))
        cur = SpectralState(cfg.d, cfg.N, cur.coeffs + inc.coeffs)
        _guard(j + 1, cur, cfg.s, limit)
        states.append(cur)
    return Trajectory(p.copy(), states, {"scheme": "euler_young"})


def solve_picard(cfg: SolverConfig, phi0: SpectralState, table: OscillatoryTable,
                 initial: Trajectory | None = None) -> Trajectory:
    """Iterate whole trajectories until the C^{0,lambda} residual drops below tol."""
    kc = cfg.kernel(table)
    p = cfg.partition
    norm0 = hs_norm(phi0, cfg.s)
    limit = _BLOWUP_FACTOR * norm0 if norm0 > 0 else 1.0
    if initial is None:
        old = [phi0.copy() for _ in range(p.size)]
    else:
        if initial.times.size != p.size:
            raise ConfigError("initial trajectory does not match the partition")
        old = [st.copy() for st in initial.states]
    residuals: list[float] = []
    for m in range(cfg.max_iter):
        new = [phi0.copy()]
        acc = phi0.copy()
        for j in range(p.size - 1):
            inc = x_increment(kc, float(p[j]), float(p[j + 1]),
                              _tuple_args(cfg, old[j]))
            acc = SpectralState(cfg.d, cfg.N, acc.coeffs + inc.coeffs)
            _guard(j + 1, acc, cfg.s, limit)
            new.append(acc)
        res = _distance(new, old, p, cfg.lam, cfg.s)
        residuals.append(res)
        old = new
        if res < cfg.tol:
            return Trajectory(p.copy(), new,
                              {"scheme": "picard", "iterations": m + 1,
                               "residuals": residuals})
    raise NonConvergenceError(cfg.max_iter, residuals, cfg.tol)


def _pair_norms(states, s: float):
    """All pairwise H^s distances via one Gram matrix; returns (dist2, diag)."""
    d, N = states[0].d, states[0].N
    w = (1.0 + _sq_norms(d, N)).ravel() ** s
    C = np.stack([st.coeffs.ravel() for st in states])
    G = (C * w) @ C.conj().T
    diag = np.real(np.diag(G))
    dist2 = diag[:, None] + diag[None, :] - 2.0 * np.real(G)
    return np.maximum(dist2, 0.0), np.maximum(diag, 0.0)


def holder_seminorm(traj: Trajectory, lam: float, s: float) -> float:
    """sup over grid pairs of |psi(t) - psi(t')|_{H^s} / |t - t'|^lam."""
    if traj.times.size < 2:
        raise ConfigError("trajectory needs at least two times")
    dist2, _ = _pair_norms(traj.states, s)
    dt = np.abs(traj.times[:, None] - traj.times[None, :])
    iu = np.triu_indices(traj.times.size, k=1)
    return float(np.max(np.sqrt(dist2[iu]) / dt[iu] ** lam))


def sup_norm(traj: Trajectory, s: float) -> float:
    _, diag = _pair_norms(traj.states, s)
    return float(np.sqrt(diag.max()))


def holder_norm(traj: Trajectory, lam: float, s: float) -> float:
    """Discrete C^{0,lambda} norm: sup norm plus the Holder seminorm."""
    return sup_norm(traj, s) + holder_seminorm(traj, lam, s)


def _distance(states_a, states_b, times, lam: float, s: float) -> float:
    diff = [SpectralState(a.d, a.N, a.coeffs - b.coeffs)
            for a, b in zip(states_a, states_b)]
    traj = Trajectory(times, diff)
    return holder_norm(traj, lam, s)


def c0lambda_distance(a: Trajectory, b: Trajectory, lam: float, s: float) -> float:
    """C^{0,lambda} norm of the difference of two same-partition trajectories."""
    if a.times.size != b.times.size or not np.allclose(a.times, b.times):
        raise ConfigError("trajectories live on different partitions")
    return _distance(a.states, b.states, a.times, lam, s)


def reference_split_step(phi0: SpectralState, T: float, dt: float,
                         d: int, k: int, N: int) -> Trajectory:
    """Strang splitting for i u_t = -Lap u + |u|^{2k} u on a padded grid.

    Returns the physical-variable trajectory u(t_j); compare against the
    interaction unknown phi through apply_U with w(t) = t. Both substeps
    are exactly unitary on the padded collocation grid (no per-step
    truncation), so the padded mass in meta is conserved to rounding;
    output states are the central [-N, N]^d crop.
    """
    if (phi0.d, phi0.N) != (d, N):
        raise ConfigError("phi0 does not match the declared box")
    if T <= 0 or dt <= 0:
        raise ConfigError("need T > 0 and dt > 0")
    steps = max(1, int(round(T / dt)))
    h = T / steps
    P = next_fast_len((2 * k + 2) * N + 1)
    wave = np.fft.fftfreq(P, 1.0 / P).astype(np.int64)
    msq = wave ** 2
    for _ in range(d - 1):
        msq = msq[..., None] + wave ** 2
    idx = np.arange(-N, N + 1) % P
    box = np.ix_(*([idx] * d))
    spec = np.zeros((P,) * d, dtype=complex)
    spec[box] = phi0.coeffs
    half = np.exp(-0.5j * h * msq)
    times = [0.0]
    states = [phi0.copy()]
    mass = [float(np.sqrt(np.sum(np.abs(spec) ** 2)))]
    for j in range(steps):
        spec = spec * half
        u = np.fft.ifftn(spec) * P ** d
        u = u * np.exp(-1j * h * np.abs(u) ** (2 * k))
        spec = np.fft.fftn(u) / P ** d
        spec = spec * half
        times.append((j + 1) * h)
        states.append(SpectralState(d, N, spec[box].copy()))
        mass.append(float(np.sqrt(np.sum(np.abs(spec) ** 2))))
    return Trajectory(np.array(times), states,
                      {"scheme": "split_step", "dt": h, "padding": P,
                       "mass_padded": mass})


def plane_wave_exact(c: complex, m, path, t: float, k: int, N: int) -> SpectralState:
    """Single-mode solution c e^{-i|c|^{2k} t} delta_m in interaction variables.

    The single-mode subspace has every resonance offset zero, so the
    interaction-variable solution does not depend on the path; `path`
    only bounds the admissible horizon. Compose with apply_U at w(t) for
    the physical coefficients.
    """
    if path is not None and not 0.0 <= t <= path.T * (1 + 1e-12):
        raise ConfigError(f"t={t} outside the path horizon")
    m = np.atleast_1d(np.asarray(m, dtype=int))
    amp = c * np.exp(-1j * abs(c) ** (2 * k) * t)
    return unit_mode(m.size, N, m, amp)
