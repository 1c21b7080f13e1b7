"""Shared test helpers: quadrature oracles independent of the library closed forms."""

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile(
    "modnls",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("modnls")


def gl_phase_integral(path, a_values, s, t, nodes=20, phase_cap=8.0):
    """Composite Gauss-Legendre quadrature of int_s^t exp(i a w(tau)) dtau.

    Splits every linear path segment into panels so the phase change per
    panel stays below phase_cap for the largest |a|; at 20 nodes that
    keeps the rule exact to rounding.  Deliberately avoids the closed
    form used by phi_increment.
    """
    a_values = np.atleast_1d(np.asarray(a_values, dtype=float))
    out = np.zeros(a_values.shape, dtype=complex)
    if t <= s:
        return out if a_values.size > 1 else complex(out[0])
    grid = path.t_grid
    vals = path.values
    i0 = np.searchsorted(grid, s, side="right")
    i1 = np.searchsorted(grid, t, side="left")
    ts = np.concatenate([[s], grid[i0:i1], [t]])
    x, wq = np.polynomial.legendre.leggauss(nodes)
    amax = max(1.0, float(np.abs(a_values).max()))
    for lo, hi in zip(ts[:-1], ts[1:]):
        w_lo = np.interp(lo, grid, vals)
        w_hi = np.interp(hi, grid, vals)
        panels = int(np.ceil(amax * abs(w_hi - w_lo) / phase_cap)) + 1
        edges = np.linspace(lo, hi, panels + 1)
        for plo, phi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (phi - plo)
            tau = 0.5 * (plo + phi) + half * x
            wv = np.interp(tau, grid, vals) + path.offset
            out += half * (np.exp(1j * np.outer(a_values, wv)) @ wq)
    return out if a_values.size > 1 else complex(out[0])


def duhamel_x_oracle(path, s, t, states, nodes=20):
    """First-principles Duhamel evaluation of the Young kernel, d=1 only.

    Enumerates every interaction tuple, integrates each oscillatory phase
    by Gauss-Legendre quadrature, and accumulates
    -i sum Phi_inc(Omega) prod_j (J_j psi_j)(n_j) on the output box.
    """
    m = len(states)
    assert m % 2 == 1
    N = states[0].N
    modes = np.arange(-N, N + 1)
    grids = np.meshgrid(*([modes] * m), indexing="ij")
    nout = np.zeros_like(grids[0])
    omega = np.zeros_like(grids[0])
    prod = np.ones_like(grids[0], dtype=complex)
    for j, g in enumerate(grids):
        sign = 1 if j % 2 == 0 else -1
        nout = nout + sign * g
        omega = omega - sign * g * g
        coeff = states[j].coeffs if sign == 1 else np.conj(states[j].coeffs)
        prod = prod * coeff[g + N]
    omega = omega + nout * nout
    keep = np.abs(nout) <= N
    uniq, inv = np.unique(omega[keep], return_inverse=True)
    phi_vals = gl_phase_integral(path, uniq, s, t, nodes=nodes)
    phi_vals = np.atleast_1d(phi_vals)
    out = np.zeros(2 * N + 1, dtype=complex)
    np.add.at(out, nout[keep] + N, prod[keep] * phi_vals[inv])
    return -1j * out
