"""Resonance-resolved fold tables against brute-force tuple enumeration."""

import itertools

import numpy as np
import pytest

from modnls._fold import FoldResult, Slot, fold, fold_dense, fold_fft
from modnls.errors import ConfigError, NumericsError


def brute_fold_1d(values, signs, N):
    """Dictionary {(q, n): sum of slot products} over all tuples.

    Slots carry their values verbatim; the sign only decides how the mode
    and its square enter the two constraints (conjugation is the
    caller's job in the library too).
    """
    table = {}
    modes = range(-N, N + 1)
    for tup in itertools.product(modes, repeat=len(values)):
        n = sum(sg * m for sg, m in zip(signs, tup))
        q = sum(sg * m * m for sg, m in zip(signs, tup))
        term = 1.0 + 0.0j
        for v, m in zip(values, tup):
            term *= v[m + N]
        table[(q, n)] = table.get((q, n), 0.0) + term
    return table


def test_fold_matches_brute_force():
    rng = np.random.default_rng(2)
    N = 2
    values = [rng.standard_normal(5) + 1j * rng.standard_normal(5)
              for _ in range(3)]
    signs = (1, -1, 1)
    slots = [Slot(v, sg) for v, sg in zip(values, signs)]
    res = fold(slots, d=1, method="dense")
    expected = brute_fold_1d(values, signs, N)
    q_vals = res.q_values
    for qi, q in enumerate(q_vals):
        for n in range(-res.N_out, res.N_out + 1):
            want = expected.get((q, n), 0.0)
            got = res.table[qi, n + res.N_out]
            assert got == pytest.approx(want, abs=1e-13), (q, n)
    covered = {q for q, _ in expected if abs(expected[(q, _)]) > 0}
    assert covered <= set(q_vals.tolist())


@pytest.mark.parametrize("d,N,signs", [
    (1, 3, (1, -1, 1)),
    (1, 2, (1, -1, 1, -1, 1)),
    (2, 2, (1, -1, 1)),
    (1, 3, (-1, -1, -1)),
])
def test_dense_and_fft_agree(d, N, signs):
    rng = np.random.default_rng(5)
    shape = (2 * N + 1,) * d
    slots = [Slot(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), sg)
             for sg in signs]
    a = fold_dense(slots, d)
    b = fold_fft(slots, d)
    assert a.q_min == b.q_min
    scale = np.abs(a.table).max()
    np.testing.assert_allclose(b.table, a.table, atol=1e-12 * max(1.0, scale))


def test_real_slots_give_real_tables():
    rng = np.random.default_rng(8)
    slots = [Slot(np.abs(rng.standard_normal(7)), sg) for sg in (1, -1, 1)]
    dense = fold_dense(slots, 1)
    fft = fold_fft(slots, 1)
    assert not np.iscomplexobj(dense.table)
    assert not np.iscomplexobj(fft.table)
    np.testing.assert_allclose(fft.table, dense.table, atol=1e-12)


def test_collapse_q_is_plain_convolution():
    rng = np.random.default_rng(3)
    vals = [rng.standard_normal(7) + 1j * rng.standard_normal(7) for _ in range(3)]
    slots = [Slot(v, sg) for v, sg in zip(vals, (1, -1, 1))]
    res = fold(slots, 1)
    oriented = [vals[0], vals[1][::-1], vals[2]]
    conv = np.convolve(np.convolve(oriented[0], oriented[1]), oriented[2])
    np.testing.assert_allclose(res.collapse_q(), conv, atol=1e-12)


def test_single_slot_lattice_convention():
    v = np.arange(1.0, 6.0) + 1j  # modes -2..2
    plus = fold([Slot(v, 1)], 1)
    for n in range(-2, 3):
        qi = int(n * n - plus.q_min)
        assert plus.table[qi, n + 2] == pytest.approx(v[n + 2], abs=0)
    assert abs(plus.table).sum() == pytest.approx(np.abs(v).sum(), abs=1e-13)

    minus = fold([Slot(v, -1)], 1)
    for n in range(-2, 3):
        qi = int(-n * n - minus.q_min)
        assert minus.table[qi, n + 2] == pytest.approx(v[2 - n], abs=0)


def test_crop_spatial_center_crop():
    rng = np.random.default_rng(9)
    slots = [Slot(rng.standard_normal(5), sg) for sg in (1, -1, 1)]
    res = fold(slots, 1)
    cropped = res.crop_spatial(2)
    assert cropped.N_out == 2
    lo = res.N_out - 2
    np.testing.assert_array_equal(cropped.table, res.table[:, lo:lo + 5])
    assert cropped.q_min == res.q_min


def test_q_values_span():
    slots = [Slot(np.ones(5), sg) for sg in (1, -1, 1)]
    res = fold(slots, 1)
    np.testing.assert_array_equal(res.q_values,
                                  np.arange(res.q_min, res.q_min + res.table.shape[0]))


def test_budget_guards():
    big = np.ones(601)
    with pytest.raises(NumericsError):
        fold_dense([Slot(big, 1), Slot(big, -1), Slot(big, 1)], 1)
    mid = np.ones(301)
    with pytest.raises(NumericsError):
        fold_fft([Slot(mid, 1), Slot(mid, -1), Slot(mid, 1)], 1)


def test_slot_validation():
    with pytest.raises(ConfigError):
        Slot(np.ones(5), 2)
    with pytest.raises(ConfigError):
        fold([Slot(np.ones(5), 1), Slot(np.ones(7), -1)], 1)
    with pytest.raises(ConfigError):
        fold([Slot(np.ones((5, 5)), 1)], 1)
    with pytest.raises(ConfigError):
        fold([Slot(np.ones(4), 1)], 1)  # even side has no centre mode
