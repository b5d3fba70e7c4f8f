from fractions import Fraction

import numpy as np
import pytest

from shiftlab.construct import (
    ConstructionRejected,
    adjoint_pair_weight,
    example1_b,
    example1_weight,
    example2_sequences,
    example2_weight,
    experimental_k_chain_weight,
    k_chain_sequences,
    wag_preprocess,
    wag_weight,
    wag_weight_cofinite,
    wag_weight_unilateral,
)
from shiftlab.intset import catalog, complement_of, evens, explicit
from shiftlab.weights import C0, adjoint_reflect, product_table, return_time_e0_ball

THICK = catalog("thick_powers2")


def E_of(w, lo, hi):
    return product_table(w, lo, hi)


# ---------------------------------------------------------------- first example


def test_example1_recurrence():
    assert example1_b(4) == [2, 7, 18, 41]
    b = example1_b(10)
    assert all(b[n] == 2 * b[n - 1] + n + 2 for n in range(1, 10))


def test_example1_prefix():
    w, _ = example1_weight(3)
    assert [float(v) for v in w.values(0, 7)] == [1, 2, 0.5, 1, 1, 2, 2, 0.25]


def test_example1_block_lengths_sum_to_2b():
    w, lay = example1_weight(6)
    b = lay.recurrences["b"]
    stops = {blk.label: blk.stop for blk in lay.blocks}
    for n in range(1, 7):
        # everything after the leading B1 block through B_{b_n}
        assert stops[f"B{n}"] - 1 == 2 * b[n - 1]
    assert lay.tiles() and lay.lo == 0 and lay.hi == w.hi == 2 * b[-1]


def test_example1_growth_forces_square_collapse():
    w, _ = example1_weight(9)
    t = E_of(w, 0, w.hi)
    hits = 0
    for k in range(1, w.hi // 2 + 1):
        if t.exponent(k) >= 2:  # product > 2
            hits += 1
            assert t.exponent(2 * k) == 0, k
    # A_n climbs to exponent n, so n - 1 of its indices have product > 2
    assert hits == sum(n - 1 for n in range(2, 10))


def test_example1_endpoint_products():
    # the flat zone starts one index later than the shorthand interval suggests
    w, lay = example1_weight(4)
    t = E_of(w, 0, w.hi)
    b = lay.recurrences["b"]
    assert t.exponent(1) == 1 and b[0] - 1 == 1
    for n in range(1, 4):
        assert all(t.exponent(k) == 0 for k in range(b[n - 1] + 1, 2 * b[n - 1] + 1))


# ---------------------------------------------------------------- second example


def test_example2_sequences():
    seq = example2_sequences(5)
    assert seq["s"][:4] == [1, 3, 17, 104]
    assert seq["a"][:3] == [1, 8, 51]
    s, a, b, c = seq["s"], seq["a"], seq["b"], seq["c"]
    for n in range(1, 5):
        assert s[n + 1] == 2 * (3 * (s[n] - 1) + n + 1) + n
        assert a[n - 1] == 3 * (s[n - 1] - 1) + n
        assert b[n - 1] == s[n] - 1 - a[n - 1]
        assert c[n - 1] == 2 * (s[n] - 1) - 1


def test_example2_layout_values():
    w, lay = example2_weight(4)
    assert w.value(3) == 0.5 and w.value(17) == 0.25
    s = lay.recurrences["s"]
    assert all(w.exponent(s[n]) == -n for n in range(1, 5))
    assert lay.tiles() and w.hi == 3 * (s[-1] - 1)
    t = E_of(w, 0, w.hi)
    assert t.exponent(8) == t.exponent(16) == 2


def test_example2_invariants():
    w, lay = example2_weight(6)
    t = E_of(w, 0, w.hi)
    for k in range(1, w.hi // 3 + 1):
        if t.exponent(k) >= 1:
            assert t.exponent(3 * k) == 0, k
    for n, a in enumerate(lay.recurrences["a"], start=1):
        if n >= 2 and 2 * a <= w.hi:
            assert t.exponent(a) == t.exponent(2 * a) == n


# ---------------------------------------------------------------- cofinite case


def test_cofinite_case():
    w0, _ = wag_weight_cofinite(0, 100)
    assert all(w0.exponent(n) == 1 for n in range(0, 200))
    w, lay = wag_weight_cofinite(3, 100)
    t = E_of(w, -100, 100)
    assert t.product(3) == 2 and t.product(4) == 4
    assert [w.exponent(n) for n in range(-3, 5)] == [-1, -1, -1, 0, 0, 0, 1, 1]
    for m in range(1, 50):
        assert t.backward_exponent(-1, m) == -m
    assert lay.tiles() and lay.lo == -100 and lay.hi == 100
    assert np.array_equal(lay.exponents(), w.exponents(-100, 100))
    rt = return_time_e0_ball(w, C0, Fraction(1, 3), 100)
    assert rt.members == [0] + list(range(4, 101))


# ---------------------------------------------------------------- general case


def test_preprocessing_merges_adjacent_runs():
    pre = wag_preprocess(THICK, 40)
    assert pre.intervals[:3] == ((2, 6), (8, 11), (16, 20))
    assert wag_preprocess(explicit([0, 1, 5, 7, 8]), 10).intervals == ((7, 8),)
    assert wag_preprocess(explicit([0, 1, 5, 7, 8]), 10).dropped == (0, 1, 5)


def test_wag_prefix():
    w, _ = wag_weight(THICK, 100)
    # first interval is 2..6 (length 5): two doublings, two halvings, a trailing one
    assert [float(v) for v in w.values(0, 7)] == [1, 1, 2, 2, 0.5, 0.5, 1, 1]
    t = E_of(w, 0, 100)
    assert t.exponent(9) == 2 and t.exponent(7) == 0


def brute_guarantees(w, Fp, N):
    t = E_of(w, -N, N)
    ind = [m in Fp for m in range(N + 2 * N + 3)]
    rt = return_time_e0_ball(w, C0, Fraction(1, 3), N)
    bad = []
    for m in range(1, N + 1):
        if not ind[m] and t.exponent(m) != 0:
            bad.append(("a", m))
        r = 0
        while m - r - 1 >= 0 and all(ind[i] for i in range(m - r - 1, m + r + 3)):
            r += 1
        if t.exponent(m) < r:
            bad.append(("b", m, r))
    bad += [("c", m) for m in rt.positive if m not in Fp]
    return bad


@pytest.mark.parametrize("name", ["thick_powers2", "grid_union", "complement_powers2"])
def test_wag_guarantees_exhaustive(name):
    F = catalog(name)
    N = 3000
    w, lay = wag_weight(F, N)
    Fp = set(wag_preprocess(F, N).elements())
    assert brute_guarantees(w, Fp, N) == []
    assert lay.tiles() and lay.lo == -N and lay.hi == N


def test_wag_empty_after_preprocessing_rejected():
    with pytest.raises(ConstructionRejected):
        wag_weight(evens(), 100)


def test_wag_unilateral_is_positive_half():
    w, _ = wag_weight(THICK, 500)
    u, _ = wag_weight_unilateral(THICK, 500)
    assert np.array_equal(u.exponents(0, 600), w.exponents(0, 600))


# ---------------------------------------------------------------- adjoint pair


def test_adjoint_pair_mirror_and_tiling():
    N = 5000
    w, v, lay = adjoint_pair_weight(THICK, N)
    for n in range(1, N + 1):
        assert w.exponent(n) + w.exponent(-n) == 0
    assert lay.tiles() and lay.lo == -N and lay.hi == N
    r = adjoint_reflect(v)
    assert np.array_equal(r.exponents(-N, N), w.exponents(-N, N))
    for n in range(-N + 1, N):
        assert v.exponent(n) == w.exponent(1 - n)


def test_adjoint_valleys_on_gaps():
    w, _, lay = adjoint_pair_weight(THICK, 100)
    labels = {b.label for b in lay.blocks}
    assert {"I1", "Ibar1", "J1"} <= labels
    # F' keeps (2,6) but 2..6 then feeds a valley gap 7 of length 1 (stays 1)
    assert [w.exponent(n) for n in range(2, 8)] == [1, 1, -1, -1, 0, 0]
    assert [w.exponent(n) for n in range(12, 16)] == [-1, -1, 1, 1]


def test_adjoint_disjoint_complement_has_growth_on_negative_side():
    w, v, _ = adjoint_pair_weight(THICK, 2000)
    tv = E_of(v, -2000, 2000)
    comp = set(complement_of(THICK).materialize(2000))
    # v grows where w's gap valleys were, i.e. far inside the complement
    big = [m for m in range(1, 2000) if tv.exponent(m) >= 3]
    assert big and all(m in comp for m in big)


# ---------------------------------------------------------------- k-chain


def test_k_chain_disabled_by_default():
    with pytest.raises(ConstructionRejected, match="experimental"):
        experimental_k_chain_weight(2, 4)


def test_k_chain_two_is_example2():
    w, _ = experimental_k_chain_weight(2, 5, experimental=True)
    e, _ = example2_weight(5)
    assert w.hi == e.hi and np.array_equal(w.exponents(0, w.hi), e.exponents(0, e.hi))
    assert k_chain_sequences(2, 5)["s"] == example2_sequences(5)["s"]


def test_k_chain_one_collapses_squares():
    w, _ = experimental_k_chain_weight(1, 8, experimental=True)
    t = E_of(w, 0, w.hi)
    for k in range(1, w.hi // 2 + 1):
        if t.exponent(k) >= 2:
            assert t.exponent(2 * k) == 0


def test_k_chain_three_large_horizon():
    w, lay = experimental_k_chain_weight(3, 5, experimental=True)
    assert w.hi >= 100_000
    t = E_of(w, 0, w.hi)
    a = lay.recurrences["a"]
    for n in range(2, 6):
        assert [t.exponent(p * a[n - 1]) for p in (1, 2, 3)] == [n] * 3
    ms = np.arange(1, w.hi // 4 + 1)
    assert not ((t.E[ms] >= 2) & (t.E[4 * ms] >= 2)).any()
    assert "experimental" in lay.notes
