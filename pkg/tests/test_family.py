import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shiftlab.family import (
    NoElementsError,
    Status,
    density_stats,
    dual_refutation,
    ip_witness_search,
    max_gap,
    parse_predicate,
    piecewise_syndetic_check,
    syndetic_bound_check,
    thick_witness,
    thickly_syndetic_check,
    tilde_core,
    tilde_membership_check,
)
from shiftlab.intset import catalog, complement_of, evens, explicit, naturals

W, R, U = Status.WITNESSED, Status.REFUTED, Status.UNKNOWN
THICK = catalog("thick_powers2")


def test_max_gap():
    assert max_gap(evens(), 100)[0] == 2
    assert max_gap(THICK, 100) == (27, (37, 64))
    assert max_gap(explicit([0]), 10)[0] == 0
    with pytest.raises(NoElementsError, match="no elements below horizon"):
        max_gap(explicit([50]), 10)


def test_thick_witness():
    # 2..6 is already a run of five, so the first witness is 2
    v = thick_witness(THICK, 5, 100)
    assert v.status is W and v.witness["start"] == 2
    assert thick_witness(THICK, 6, 100).witness["start"] == 32
    assert thick_witness(evens(), 2, 1000).status is U
    assert thick_witness(naturals(), 50, 50).witness["start"] == 0


def test_syndetic():
    assert syndetic_bound_check(evens(), 2, 100).status is W
    v = syndetic_bound_check(THICK, 10, 100)
    assert v.status is R and v.witness["gap"] == [37, 64]
    assert syndetic_bound_check(naturals(), 1, 100).status is W


def test_syndetic_trailing_gap_refutes():
    v = syndetic_bound_check(explicit([0, 1, 2]), 3, 10)
    assert v.status is R and v.witness["empty_after"] == 2


def test_thickly_syndetic():
    assert thickly_syndetic_check(naturals(), 4, 1, 200).status is W
    assert thickly_syndetic_check(catalog("complement_fs_tens"), 3, 50, 10_000).status is W
    assert thickly_syndetic_check(evens(), 1, 7, 100).status is R


def test_piecewise_syndetic():
    assert piecewise_syndetic_check(evens(), 100, 1, 1000).status is W
    assert piecewise_syndetic_check(THICK, 6, 0, 100).witness["start"] == 32
    assert piecewise_syndetic_check(explicit([0]), 2, 0, 10).status is U


def test_density_examples():
    st9 = density_stats(catalog("grid", 2), 1800)
    assert abs(st9.density - Fraction(1, 9)) <= Fraction(1, 90)
    nat = density_stats(naturals(), 100, [10])
    assert nat.density == 1 and nat.banach[10] == (1, 1)
    cp = density_stats(catalog("complement_powers2"), 100_000, [100], window_from=10_000)
    assert cp.banach[100][0] >= Fraction(99, 100)


def test_density_window_must_fit():
    with pytest.raises(ValueError):
        density_stats(naturals(), 10, [11])


def test_ip_search():
    v = ip_witness_search(catalog("fs_tens"), 3, 1200)
    assert v.status is W and v.witness["generators"] == [10, 100, 1000]
    v = ip_witness_search(evens(), 4, 100)
    assert v.status is W
    assert ip_witness_search(explicit([1]), 2, 10).status is U


def test_dual_refutation():
    v = dual_refutation(catalog("complement_fs_tens"), catalog("fs_tens"), 10_000)
    assert v.status is R and v.witness["disjoint"] == "symbolic"
    assert dual_refutation(naturals(), THICK, 1000).status is U
    comp = complement_of(THICK, "not_thick")
    assert dual_refutation(THICK, comp, 1000).status is R


def test_dual_horizon_only_disjointness_is_unknown():
    v = dual_refutation(explicit([1, 2], "a"), explicit([5, 6], "b"), 100)
    assert v.status is U and v.witness["disjoint"] == "horizon-only"


def test_tilde_membership():
    inner = parse_predicate("thick:k=4")
    assert tilde_membership_check(THICK, 3, inner, 10_000).status is W
    assert tilde_membership_check(evens(), 1, parse_predicate("nonempty"), 100).status is R
    assert tilde_membership_check(naturals(), 5, inner, 100).status is W


def test_tilde_core_matches_definition():
    elems = set(THICK.materialize(200))
    for k in range(4):
        expect = [n for n in range(k, 181) if all(n + i in elems for i in range(-k, k + 1))]
        assert tilde_core(THICK, k, 180).materialize(180) == expect


def test_parse_predicate():
    p = parse_predicate("ts:k=3,b=50")
    assert str(p) == "ts:k=3,b=50"
    with pytest.raises(ValueError):
        parse_predicate("thick")
    with pytest.raises(ValueError):
        parse_predicate("nope:k=1")
    with pytest.raises(ValueError):
        parse_predicate("thick:q=1")


def test_verdict_json_schema():
    d = thick_witness(THICK, 3, 50).to_dict()
    assert set(d) == {"query", "params", "horizon", "status", "witness"}


# ---------------------------------------------------------------- properties

small_sets = st.lists(st.integers(0, 120), max_size=60).map(explicit)


@given(small_sets, st.integers(1, 30), st.integers(1, 120))
def test_syndetic_refutation_monotone(s, b, N):
    if syndetic_bound_check(s, b, N).status is R:
        for b2 in range(1, b):
            assert syndetic_bound_check(s, b2, N).status is R


@given(small_sets, st.integers(1, 12), st.integers(0, 120))
def test_thick_witness_monotone_and_revalidates(s, k, N):
    v = thick_witness(s, k, N)
    if v.status is W:
        elems = set(s.materialize(N))
        a, b = v.witness["run"]
        assert all(i in elems for i in range(a, b + 1)) and b <= N
        for k2 in range(1, k):
            assert thick_witness(s, k2, N).status is W


@given(small_sets, st.integers(1, 30), st.integers(0, 120))
def test_syndetic_witness_revalidates(s, b, N):
    v = syndetic_bound_check(s, b, N)
    elems = s.materialize(N)
    if v.status is W:
        assert max_gap(s, N)[0] <= b and N - elems[-1] < b
    elif v.status is R and v.witness["gap"][1] is not None:
        lo, hi = v.witness["gap"]
        assert hi - lo > b and not any(lo < m < hi for m in elems)


@given(small_sets, st.integers(1, 150), st.lists(st.integers(1, 20), max_size=3))
def test_density_invariants(s, N, Ls):
    Ls = [L for L in Ls if L <= N] + [N]
    d = density_stats(s, N, Ls)
    assert d.count == len([m for m in s.materialize(N - 1)])
    assert 0 <= d.lower <= d.density <= d.upper <= 1
    assert d.upper >= Fraction(d.count, N)
    assert d.banach[N] == (d.density, d.density)
    for L in Ls:
        lo, hi = d.banach[L]
        assert 0 <= lo <= hi <= 1


@given(st.lists(st.integers(1, 60), min_size=1, max_size=4, unique=True), st.integers(1, 4))
def test_ip_witness_sums_all_members(gens, depth):
    gens = sorted(gens)
    sums = {sum(c) for r in range(1, len(gens) + 1) for c in itertools.combinations(gens, r)}
    s = explicit(sums)
    v = ip_witness_search(s, depth, 300)
    if depth <= len(gens):
        assert v.status is W
    if v.status is W:
        g = v.witness["generators"]
        assert len(g) == depth
        for r in range(1, depth + 1):
            for c in itertools.combinations(g, r):
                assert sum(c) in sums
