import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftlab.construct import example1_weight, wag_weight_cofinite
from shiftlab.oracle import grid_return_times
from shiftlab.weights import (
    C0,
    RangeError,
    SpaceKind,
    WeightFileError,
    WeightSeq,
    adjoint_reflect,
    apply_shift,
    apply_weighted_shift,
    conjugate_basis_norms,
    conjugate_map,
    exp_above,
    exp_below,
    format_weight_file,
    parse_weight_file,
    product_table,
    product_table_json,
    read_weight_file,
    return_time_c0_general,
    return_time_e0_ball,
    window_product_backward,
    window_product_forward,
    write_weight_file,
)

F = Fraction
TWO = WeightSeq.constant(2, name="two")
TWO_BI = WeightSeq.constant(2, side="bi", name="two-bi")
ONES = WeightSeq.constant(1, name="ones")
ONES_BI = WeightSeq.constant(1, side="bi", name="ones-bi")
EX1, _ = example1_weight(8)


def up_down(lo=-50, hi=50):
    # e(n) = +1 for n >= 1, -1 for n <= 0
    return WeightSeq.from_exponents([-1] * (1 - lo) + [1] * hi, lo, "bi", left=-1, right=1, name="ud")


# ---------------------------------------------------------------- thresholds


@pytest.mark.parametrize("x", [F(1, 3), F(1), F(2), F(3), F(5, 4), F(1, 8), F(7, 2), F(1024)])
def test_exact_thresholds(x):
    ta, tb = exp_above(x), exp_below(x)
    assert F(2) ** ta > x >= F(2) ** (ta - 1)
    assert F(2) ** tb < x <= F(2) ** (tb + 1)


# ---------------------------------------------------------------- weights and tables


def test_constant_two_products():
    t = product_table(TWO, 0, 10)
    assert t.exponent(5) == 5
    assert window_product_forward(t, 3, 4) == 16
    assert window_product_backward(t, 10, 3) == 8
    assert window_product_forward(t, 4, 0) == window_product_backward(t, 4, 0) == 1


def test_all_ones_products():
    t = product_table(ONES_BI, -20, 20)
    assert not t.exponents(-20, 20).any()


def test_example1_prefix_products():
    t = product_table(EX1, 0, 7)
    assert [t.exponent(n) for n in range(1, 8)] == [1, 0, 0, 0, 1, 2, 0]
    assert window_product_forward(t, 0, 6) == 4


def test_backward_product_with_negative_half_tail():
    # e(n) = -1 for every n <= 0
    t = product_table(up_down(), -10, 10)
    assert window_product_backward(t, 0, 5) == F(1, 32)
    # the cofinite construction keeps w_0 = 1 once L >= 1
    wa, _ = wag_weight_cofinite(3, 50)
    assert window_product_backward(product_table(wa, -10, 10), 0, 5) == F(1, 16)


def test_table_range_errors():
    t = product_table(TWO, 0, 5)
    with pytest.raises(RangeError):
        window_product_forward(t, 3, 4)
    with pytest.raises(ValueError):
        product_table(TWO, -1, 5)
    with pytest.raises(RangeError):
        product_table(EX1, 0, EX1.hi + 5)


def test_nonpositive_weight_rejected():
    with pytest.raises(ValueError):
        WeightSeq.from_values([1, 0, 2])


def test_from_values_detects_dyadic():
    assert WeightSeq.from_values([1, 2, F(1, 4)]).dyadic
    w = WeightSeq.from_values([1, 3, F(1, 4)])
    assert not w.dyadic and w.value(1) == 3


def test_rational_table_matches_dyadic():
    w = up_down()
    a, b = product_table(w, -30, 30), product_table(w.to_rational(), -30, 30)
    assert all(a.product(n) == b.product(n) for n in range(-30, 31))


def test_sup_bounds():
    assert EX1.sup_bounds() == (2, 256)


# ---------------------------------------------------------------- adjoint and basis norms


def test_adjoint_reflect():
    w = up_down()
    v = adjoint_reflect(w)
    assert v.value(1) == w.value(0) and v.value(0) == w.value(1)
    for n in range(-80, 80):
        assert v.value(n) == w.value(1 - n)
    back = adjoint_reflect(v)
    assert back.lo == w.lo and np.array_equal(back.data, w.data) and back.name == w.name
    with pytest.raises(ValueError):
        adjoint_reflect(TWO)


def test_basis_norm_examples():
    assert all(conjugate_basis_norms(ONES, C0, 0, 20).norm(n) == 1 for n in range(21))
    assert conjugate_basis_norms(TWO, C0, 0, 10).norm(10) == F(1, 1024)
    wa, _ = wag_weight_cofinite(3, 50)
    # w_1 = w_2 = 1 and w_3 = w_4 = w_5 = 2, so the product is 8
    assert conjugate_basis_norms(wa, C0, -5, 5).norm(5) == F(1, 8)
    # negative side: ||e_n|| = w_{n+1}...w_0
    nb = conjugate_basis_norms(up_down(), C0, -5, 5)
    assert nb.norm(-3) == F(1, 8)


# ---------------------------------------------------------------- return times


def test_e0_ball_examples():
    assert return_time_e0_ball(ONES, C0, F(1, 3), 50).members == [0]
    assert return_time_e0_ball(TWO, C0, F(1, 3), 50).members == [0] + list(range(2, 51))
    wa, _ = wag_weight_cofinite(3, 200)
    assert return_time_e0_ball(wa, C0, F(1, 3), 200).members == [0] + list(range(4, 201))


def test_e0_ball_example1_square_collapse():
    N = EX1.hi // 2
    rep = return_time_e0_ball(EX1, C0, F(1, 3), N)
    t = product_table(EX1, 0, EX1.hi)
    assert rep.positive and rep.certification == "exact"
    for m in rep.positive:
        assert t.product(m) > 2 and t.exponent(2 * m) == 0


def test_e0_ball_rejects_bad_radius():
    for rho in (0, 1, F(3, 2)):
        with pytest.raises(ValueError):
            return_time_e0_ball(TWO, C0, rho, 5)


def test_bilateral_e0_needs_backward_condition():
    # forward products grow but the backward window never shrinks
    w = WeightSeq.from_exponents([1] * 30, 1, "bi", left=0, right=1)
    assert return_time_e0_ball(w, C0, F(1, 3), 20).members == [0]
    assert return_time_e0_ball(up_down(), C0, F(1, 3), 20).members == [0] + list(range(2, 21))


def test_c0_general_examples():
    assert return_time_c0_general(TWO, {}, {}, F(1, 5), 30).members == list(range(31))
    for w in (TWO, EX1, ONES):
        a = return_time_c0_general(w, {0: 1}, {0: 1}, F(1, 3), 40).members
        assert a == return_time_e0_ball(w, C0, F(1, 3), 40).members
    with pytest.raises(ValueError):
        return_time_c0_general(TWO, {0: 1}, {0: 1}, F(1, 3), 10, space=SpaceKind.parse("l2"))


def test_c0_general_e0_to_e1_against_oracle():
    rep = return_time_c0_general(TWO, {0: 1}, {1: 1}, F(1, 3), 20)
    # coordinate 1 needs |x| < 1/3 with |2^m x - 1| < 1/3, first possible at m = 2
    assert rep.members == list(range(2, 21))
    oracle = grid_return_times(TWO, {0: 1.0}, {1: 1.0}, 1 / 3, 20)
    assert all(v is None or v == (m in rep.members) for m, v in oracle.items())


def test_lp_brackets():
    l2 = SpaceKind.parse("l2")
    rep = return_time_e0_ball(up_down(), l2, F(1, 3), 40)
    assert rep.certification == "necessary-superset"
    assert set(rep.sufficient) <= set(rep.members)
    assert rep.members == return_time_e0_ball(up_down(), C0, F(1, 3), 40).members
    # unilateral ball around e_0: the c0 answer is exact in lp too
    uni = return_time_e0_ball(TWO, l2, F(1, 3), 40)
    assert uni.certification == "exact"
    assert uni.members == return_time_e0_ball(TWO, C0, F(1, 3), 40).members


def test_space_parse():
    assert SpaceKind.parse("lp:3/2").p == F(3, 2)
    assert str(SpaceKind.parse("l2")) == "l2"
    with pytest.raises(ValueError):
        SpaceKind.parse("lp:1/2")
    with pytest.raises(ValueError):
        SpaceKind.parse("hilbert")


# ---------------------------------------------------------------- files


def test_weight_file_round_trip(tmp_path):
    for w in (EX1, up_down(), WeightSeq.from_values([1, 3, F(2, 7)], side="uni", right=F(5, 3), name="r")):
        p = tmp_path / "w.txt"
        write_weight_file(w, p)
        back = read_weight_file(p)
        assert format_weight_file(back) == format_weight_file(w)
        assert back.values(back.lo, back.hi) == w.values(w.lo, w.hi)
        assert (back.left, back.right, back.side) == (w.left, w.right, w.side)


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("side=uni repr=dyadic\n0 1\n1 x\n", 3),
    ("side=uni repr=dyadic\n0 1\n2 1\n", 3),
    ("side=sideways\n", 1),
    ("side=uni repr=rational\n0 1\n1 -2\n", 3),
    ("side=uni repr=dyadic\n0 1 2\n", 2),
])
def test_weight_file_errors(text, line):
    with pytest.raises(WeightFileError, match=f"line {line}:"):
        parse_weight_file(text)


def test_product_table_json_is_exact():
    d = json.loads(product_table_json(product_table(EX1, 0, 7)))
    assert d["E"] == [0, 1, 0, 0, 0, 1, 2, 0] and d["repr"] == "dyadic"


# ---------------------------------------------------------------- properties

exps = st.lists(st.integers(-3, 3), min_size=1, max_size=70)


@given(exps)
def test_exponents_match_multiplication(es):
    w = WeightSeq.from_exponents(es, right=0)
    t = product_table(w, 0, min(64, len(es) + 5))
    prod = F(1)
    for n in range(1, t.hi + 1):
        prod *= w.value(n)
        assert t.product(n) == prod


@given(exps, st.integers(-20, 0))
def test_bilateral_window_identity(es, lo):
    w = WeightSeq.from_exponents(es, lo, "bi", left=1, right=-1)
    t = product_table(w, -25, 25)
    for j in range(-25, 20, 3):
        for n in range(0, 25 - max(j, 0), 4):
            direct = F(1)
            for i in range(j + 1, j + n + 1):
                direct *= w.value(i)
            assert window_product_forward(t, j, n) == direct
            if j - n >= -25:
                back = F(1)
                for i in range(j - n + 1, j + 1):
                    back *= w.value(i)
                assert window_product_backward(t, j, n) == back


@given(exps, st.dictionaries(st.integers(-8, 8), st.fractions(-5, 5), max_size=16), st.booleans())
def test_conjugacy_intertwines(es, x, bi):
    side = "bi" if bi else "uni"
    lo = -10 if bi else 0
    w = WeightSeq.from_exponents(es, lo, side, left=0 if bi else None, right=1)
    if not bi:
        x = {k: v for k, v in x.items() if k >= 0}
    lhs = conjugate_map(w, apply_weighted_shift(w, x))
    rhs = apply_shift(conjugate_map(w, x), side)
    keys = set(lhs) | set(rhs)
    assert all(lhs.get(k, 0) == rhs.get(k, 0) for k in keys)


@given(st.lists(st.integers(-2, 2), min_size=25, max_size=25), st.sampled_from([F(1, 3), F(1, 4), F(2, 5)]))
def test_e0_ball_matches_grid_oracle(es, rho):
    w = WeightSeq.from_exponents(es, right=0)
    exact = set(return_time_e0_ball(w, C0, rho, 20).members)
    oracle = grid_return_times(w, {0: 1.0}, {0: 1.0}, float(rho), 20)
    for m, v in oracle.items():
        if v is not None:
            assert v == (m in exact), m


@given(exps.filter(lambda e: len(e) > 30), st.fractions(F(1, 50), F(49, 50)), st.fractions(F(1, 50), F(49, 50)))
def test_radius_monotone(es, r1, r2):
    r1, r2 = sorted((r1, r2))
    w = WeightSeq.from_exponents(es, -15, "bi", left=-1, right=1)
    small = set(return_time_e0_ball(w, C0, r1, 15).members)
    big = set(return_time_e0_ball(w, C0, r2, 15).members)
    assert small <= big


@given(exps.filter(lambda e: len(e) > 30), st.fractions(F(1, 50), F(49, 50)))
def test_lp_subset_within_superset(es, rho):
    w = WeightSeq.from_exponents(es, -15, "bi", left=-1, right=1)
    rep = return_time_e0_ball(w, SpaceKind.parse("lp:3"), rho, 15)
    assert set(rep.sufficient) <= set(rep.members)
