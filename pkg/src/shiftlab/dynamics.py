"""Operator-level criteria for weighted shifts, reduced to exact product tests.

Each check turns a statement about return-time sets into integer
comparisons on a :class:`~shiftlab.weights.ProductTable`, and every
membership claim about a family goes through a family predicate with
horizon semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .construct import Preprocessed, wag_preprocess
from .family import Status, Verdict
from .intset import IntSet, explicit
from .weights import (
    C0,
    BasisNorms,
    ReturnTimeReport,
    SpaceKind,
    WeightSeq,
    _e0_members,
    conjugate_basis_norms,
    exp_above,
    exp_below,
    product_table,
)

__all__ = [
    "BesWindowSets",
    "bes_sets",
    "min_q",
    "window_set",
    "wag_E_set",
    "check_wag_inclusion",
    "check_adjoint_inclusions",
    "direct_sum_return_times",
    "salas_unilateral_check",
    "salas_bilateral_check",
    "c_set",
    "joint_basis_norm_check",
    "diagonal_extraction",
    "f_mixing_criterion_reduction",
]


def _require_dyadic(*ws: WeightSeq) -> None:
    for w in ws:
        if not w.dyadic:
            raise TypeError(f"{w.name}: this check runs on dyadic weights")


# --------------------------------------------------------------------------
# Bès window sets


@dataclass(frozen=True)
class BesWindowSets:
    M: Fraction
    j: int
    horizon: int
    A: IntSet  # {n : w_{j+1}..w_{j+n} > M}
    A_bar: IntSet  # {n : w_j..w_{j-n+1} < 1/M}

    def both(self) -> list[int]:
        a = set(self.A.materialize(self.horizon))
        return [n for n in self.A_bar.materialize(self.horizon) if n in a]


def _bes_masks(w: WeightSeq, M: Fraction, j: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    t = product_table(w, min(0, j - N), max(0, j + N))
    n = np.arange(1, N + 1)
    Ej = t.E[j - t.lo]
    fwd = t.E[j + n - t.lo] - Ej
    bwd = Ej - t.E[j - n - t.lo]
    # 2**f > M  <=>  f >= exp_above(M);  2**b < 1/M  <=>  b <= exp_below(1/M)
    return fwd >= exp_above(M), bwd <= exp_below(1 / M)


def bes_sets(w: WeightSeq, M: Fraction, j: int, N: int) -> BesWindowSets:
    """A_{M,j} and its backward twin within [1, N], by strict comparison."""
    if w.side != "bi":
        raise ValueError("Bès window sets need a bilateral weight")
    _require_dyadic(w)
    M = Fraction(M)
    if M <= 0:
        raise ValueError("M must be positive")
    fa, ba = _bes_masks(w, M, j, N)
    n = np.arange(1, N + 1)
    A = explicit(n[fa].tolist(), f"A[M={M},j={j}]")
    Ab = explicit(n[ba].tolist(), f"Abar[M={M},j={j}]")
    return BesWindowSets(M, j, N, A, Ab)


def min_q(bound: Fraction) -> int:
    """Least q >= 1 with 2**q > bound."""
    return max(1, exp_above(Fraction(bound)))


def window_set(ind: bytearray | np.ndarray, left: int, right: int, lo: int, hi: int) -> list[int]:
    """{m in [lo, hi] : ind[m - left .. m + right] all set}; out-of-range counts as unset."""
    arr = np.frombuffer(bytes(ind), dtype=np.uint8) if not isinstance(ind, np.ndarray) else ind
    size = len(arr)
    c = np.concatenate(([0], np.cumsum(arr.astype(np.int64) != 0)))
    out = []
    for m in range(max(lo, left), hi + 1):
        a, b = m - left, m + right
        if b >= size:
            break
        if c[b + 1] - c[a] == b - a + 1:
            out.append(m)
    return out


def wag_E_set(F: IntSet, q: int, j: int, N: int) -> IntSet:
    """{m in [0, N] : [m - q - j - 1, m + q + j + 1] ⊆ F}."""
    r = q + j + 1
    ind = F.indicator(N + r)
    return explicit(window_set(ind, r, r, 0, N), f"E[{F.name},q={q},j={j}]")


def _inclusion_verdict(
    query: str,
    w: WeightSeq,
    E: list[int],
    M: Fraction,
    j: int,
    N: int,
    params: dict,
) -> Verdict:
    fa, ba = _bes_masks(w, M, j, N)
    E = [m for m in E if 1 <= m <= N]
    params = {"weight": w.name, "M": M, "j": j, **params}
    if not E:
        return Verdict(query, Status.UNKNOWN, N, params, {"reason": "E-set empty below horizon"})
    for m in E:
        if not (fa[m - 1] and ba[m - 1]):
            t = product_table(w, min(0, j - m), j + m)
            return Verdict(query, Status.REFUTED, N, params, {
                "m": m,
                "forward_exponent": t.forward_exponent(j, m),
                "backward_exponent": t.backward_exponent(j, m),
                "failed": "forward" if not fa[m - 1] else "backward",
            })
    Ab = int(np.count_nonzero(fa & ba))
    return Verdict(query, Status.WITNESSED, N, params, {"E_size": len(E), "A_cap_Abar_size": Ab,
                                                        "E_first": E[0], "E_last": E[-1]})


def check_wag_inclusion(w: WeightSeq, F: IntSet | Preprocessed, M: Fraction, j: int, N: int) -> Verdict:
    """Check E ∩ [1, N] ⊆ A_{M,j} ∩ Ā_{M,j} for a weight built from F.

    q is the least q >= 1 with 2**q > M w_1..w_j, and E uses windows
    inside F' ∩ [0, N] (F preprocessed as for the construction).
    """
    _require_dyadic(w)
    M = Fraction(M)
    pre = F if isinstance(F, Preprocessed) else wag_preprocess(F, N, 2)
    t = product_table(w, 0, j)
    q = min_q(M * t.product(j))
    r = q + j + 1
    E = window_set(pre.indicator(), r, r, 0, N)
    return _inclusion_verdict("wag-inclusion", w, E, M, j, N, {"set": pre.source, "q": q})


def check_adjoint_inclusions(
    w: WeightSeq, v: WeightSeq, F: IntSet | Preprocessed, M: Fraction, j: int, N: int
) -> tuple[Verdict, Verdict]:
    """Both inclusions for a weight built by ``adjoint_pair_weight`` and its reflection v.

    E_1 uses q_1 with 2**q_1 > M w_1..w_j and windows
    [m - q_1 - j - 1, m + q_1 + j + 1] inside F'; E_2 uses q_2 with
    2**q_2 > M max(w_0..w_{-j+1}, v_2..v_j) and windows
    [m - q_2 - j, m + q_2 + j + 1] inside [1, N] minus F'.
    """
    _require_dyadic(w, v)
    M = Fraction(M)
    pre = F if isinstance(F, Preprocessed) else wag_preprocess(F, N, 3)
    tw = product_table(w, -j, j)
    tv = product_table(v, 0, j)
    q1 = min_q(M * tw.product(j))
    back_w = 1 / tw.product(-j)  # w_0 w_{-1} .. w_{-j+1}
    v_2j = tv.product(j) / tv.product(1)  # v_2 .. v_j
    q2 = min_q(M * max(back_w, v_2j))
    ind = pre.indicator()
    E1 = window_set(ind, q1 + j + 1, q1 + j + 1, 0, N)
    comp = bytearray(1 - x for x in ind)
    comp[0] = 0  # the gap set lives in {1, 2, ...}
    E2 = window_set(comp, q2 + j, q2 + j + 1, 0, N)
    v1 = _inclusion_verdict("adjoint-inclusion-w", w, E1, M, j, N, {"set": pre.source, "q": q1})
    v2 = _inclusion_verdict("adjoint-inclusion-v", v, E2, M, j, N, {"set": f"N\\{pre.source}'", "q": q2})
    return v1, v2


# --------------------------------------------------------------------------
# direct sums


def direct_sum_return_times(
    specs: Sequence[tuple[WeightSeq, int]],
    space: SpaceKind = C0,
    rho: Fraction = Fraction(1, 3),
    N: int = 10_000,
) -> ReturnTimeReport:
    """Joint e0-ball return times of B_{w_1}^{p_1} ⊕ ... at radius rho.

    m qualifies iff every summand's e0-ball condition holds at time p_i m.
    The sum report is exact on c0 and on unilateral lp; bilateral lp
    summands make it the certified necessary superset, with the rho/2
    condition as sufficient subset.
    """
    rho = Fraction(rho)
    if not 0 < rho < 1:
        raise ValueError("radius must lie in (0, 1)")
    ms = np.arange(1, N + 1, dtype=np.int64)
    nec = np.ones(N, dtype=bool)
    suf = np.ones(N, dtype=bool)
    loose = False
    for w, p in specs:
        if p < 1:
            raise ValueError("powers must be >= 1")
        bi = w.side == "bi"
        t = product_table(w, -p * N if bi else 0, p * N)
        nec &= _e0_members(t, bi, rho, p * ms)
        if space.base == "lp" and bi:
            loose = True
            suf &= _e0_members(t, bi, rho / 2, p * ms)
        else:
            suf &= _e0_members(t, bi, rho, p * ms)
    members = [0] + ms[nec].tolist()
    cond = " and ".join(f"e0-ball({w.name}) at {p}m" for w, p in specs)
    name = " + ".join(f"{w.name}^{p}" for w, p in specs)
    if loose:
        return ReturnTimeReport(cond, members, N, str(space), rho, name, "necessary-superset",
                                [0] + ms[suf].tolist())
    return ReturnTimeReport(cond, members, N, str(space), rho, name, "exact", members)


# --------------------------------------------------------------------------
# growth criteria


def _log_products(w: WeightSeq, N: int) -> np.ndarray:
    return product_table(w, 0, N).E[1:]


def salas_unilateral_check(w: WeightSeq, v: WeightSeq, N: int, T: int = 10) -> Verdict:
    """Running sup over n <= N of min(w_1..w_n, v_1..v_n), reported as a 2**t ladder.

    WITNESSED when every rung t = 1..T is reached, UNKNOWN otherwise:
    divergence cannot be decided at a horizon.
    """
    _require_dyadic(w, v)
    m = np.minimum(_log_products(w, N), _log_products(v, N))
    run = np.maximum.accumulate(m)
    best = int(run[-1])
    arg = int(np.argmax(m)) + 1
    ladder = {}
    for t in range(1, T + 1):
        hit = np.flatnonzero(run >= t)
        ladder[t] = int(hit[0]) + 1 if len(hit) else None
    status = Status.WITNESSED if all(ladder.values()) else Status.UNKNOWN
    sup = Fraction(2) ** best
    return Verdict("salas-uni", status, N, {"w": w.name, "v": v.name, "T": T},
                   {"sup": sup, "sup_exponent": best, "argmax": arg, "ladder": ladder})


def salas_bilateral_check(
    w: WeightSeq, v: WeightSeq, eps: Fraction, q: int, N: int
) -> Verdict:
    """Search n <= N with, for every |j| <= q, both forward windows > 1/eps
    and both backward windows < eps."""
    _require_dyadic(w, v)
    eps = Fraction(eps)
    up, down = exp_above(1 / eps), exp_below(eps)
    ok = np.ones(N, dtype=bool)
    n = np.arange(1, N + 1)
    for x in (w, v):
        t = product_table(x, -N - q, N + q)
        for j in range(-q, q + 1):
            Ej = t.E[j - t.lo]
            ok &= t.E[j + n - t.lo] - Ej >= up
            ok &= Ej - t.E[j - n - t.lo] <= down
    params = {"w": w.name, "v": v.name, "eps": eps, "q": q}
    hit = np.flatnonzero(ok)
    if len(hit):
        return Verdict("salas-bi", Status.WITNESSED, N, params, {"n": int(hit[0]) + 1})
    return Verdict("salas-bi", Status.UNKNOWN, N, params)


# --------------------------------------------------------------------------
# conjugate basis norms


def _as_norms(x: WeightSeq | BasisNorms, lo: int, hi: int) -> BasisNorms:
    if isinstance(x, BasisNorms):
        if x.lo > lo or x.hi < hi:
            raise ValueError("norm sequence does not cover the needed range")
        return x
    return conjugate_basis_norms(x, C0, lo, hi)


def _label(x: WeightSeq | BasisNorms) -> str | None:
    return x.table.weight.name if isinstance(x, BasisNorms) else x.name


def c_set(
    norm_seqs: Sequence[WeightSeq | BasisNorms], eps: Fraction, Nwindow: int, N: int
) -> IntSet:
    """Joint small-norm set within [0, N].

    Unilateral: ∩_{0<=j<=Nwindow} ∩_i {n : ||e_{n+j}|| < eps}.
    Bilateral: ∩_{|j|<=Nwindow} ∩_i {n : ||e_{j+n}|| < eps and ||e_{j-n}|| < eps}.
    """
    eps = Fraction(eps)
    if not norm_seqs:
        raise ValueError("need at least one norm sequence")
    sides = {x.side for x in norm_seqs}
    if len(sides) != 1:
        raise ValueError("mixed unilateral and bilateral sequences")
    bi = sides == {"bi"}
    lo, hi = (-N - Nwindow, N + Nwindow) if bi else (0, N + Nwindow)
    ok = np.ones(N + 1, dtype=bool)
    for x in norm_seqs:
        small = _as_norms(x, lo, hi).below_mask(eps, lo, hi)
        n = np.arange(N + 1)
        js = range(-Nwindow, Nwindow + 1) if bi else range(Nwindow + 1)
        for j in js:
            ok &= small[j + n - lo]
            if bi:
                ok &= small[j - n - lo]
    return explicit(np.flatnonzero(ok).tolist(), f"C[eps={eps},Nw={Nwindow}]")


def joint_basis_norm_check(
    norm_seqs: Sequence[WeightSeq | BasisNorms],
    eps: Fraction,
    Nwindow: int,
    predicate: Callable[[IntSet, int], Verdict],
    N: int,
) -> Verdict:
    """Apply a family predicate to the joint small-norm set (see :func:`c_set`)."""
    s = c_set(norm_seqs, eps, Nwindow, N)
    inner = predicate(s, N)
    params = {"eps": Fraction(eps), "Nwindow": Nwindow, "predicate": str(predicate),
              "weights": [_label(x) for x in norm_seqs]}
    elems = s.materialize(N)
    witness = {"size": len(elems), "first": elems[0] if elems else None, "inner": inner.to_dict()}
    return Verdict("joint-norms", inner.status, N, params, witness)


def diagonal_extraction(
    norm_seqs: Sequence[WeightSeq | BasisNorms],
    R: int,
    predicate: Callable[[IntSet, int], Verdict],
    N: int,
) -> Verdict:
    """Strictly increasing n_r taken from the eps = 1/r, Nwindow = r sets, r = 1..R."""
    seq, prev = [], -1
    for r in range(1, R + 1):
        s = c_set(norm_seqs, Fraction(1, r), r, N)
        v = predicate(s, N)
        nxt = next((n for n in s.materialize(N) if n > prev), None)
        if not v.witnessed or nxt is None:
            return Verdict("diagonal", Status.UNKNOWN, N, {"R": R}, {"stopped_at": r, "sequence": seq})
        seq.append(nxt)
        prev = nxt
    return Verdict("diagonal", Status.WITNESSED, N, {"R": R}, {"sequence": seq})


def f_mixing_criterion_reduction(
    w: WeightSeq,
    predicate: Callable[[IntSet, int], Verdict],
    ladder: Sequence[tuple[Fraction, int]] | None = None,
    N: int = 10_000,
) -> Verdict:
    """Run :func:`joint_basis_norm_check` on one weight along a ladder of (eps, Nwindow).

    The default ladder is eps = 2**-t, Nwindow = t for t = 1..5.
    WITNESSED needs every rung witnessed; any REFUTED rung refutes.
    """
    if ladder is None:
        ladder = [(Fraction(1, 2 ** t), t) for t in range(1, 6)]
    steps = [joint_basis_norm_check([w], e, k, predicate, N) for e, k in ladder]
    if any(s.refuted for s in steps):
        status = Status.REFUTED
    elif all(s.witnessed for s in steps):
        status = Status.WITNESSED
    else:
        status = Status.UNKNOWN
    rungs = [{"eps": s.params["eps"], "Nwindow": s.params["Nwindow"], "status": s.status.value,
              "first": s.witness["first"]} for s in steps]
    return Verdict("f-mixing", status, N, {"weight": w.name, "predicate": str(predicate)},
                   {"rungs": rungs})
