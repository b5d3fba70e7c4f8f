"""The acceptance suite: every finitely checkable claim, run exactly.

Each claim is a function ``(RunConfig, overrides) -> (passed, detail)``.
The CLI ``verify-paper`` command and ``tests/test_acceptance.py`` both
drive :func:`run_claims`, so the two always agree.
"""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import construct as C
from . import dynamics as D
from . import family as FM
from . import intset as S
from .oracle import grid_return_times
from .weights import (
    C0,
    WeightSeq,
    apply_shift,
    apply_weighted_shift,
    conjugate_map,
    product_table,
    return_time_c0_general,
    return_time_e0_ball,
)

__all__ = ["RunConfig", "ClaimResult", "CLAIMS", "run_claims", "default_horizon", "property_suite"]

DEFAULT_HORIZON = 10_000


def default_horizon() -> int:
    raw = os.environ.get("SHIFTLAB_HORIZON")
    return int(raw) if raw else DEFAULT_HORIZON


@dataclass(frozen=True)
class RunConfig:
    horizon: int = field(default_factory=default_horizon)
    rho: Fraction = Fraction(1, 3)
    ladder: int = 10
    format: str = "json"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        object.__setattr__(self, "rho", Fraction(self.rho))
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if self.format not in ("json", "csv", "text"):
            raise ValueError("format must be json, csv or text")


@dataclass(frozen=True)
class ClaimResult:
    id: int
    name: str
    passed: bool
    detail: dict[str, Any]
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.id:2d} {'PASS' if self.passed else 'FAIL'}  {self.name}"

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        out = {"id": self.id, "name": self.name, "status": "pass" if self.passed else "fail",
               "detail": FM._jsonable(self.detail)}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


# overrides: {"wag_weight": WeightSeq} replaces wag_weight(thick_powers2, N)
Overrides = dict[str, Any]


def _scaled(cfg: RunConfig, floor: int) -> int:
    return max(cfg.horizon, floor)


def _wag(cfg: RunConfig, ov: Overrides, N: int) -> WeightSeq:
    if ov.get("wag_weight") is not None:
        return ov["wag_weight"]
    return C.wag_weight(S.catalog("thick_powers2"), N)[0]


# --------------------------------------------------------------------------
# claims


def claim_example1(cfg: RunConfig, ov: Overrides):
    depth = 8
    w, lay = C.example1_weight(depth)
    b8 = lay.recurrences["b"][-1]
    joint = D.direct_sum_return_times([(w, 1), (w, 2)], C0, Fraction(1, 3), b8)
    single = return_time_e0_ball(w, C0, Fraction(1, 3), 2 * b8)
    top = int(product_table(w, 0, w.hi).E.max())
    ok = not joint.positive and bool(single.positive) and top == depth
    return ok, {"joint_positive": joint.positive[:5], "range": [1, b8],
                "single_size": len(single.positive), "max_product_exponent": top}


def claim_example2(cfg: RunConfig, ov: Overrides):
    depth = 8
    w, lay = C.example2_weight(depth)
    s8, a = lay.recurrences["s"][8], lay.recurrences["a"]
    joint = D.direct_sum_return_times([(w, 1), (w, 3)], C0, Fraction(1, 3), s8 // 3)
    E = product_table(w, 0, w.hi).E
    growth = {n: (int(E[a[n - 1]]), int(E[2 * a[n - 1]])) for n in range(2, 8)}
    ok = not joint.positive and all(g == (n, n) for n, g in growth.items())
    return ok, {"joint_1_3_positive": joint.positive[:5], "range": [1, s8 // 3], "growth": growth}


def wag_guarantees(w: WeightSeq, pre: C.Preprocessed, N: int) -> dict[str, Any]:
    """Exhaustive check of the three guarantees; first violation per guarantee."""
    E = product_table(w, 0, N).E
    ind = np.frombuffer(bytes(pre.indicator()), dtype=np.uint8).astype(bool)
    out: dict[str, Any] = {}
    bad_a = np.flatnonzero(~ind & (E != 0))
    out["a"] = {"ok": not len(bad_a), "violation": int(bad_a[0]) if len(bad_a) else None}
    # left[m]: run length ending at m; right[m]: run length starting at m
    left = np.zeros(N + 1, dtype=np.int64)
    right = np.zeros(N + 2, dtype=np.int64)
    for m in range(N + 1):
        left[m] = left[m - 1] + 1 if ind[m] and m else int(ind[m])
    for m in range(N, -1, -1):
        right[m] = right[m + 1] + 1 if ind[m] else 0
    # {m - r, ..., m + r + 1} ⊆ F' for every r <= rmax
    rmax = np.minimum(left - 1, right[: N + 1] - 2)
    has = rmax >= 0
    bad_b = np.flatnonzero(has & (E < rmax))
    out["b"] = {"ok": not len(bad_b), "instances": int(has.sum()),
                "violation": int(bad_b[0]) if len(bad_b) else None}
    rt = return_time_e0_ball(w, C0, Fraction(1, 3), N).positive
    outside = [m for m in rt if not ind[m]]
    out["c"] = {"ok": not outside, "return_times": len(rt), "violation": outside[:1] or None}
    return out


def claim_wag_guarantees(cfg: RunConfig, ov: Overrides):
    N = _scaled(cfg, 100)
    F = S.catalog("thick_powers2")
    pre = C.wag_preprocess(F, N, 2)
    g = wag_guarantees(_wag(cfg, ov, N), pre, N)
    return all(v["ok"] for v in g.values()), {"N": N, **g}


def claim_bes_inclusion(cfg: RunConfig, ov: Overrides):
    N = _scaled(cfg, 4200)
    F = S.catalog("thick_powers2")
    w = _wag(cfg, ov, N)
    res = {f"M={M},j={j}": D.check_wag_inclusion(w, F, M, j, N) for M, j in ((4, 3), (10, 1), (100, 5))}
    return all(v.witnessed for v in res.values()), {
        "N": N, **{k: {"status": v.status.value, **v.witness} for k, v in res.items()}}


def claim_adjoint(cfg: RunConfig, ov: Overrides):
    N = _scaled(cfg, 1000)
    F = S.catalog("thick_powers2")
    w, v, _ = C.adjoint_pair_weight(F, N)
    mirror = all(w.exponent(n) + w.exponent(-n) == 0 for n in range(1, N + 1))
    v1, v2 = D.check_adjoint_inclusions(w, v, F, 4, 2, N)
    ok = mirror and v1.witnessed and v2.witnessed
    return ok, {"N": N, "mirror": mirror,
                "E1": {"status": v1.status.value, "q": v1.params["q"], **v1.witness},
                "E2": {"status": v2.status.value, "q": v2.params["q"], **v2.witness}}


def claim_density(cfg: RunConfig, ov: Overrides):
    out, ok = {}, True
    for n in range(1, 6):
        N = 100 * n * 3**n
        d = FM.density_stats(S.catalog("grid", n), N).density
        target = Fraction(1, 3**n)
        good = abs(d - target) <= target / 10
        ok &= good
        out[f"grid({n})"] = {"N": N, "density": d, "ok": good}
    up = FM.density_stats(S.catalog("grid_union"), 10**5).upper
    ok &= up <= Fraction(7, 10)
    out["grid_union_upper"] = {"value": up, "ok": up <= Fraction(7, 10)}
    st = FM.density_stats(S.catalog("complement_powers2"), 10**5, [100], window_from=10**4)
    mn = st.banach[100][0]
    ok &= mn >= Fraction(99, 100)
    out["complement_powers2_banach_min"] = {"value": mn, "ok": mn >= Fraction(99, 100)}
    return ok, out


def claim_weak_disjointness(cfg: RunConfig, ov: Overrides):
    N = _scaled(cfg, 100)
    F1 = S.catalog("thick_powers2")
    F2 = S.complement_of(F1)
    w, _ = C.wag_weight_unilateral(F1, N)
    v, _ = C.wag_weight_unilateral(F2, N)
    r = D.salas_unilateral_check(w, v, N, cfg.ladder)
    return r.witness["sup"] == 1, {"N": N, "sup": r.witness["sup"], "status": r.status.value}


def random_dyadic_weight(rng: random.Random, side: str, span: int) -> WeightSeq:
    lo = 0 if side == "uni" else -span
    return WeightSeq.from_exponents([rng.randint(-2, 2) for _ in range(lo, span + 1)], lo, side)


def claim_oracle(cfg: RunConfig, ov: Overrides):
    rng = random.Random(cfg.seed)
    checked = skipped = 0
    bad = []
    for trial in range(200):
        side = "uni" if trial % 2 == 0 else "bi"
        w = random_dyadic_weight(rng, side, 45)
        idx = list(range(4)) if side == "uni" else list(range(-3, 4))
        for rho in (Fraction(1, 3), Fraction(1, 4)):
            a = {k: Fraction(rng.randint(-4, 4), 4) for k in rng.sample(idx, 2)}
            b = {k: Fraction(rng.randint(-4, 4), 4) for k in rng.sample(idx, 2)}
            cases = [
                ("e0", set(return_time_e0_ball(w, C0, rho, 20).members), {0: 1}, {0: 1}),
                ("general", set(return_time_c0_general(w, a, b, rho, 20).members), a, b),
            ]
            for kind, exact, aa, bb in cases:
                for m, sim in grid_return_times(w, aa, bb, float(rho), 20).items():
                    if sim is None:
                        skipped += 1
                        continue
                    checked += 1
                    if sim != (m in exact):
                        bad.append({"trial": trial, "kind": kind, "m": m, "rho": rho})
    return not bad, {"checked": checked, "guard_skipped": skipped, "disagreements": bad[:5]}


def claim_conjugacy(cfg: RunConfig, ov: Overrides):
    rng = random.Random(cfg.seed + 1)
    bad = 0
    for k in range(20):
        side = "uni" if k % 2 == 0 else "bi"
        w = random_dyadic_weight(rng, side, 40)
        lo = 0 if side == "uni" else -20
        for _ in range(100):
            supp = rng.sample(range(lo, 21), rng.randint(1, 16))
            x = {i: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for i in supp}
            lhs = conjugate_map(w, apply_weighted_shift(w, x))
            rhs = apply_shift(conjugate_map(w, x), side)
            bad += lhs != rhs
    return bad == 0, {"weights": 20, "vectors_per_weight": 100, "mismatches": bad}


def claim_properties(cfg: RunConfig, ov: Overrides):
    failures = property_suite(cfg.seed, trials=60)
    return not failures, {"failures": failures[:5], "count": len(failures)}


def claim_ip(cfg: RunConfig, ov: Overrides):
    fs = S.catalog("fs_tens")
    ip = FM.ip_witness_search(fs, 4, 20_000)
    dual = FM.dual_refutation(S.catalog("complement_fs_tens"), fs, 10_000)
    return ip.witnessed and dual.refuted, {"ip": ip.witness, "dual": dual.status.value,
                                             "dual_witness": dual.witness}


CLAIMS: list[tuple[int, str, Callable]] = [
    (1, "example1: joint (1,2) return set empty, single set reaches 2^8", claim_example1),
    (2, "example2: joint (1,3) empty, joint (1,2) growth 2^n", claim_example2),
    (3, "wag weight guarantees (a) (b) (c) on thick_powers2", claim_wag_guarantees),
    (4, "E-set inclusion in A and A-bar for (4,3) (10,1) (100,5)", claim_bes_inclusion),
    (5, "adjoint pair: mirror identity and both E-set inclusions", claim_adjoint),
    (6, "density claims for grid sets and complement_powers2", claim_density),
    (7, "disjoint unilateral wag weights: sup min product = 1", claim_weak_disjointness),
    (8, "exact return times agree with float grid simulation", claim_oracle),
    (9, "conjugacy phi B_w = B phi", claim_conjugacy),
    (10, "intset and family property suite", claim_properties),
    (11, "IP witness for fs_tens and dual refutation", claim_ip),
]


def _run_one(args) -> ClaimResult:
    cid, cfg, ov = args
    _, name, fn = next(c for c in CLAIMS if c[0] == cid)
    t0 = time.perf_counter()
    try:
        ok, detail = fn(cfg, ov)
    except Exception as exc:  # a crashing claim is a failing claim
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return ClaimResult(cid, name, bool(ok), detail, time.perf_counter() - t0)


def run_claims(cfg: RunConfig | None = None, ids: list[int] | None = None,
               overrides: Overrides | None = None) -> list[ClaimResult]:
    cfg = cfg or RunConfig()
    ids = sorted(ids or [c[0] for c in CLAIMS])
    jobs = [(i, cfg, overrides or {}) for i in ids]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    return sorted(results, key=lambda r: r.id)


# --------------------------------------------------------------------------
# randomized property suite for the set and family layers


def _random_rule(rng: random.Random, depth: int = 0) -> S.IntSet:
    kind = rng.choice(["explicit", "grid", "intervals", "catalog"] + (["shift", "complement", "union"] if depth < 2 else []))
    if kind == "explicit":
        return S.explicit(rng.sample(range(0, 200), rng.randint(0, 25)))
    if kind == "grid":
        mod = rng.randint(1, 12)
        return S.IntSet(S.ArithmeticGrid(mod, tuple(rng.sample(range(mod), rng.randint(1, mod))), rng.randint(0, 20)))
    if kind == "intervals":
        return S.catalog(rng.choice(["thick_powers2", "powers2"]))
    if kind == "catalog":
        return S.catalog(rng.choice(["evens", "naturals", "fs_tens", "complement_powers2", "grid_union"]))
    if kind == "shift":
        return S.shift_set(_random_rule(rng, depth + 1), rng.randint(-10, 10))
    if kind == "complement":
        return S.IntSet(S.Complement(_random_rule(rng, depth + 1)))
    return S.IntSet(S.Union((_random_rule(rng, depth + 1), _random_rule(rng, depth + 1))))


def property_suite(seed: int = 0, trials: int = 60) -> list[str]:
    """Check the set and family invariants on random rules; returns failure messages."""
    rng = random.Random(seed)
    fails: list[str] = []

    def expect(cond: bool, msg: str) -> None:
        if not cond:
            fails.append(msg)

    for t in range(trials):
        s = _random_rule(rng)
        N = rng.randint(0, 300)
        N2 = N + rng.randint(1, 200)
        a, b = s.materialize(N), s.materialize(N2)
        tag = f"trial {t} {s!r}"
        expect(all(x < y for x, y in zip(b, b[1:])) and all(0 <= x <= N2 for x in b), f"{tag}: not sorted in range")
        expect(a == [x for x in b if x <= N], f"{tag}: not monotone")
        cc = S.IntSet(S.Complement(S.IntSet(S.Complement(s))))
        expect(cc.materialize(N) == a, f"{tag}: double complement")
        i = rng.randint(0, 20)
        expect(S.shift_set(s, i).materialize(N) == [m + i for m in s.materialize(max(N - i, -1)) if m + i <= N]
               if N - i >= 0 else S.shift_set(s, i).materialize(N) == [], f"{tag}: shift")
        dec = S.interval_decompose(s, N)
        expect(dec.elements() == a, f"{tag}: interval round trip")
        expect(all(p[1] + 1 < q[0] for p, q in zip(dec.intervals, dec.intervals[1:])), f"{tag}: intervals not maximal")
        small = a[: rng.randint(0, 12)]
        shuffled = small[:]
        rng.shuffle(shuffled)
        d1 = S.difference_set(S.explicit(small), N).materialize(N)
        d2 = S.difference_set(S.explicit(shuffled), N).materialize(N)
        expect(d1 == d2 and 0 not in d1, f"{tag}: difference set")
        if not a:
            continue
        # family layer
        k = rng.randint(1, 8)
        v = FM.thick_witness(s, k, N)
        if v.witnessed:
            st = v.witness["start"]
            expect(all(m in set(a) for m in range(st, st + k)), f"{tag}: thick witness")
            for k2 in range(1, k):
                expect(FM.thick_witness(s, k2, N).witnessed, f"{tag}: thick monotone")
        bnd = rng.randint(1, 30)
        if FM.syndetic_bound_check(s, bnd, N).refuted:
            for b2 in range(1, bnd):
                expect(FM.syndetic_bound_check(s, b2, N).refuted, f"{tag}: syndetic monotone")
        if N >= 1:
            st = FM.density_stats(s, N, [N])
            cnt = Fraction(sum(1 for m in a if m <= N - 1), N)
            expect(st.upper >= cnt, f"{tag}: upper below count/N")
            expect(st.banach[N][1] == cnt and st.banach[N][0] == cnt, f"{tag}: banach at L=N")
            expect(0 <= st.lower <= st.upper <= 1, f"{tag}: density order")
        dep = rng.randint(1, 3)
        ipv = FM.ip_witness_search(s, dep, N, node_budget=5000)
        if ipv.witnessed:
            gens = ipv.witness["generators"]
            aset = set(a)
            for mask in range(1, 2 ** len(gens)):
                expect(sum(g for j, g in enumerate(gens) if mask >> j & 1) in aset, f"{tag}: ip sum")
    return fails
