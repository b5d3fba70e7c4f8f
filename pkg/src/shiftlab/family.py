"""Finite-horizon membership checks for Furstenberg families.

Asymptotic properties (thickness, bounded gaps, density limits) can never
be settled below a finite horizon.  Every check therefore returns a
three-valued :class:`Verdict`: ``WITNESSED`` with a concrete, re-checkable
witness, ``REFUTED`` with a counterexample, or ``UNKNOWN``.  A syndetic
bound that merely holds throughout the window is reported as WITNESSED with
``horizon_consistent=True`` in the witness; it is evidence, not proof.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .intset import IntSet, explicit, runs

__all__ = [
    "Status",
    "Verdict",
    "DensityStats",
    "NoElementsError",
    "max_gap",
    "thick_witness",
    "syndetic_bound_check",
    "thickly_syndetic_check",
    "piecewise_syndetic_check",
    "density_stats",
    "ip_witness_search",
    "dual_refutation",
    "tilde_membership_check",
    "tilde_core",
    "Predicate",
    "parse_predicate",
    "PREDICATES",
]


class Status(str, enum.Enum):
    WITNESSED = "Witnessed"
    REFUTED = "Refuted"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    query: str
    status: Status
    horizon: int
    params: dict[str, Any] = field(default_factory=dict)
    witness: dict[str, Any] = field(default_factory=dict)

    @property
    def witnessed(self) -> bool:
        return self.status is Status.WITNESSED

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    def to_dict(self) -> dict[str, Any]:
        return {
            "query": self.query,
            "params": _jsonable(self.params),
            "horizon": self.horizon,
            "status": self.status.value,
            "witness": _jsonable(self.witness),
        }


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    return obj


class NoElementsError(ValueError):
    pass


def _set_params(s: IntSet, **extra) -> dict[str, Any]:
    return {"set": s.name, **extra}


# --------------------------------------------------------------------------
# gaps and runs


def _max_gap_of(elems: Sequence[int]) -> tuple[int, tuple[int, int]]:
    # leading gap counts from 0
    best, where = elems[0], (0, elems[0])
    for a, b in zip(elems, elems[1:]):
        if b - a > best:
            best, where = b - a, (a, b)
    return best, where


def max_gap(s: IntSet, N: int) -> tuple[int, tuple[int, int]]:
    """Largest gap between consecutive elements in [0, N] (leading gap from 0)."""
    elems = s.materialize(N)
    if not elems:
        raise NoElementsError("no elements below horizon")
    return _max_gap_of(elems)


def _first_run(elems: Sequence[int], k: int) -> int | None:
    for a, b in runs(elems):
        if b - a + 1 >= k:
            return a
    return None


def thick_witness(s: IntSet, k: int, N: int) -> Verdict:
    """Look for k consecutive integers of ``s`` inside [0, N]."""
    if k < 1:
        raise ValueError("k must be >= 1")
    start = _first_run(s.materialize(N), k)
    params = _set_params(s, k=k)
    if start is None:
        return Verdict("thick", Status.UNKNOWN, N, params)
    return Verdict("thick", Status.WITNESSED, N, params, {"start": start, "run": [start, start + k - 1]})


def _syndetic_from_elements(
    elems: Sequence[int], b: int, N: int, query: str, params: dict
) -> Verdict:
    if not elems:
        if N >= b:
            return Verdict(query, Status.REFUTED, N, params, {"gap": [0, None], "empty_through": N})
        return Verdict(query, Status.UNKNOWN, N, params, {"empty_through": N})
    gap, where = _max_gap_of(elems)
    if gap > b:
        return Verdict(query, Status.REFUTED, N, params, {"gap": list(where), "length": gap})
    if N - elems[-1] >= b:
        # the next element lies beyond N, so this gap exceeds b
        return Verdict(
            query, Status.REFUTED, N, params, {"gap": [elems[-1], None], "empty_after": elems[-1]}
        )
    return Verdict(
        query, Status.WITNESSED, N, params, {"max_gap": gap, "at": list(where), "horizon_consistent": True}
    )


def syndetic_bound_check(s: IntSet, b: int, N: int) -> Verdict:
    """Refute gaps > b inside [0, N]; otherwise horizon-consistent."""
    if b < 1:
        raise ValueError("b must be >= 1")
    return _syndetic_from_elements(s.materialize(N), b, N, "syndetic", _set_params(s, b=b))


def _run_starts(ind: bytearray, k: int, lo: int, hi: int) -> list[int]:
    """{n in [lo, hi] : ind[n..n+k] all set}; ind must cover hi + k."""
    out, streak = [], 0
    for i in range(lo, hi + k + 1):
        streak = streak + 1 if ind[i] else 0
        if streak >= k + 1:
            out.append(i - k)
    return out


def thickly_syndetic_check(s: IntSet, k: int, b: int, N: int) -> Verdict:
    """Syndetic bound b applied to A_k = {n : [n, n+k] ⊂ s} on [0, N-k]."""
    params = _set_params(s, k=k, b=b)
    if N - k < 0:
        return Verdict("thickly_syndetic", Status.UNKNOWN, N, params)
    ind = s.indicator(N)
    core = _run_starts(ind, k, 0, N - k)
    v = _syndetic_from_elements(core, b, N - k, "thickly_syndetic", params)
    return Verdict(v.query, v.status, N, params, {**v.witness, "core_horizon": N - k, "core_size": len(core)})


def piecewise_syndetic_check(s: IntSet, k: int, b: int, N: int) -> Verdict:
    """Piecewise syndeticity through the b-thickening.

    A set is piecewise syndetic iff for some b its b-thickening
    {n : dist(n, s) <= b} is thick.  We look for k consecutive integers of
    the thickening in [0, N]; failure is UNKNOWN.
    """
    params = _set_params(s, k=k, b=b)
    elems = s.materialize(N + b)
    thick = bytearray(N + 1)
    for m in elems:
        for i in range(max(0, m - b), min(N, m + b) + 1):
            thick[i] = 1
    start = _first_run([i for i in range(N + 1) if thick[i]], k)
    if start is None:
        return Verdict("piecewise_syndetic", Status.UNKNOWN, N, params)
    return Verdict(
        "piecewise_syndetic", Status.WITNESSED, N, params, {"start": start, "run": [start, start + k - 1]}
    )


# --------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class DensityStats:
    """Exact counting statistics of a set below a horizon N.

    ``count`` is |{j in A : j <= N-1}| and ``density`` = count / N.
    ``upper`` / ``lower`` are the max / min of count(n)/n over the tail
    n in [ceil(N/2), N].  ``banach`` maps a window length L to the
    (min, max) of |A ∩ [m, m+L-1]| / L over windows inside
    [window_from, N-1].
    """

    horizon: int
    count: int
    density: Fraction
    upper: Fraction
    lower: Fraction
    banach: dict[int, tuple[Fraction, Fraction]]
    window_from: int = 0

    def to_dict(self) -> dict[str, Any]:
        return _jsonable(
            {
                "horizon": self.horizon,
                "count": self.count,
                "density": self.density,
                "upper": self.upper,
                "lower": self.lower,
                "window_from": self.window_from,
                "banach": {str(L): list(v) for L, v in self.banach.items()},
            }
        )


def density_stats(
    s: IntSet, N: int, window_lengths: Sequence[int] = (), window_from: int = 0
) -> DensityStats:
    if N < 1:
        raise ValueError("N must be >= 1")
    ind = s.indicator(N - 1)
    prefix = [0] * (N + 1)
    for j in range(N):
        prefix[j + 1] = prefix[j] + ind[j]
    tail = range((N + 1) // 2 or 1, N + 1)
    ratios = [Fraction(prefix[n], n) for n in tail]
    banach = {}
    for L in window_lengths:
        if not 1 <= L <= N - window_from:
            raise ValueError(f"window length {L} does not fit in [{window_from}, {N - 1}]")
        counts = [prefix[m + L] - prefix[m] for m in range(window_from, N - L + 1)]
        banach[L] = (Fraction(min(counts), L), Fraction(max(counts), L))
    return DensityStats(
        N, prefix[N], Fraction(prefix[N], N), max(ratios), min(ratios), banach, window_from
    )


# --------------------------------------------------------------------------
# IP sets and duals


def ip_witness_search(s: IntSet, depth: int, N: int, node_budget: int = 200_000) -> Verdict:
    """Depth-first search for x_1 < ... < x_depth with all finite sums in s ∩ [0, N]."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    elems = [m for m in s.materialize(N) if m > 0]
    member = set(elems)
    params = _set_params(s, depth=depth)
    nodes = 0

    def extend(chosen: list[int], sums: list[int]) -> list[int] | None:
        nonlocal nodes
        if len(chosen) == depth:
            return chosen
        top = max(sums, default=0)
        lo = chosen[-1] if chosen else 0
        for x in elems:
            if x <= lo:
                continue
            if x + top > N:
                break
            nodes += 1
            if nodes > node_budget:
                return None
            new = [x + t for t in sums]
            if all(t in member for t in new):
                found = extend(chosen + [x], sums + [x] + new)
                if found:
                    return found
        return None

    gens = extend([], [])
    if gens is None:
        return Verdict("ip", Status.UNKNOWN, N, params, {"nodes": nodes})
    return Verdict("ip", Status.WITNESSED, N, params, {"generators": gens})


def dual_refutation(s: IntSet, member: IntSet, N: int) -> Verdict:
    """Refute s ∈ F* by a member of F that s provably misses.

    A hard REFUTED needs both horizon disjointness and a symbolic
    disjointness fact carried by one of the two sets.
    """
    params = {"set": s.name, "member": member.name}
    inter = sorted(set(s.materialize(N)) & set(member.materialize(N)))
    if inter:
        return Verdict("dual", Status.UNKNOWN, N, params, {"common": inter[0]})
    symbolic = (member.name is not None and member.name in s.disjoint_from()) or (
        s.name is not None and s.name in member.disjoint_from()
    )
    if symbolic:
        return Verdict("dual", Status.REFUTED, N, params, {"disjoint": "symbolic"})
    return Verdict("dual", Status.UNKNOWN, N, params, {"disjoint": "horizon-only"})


def tilde_core(s: IntSet, k: int, N: int) -> IntSet:
    """{n in [0, N] : [n-k, n+k] ⊂ s} as a materialized set."""
    ind = s.indicator(N + k)
    return explicit([n + k for n in _run_starts(ind, 2 * k, 0, N - k)] if N >= k else [])


def tilde_membership_check(
    s: IntSet, k_max: int, inner: Callable[[IntSet, int], Verdict], N: int
) -> Verdict:
    """Apply ``inner`` to every core {n : [n-k, n+k] ⊂ s}, k = 0..k_max."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    per_k = {}
    statuses = []
    for k in range(k_max + 1):
        v = inner(tilde_core(s, k, N), N)
        per_k[k] = {"status": v.status.value, "witness": v.witness}
        statuses.append(v.status)
    if Status.REFUTED in statuses:
        status = Status.REFUTED
    elif all(st is Status.WITNESSED for st in statuses):
        status = Status.WITNESSED
    else:
        status = Status.UNKNOWN
    name = getattr(inner, "name", getattr(inner, "__name__", "inner"))
    return Verdict("tilde", status, N, _set_params(s, k_max=k_max, inner=name), {"per_k": per_k})


# --------------------------------------------------------------------------
# predicates by name (used by the dynamics checks and the CLI)


def _nonempty(s: IntSet, N: int) -> Verdict:
    # horizon semantics: REFUTED means "no element in [0, N]"
    elems = s.materialize(N)
    if elems:
        return Verdict("nonempty", Status.WITNESSED, N, _set_params(s), {"element": elems[0]})
    return Verdict("nonempty", Status.REFUTED, N, _set_params(s), {"empty_through": N})


def _cofinite(s: IntSet, N: int, tail: Fraction = Fraction(1, 2)) -> Verdict:
    """WITNESSED when s ⊃ [c, N] for some c <= tail * N."""
    elems = s.materialize(N)
    params = _set_params(s, tail=tail)
    if not elems or elems[-1] != N:
        return Verdict("cofinite", Status.UNKNOWN, N, params)
    c = runs(elems)[-1][0]
    if c <= tail * N:
        return Verdict("cofinite", Status.WITNESSED, N, params, {"from": c, "horizon_consistent": True})
    return Verdict("cofinite", Status.UNKNOWN, N, params, {"from": c})


def _density_at_least(query: str, field_name: str):
    def check(s: IntSet, N: int, threshold: Fraction, L: int = 0) -> Verdict:
        stats = density_stats(s, N, [L] if L else [])
        value = stats.banach[L][0] if L else getattr(stats, field_name)
        params = _set_params(s, threshold=threshold, **({"L": L} if L else {}))
        if value >= threshold:
            return Verdict(query, Status.WITNESSED, N, params, {"value": value, "horizon_consistent": True})
        return Verdict(query, Status.UNKNOWN, N, params, {"value": value})

    return check


@dataclass(frozen=True)
class Predicate:
    """A named family check ``(IntSet, N) -> Verdict`` with bound parameters."""

    name: str
    func: Callable[..., Verdict]
    params: tuple[tuple[str, Any], ...] = ()

    def __call__(self, s: IntSet, N: int) -> Verdict:
        return self.func(s, N, **dict(self.params))

    def __str__(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in self.params)


def _reorder(f, *names):
    def call(s, N, **kw):
        return f(s, *(kw[n] for n in names), N)

    return call


PREDICATES: dict[str, tuple[Callable[..., Verdict], dict[str, type]]] = {
    "thick": (_reorder(thick_witness, "k"), {"k": int}),
    "syndetic": (_reorder(syndetic_bound_check, "b"), {"b": int}),
    "ts": (_reorder(thickly_syndetic_check, "k", "b"), {"k": int, "b": int}),
    "ps": (_reorder(piecewise_syndetic_check, "k", "b"), {"k": int, "b": int}),
    "ip": (_reorder(ip_witness_search, "depth"), {"depth": int}),
    "nonempty": (_nonempty, {}),
    "cofinite": (_cofinite, {"tail": Fraction}),
    # density-family consistency checks; never REFUTED
    "pud": (_density_at_least("pud", "upper"), {"threshold": Fraction}),
    "ud1": (_density_at_least("ud1", "upper"), {"threshold": Fraction}),
    "ld1": (_density_at_least("ld1", "lower"), {"threshold": Fraction}),
    "lbd1": (_density_at_least("lbd1", "lower"), {"threshold": Fraction, "L": int}),
}


def parse_predicate(text: str) -> Predicate:
    """Parse ``"thick:k=5"`` or ``"ts:k=3,b=50"`` into a :class:`Predicate`."""
    name, _, rest = text.partition(":")
    name = name.strip()
    if name not in PREDICATES:
        raise ValueError(f"unknown predicate {name!r}; known: {', '.join(sorted(PREDICATES))}")
    func, types = PREDICATES[name]
    params = []
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, _, value = item.partition("=")
        if key not in types:
            raise ValueError(f"predicate {name!r} has no parameter {key!r}")
        params.append((key, types[key](value)))
    missing = set(types) - {k for k, _ in params} - {"tail", "L"}
    if missing:
        raise ValueError(f"predicate {name!r} needs {', '.join(sorted(missing))}")
    return Predicate(name, func, tuple(params))
