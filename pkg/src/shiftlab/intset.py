"""Horizon-bounded subsets of the non-negative integers.

An :class:`IntSet` is a symbolic generator rule plus optional known facts.
Nothing is ever enumerated without a horizon: ``s.materialize(N)`` returns
the exact sorted elements of ``s`` lying in ``[0, N]``.

>>> thick = catalog("thick_powers2")
>>> thick.materialize(12)
[2, 3, 4, 5, 6, 8, 9, 10, 11]
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

__all__ = [
    "MaterializationError",
    "IntSet",
    "IntervalDecomposition",
    "ExplicitFinite",
    "IntervalUnion",
    "ArithmeticGrid",
    "FiniteSums",
    "SequenceUnion",
    "Shift",
    "Complement",
    "Union",
    "Intersection",
    "DifferenceSet",
    "explicit",
    "naturals",
    "evens",
    "shift_set",
    "difference_set",
    "interval_decompose",
    "runs",
    "catalog",
    "catalog_names",
    "complement_of",
    "salas_sequence",
    "export_json",
]

DEFAULT_FS_DEPTH = 20


class MaterializationError(ValueError):
    """A generator rule cannot be enumerated exactly below the horizon."""


# --------------------------------------------------------------------------
# generator rules


@dataclass(frozen=True)
class ExplicitFinite:
    values: tuple[int, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.values):
            raise ValueError("ExplicitFinite elements must be non-negative")
        object.__setattr__(self, "values", tuple(sorted(set(self.values))))

    def elements(self, horizon: int) -> list[int]:
        return list(self.values[: bisect.bisect_right(self.values, horizon)])


@dataclass(frozen=True)
class IntervalUnion:
    """Union over n >= start of the integer intervals [lo(n), hi(n)].

    ``lo`` must be strictly increasing in n; enumeration stops at the
    first n with lo(n) > horizon.
    """

    lo: Callable[[int], int]
    hi: Callable[[int], int]
    start: int = 1

    def elements(self, horizon: int) -> list[int]:
        out: set[int] = set()
        n = self.start
        prev = None
        while True:
            a = self.lo(n)
            if prev is not None and a <= prev:
                raise MaterializationError(
                    f"IntervalUnion lower end not strictly increasing at n={n} ({prev} -> {a})"
                )
            if a > horizon:
                break
            b = min(self.hi(n), horizon)
            out.update(range(max(a, 0), b + 1))
            prev = a
            n += 1
        return sorted(out)


@dataclass(frozen=True)
class ArithmeticGrid:
    """{m >= start : m mod modulus in residues}."""

    modulus: int
    residues: tuple[int, ...]
    start: int = 0

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(
            self, "residues", tuple(sorted({r % self.modulus for r in self.residues}))
        )

    def elements(self, horizon: int) -> list[int]:
        first = max(self.start, 0)
        base = first - first % self.modulus
        out = []
        for block in range(base, horizon + 1, self.modulus):
            for r in self.residues:
                m = block + r
                if first <= m <= horizon:
                    out.append(m)
        return out


@dataclass(frozen=True)
class FiniteSums:
    """FS((x_n)): all sums over non-empty finite index sets.

    The generator rule ``x(n)`` (n >= start) must be positive and strictly
    increasing. At most ``depth`` generators are used; if a generator with
    index beyond the cap still lies below the horizon the result would be
    truncated, so materialization refuses.
    """

    x: Callable[[int], int]
    start: int = 1
    depth: int = DEFAULT_FS_DEPTH

    def generators(self, horizon: int) -> list[int]:
        gens: list[int] = []
        n = self.start
        while True:
            g = self.x(n)
            if g <= 0 or (gens and g <= gens[-1]):
                raise MaterializationError(
                    f"FiniteSums generators must be positive and increasing (n={n}, x={g})"
                )
            if g > horizon:
                return gens
            if len(gens) == self.depth:
                raise MaterializationError(
                    f"FiniteSums needs more than depth={self.depth} generators below {horizon}"
                )
            gens.append(g)
            n += 1

    def elements(self, horizon: int) -> list[int]:
        sums: set[int] = set()
        for g in self.generators(horizon):
            sums |= {s + g for s in sums if s + g <= horizon}
            sums.add(g)
        return sorted(sums)


@dataclass(frozen=True)
class SequenceUnion:
    """Union of member(n) over n >= start.

    ``least(n)`` is a lower bound on the elements of member(n) and must be
    strictly increasing, so only finitely many members meet any horizon.
    """

    member: Callable[[int], "IntSet"]
    least: Callable[[int], int]
    start: int = 1

    def elements(self, horizon: int) -> list[int]:
        out: set[int] = set()
        n = self.start
        prev = None
        while True:
            lb = self.least(n)
            if prev is not None and lb <= prev:
                raise MaterializationError(f"SequenceUnion bound not increasing at n={n}")
            if lb > horizon:
                break
            out.update(self.member(n).materialize(horizon))
            prev = lb
            n += 1
        return sorted(out)


@dataclass(frozen=True)
class Shift:
    """(base + offset) intersected with the non-negative integers."""

    base: "IntSet"
    offset: int

    def elements(self, horizon: int) -> list[int]:
        inner = horizon - self.offset
        if inner < 0:
            return []
        return [m + self.offset for m in self.base.materialize(inner) if m + self.offset >= 0]


@dataclass(frozen=True)
class Complement:
    base: "IntSet"

    def elements(self, horizon: int) -> list[int]:
        present = set(self.base.materialize(horizon))
        return [m for m in range(horizon + 1) if m not in present]


@dataclass(frozen=True)
class Union:
    parts: tuple["IntSet", ...]

    def elements(self, horizon: int) -> list[int]:
        out: set[int] = set()
        for p in self.parts:
            out.update(p.materialize(horizon))
        return sorted(out)


@dataclass(frozen=True)
class Intersection:
    parts: tuple["IntSet", ...]

    def elements(self, horizon: int) -> list[int]:
        if not self.parts:
            return list(range(horizon + 1))
        common = set(self.parts[0].materialize(horizon))
        for p in self.parts[1:]:
            common &= set(p.materialize(horizon))
        return sorted(common)


@dataclass(frozen=True)
class DifferenceSet:
    """(F - F) ∩ [1, horizon] using only pairs m < n inside [0, horizon].

    This is a lower approximation of the true difference set: a difference
    realized only by elements beyond the horizon is missed.
    """

    base: "IntSet"

    def elements(self, horizon: int) -> list[int]:
        elems = self.base.materialize(horizon)
        mask = 0
        for m in elems:
            mask |= 1 << m
        diffs = 0
        for m in elems:
            diffs |= mask >> m
        diffs &= ~1
        return [d for d in range(1, horizon + 1) if diffs >> d & 1]


Rule = (
    ExplicitFinite
    | IntervalUnion
    | ArithmeticGrid
    | FiniteSums
    | SequenceUnion
    | Shift
    | Complement
    | Union
    | Intersection
    | DifferenceSet
)


# --------------------------------------------------------------------------
# the set type


@dataclass(frozen=True, eq=False)
class IntSet:
    rule: Rule
    name: str | None = None
    facts: frozenset[str] = field(default_factory=frozenset)

    def materialize(self, horizon: int) -> list[int]:
        if horizon < 0:
            raise ValueError("horizon must be >= 0")
        return self.rule.elements(horizon)

    def indicator(self, horizon: int) -> bytearray:
        """0/1 membership array over [0, horizon]."""
        ind = bytearray(horizon + 1)
        for m in self.materialize(horizon):
            ind[m] = 1
        return ind

    def has_fact(self, fact: str) -> bool:
        return fact in self.facts

    def disjoint_from(self) -> set[str]:
        return {f.split(":", 1)[1] for f in self.facts if f.startswith("disjoint-from:")}

    def named(self, name: str) -> "IntSet":
        return IntSet(self.rule, name, self.facts)

    def __repr__(self) -> str:
        return f"IntSet({self.name or type(self.rule).__name__})"


def explicit(values: Iterable[int], name: str | None = None) -> IntSet:
    return IntSet(ExplicitFinite(tuple(values)), name)


def naturals() -> IntSet:
    return IntSet(ArithmeticGrid(1, (0,)), "naturals", frozenset({"infinite", "cofinite"}))


def evens() -> IntSet:
    return IntSet(ArithmeticGrid(2, (0,)), "evens", frozenset({"infinite"}))


def shift_set(s: IntSet, i: int) -> IntSet:
    """(s + i) ∩ ℕ₀ as a new lazy set."""
    if i == 0:
        return s
    return IntSet(Shift(s, i), f"({s.name}{i:+d})" if s.name else None)


def difference_set(s: IntSet, horizon: int) -> IntSet:
    """Materialized lower approximation of (s - s) ∩ [1, horizon]."""
    d = DifferenceSet(s)
    return IntSet(ExplicitFinite(tuple(d.elements(horizon))), f"diff({s.name})")


# --------------------------------------------------------------------------
# interval structure


def runs(elements: Sequence[int]) -> list[tuple[int, int]]:
    """Maximal runs of consecutive integers in a sorted list."""
    out: list[tuple[int, int]] = []
    for m in elements:
        if out and m == out[-1][1] + 1:
            out[-1] = (out[-1][0], m)
        else:
            out.append((m, m))
    return out


@dataclass(frozen=True)
class IntervalDecomposition:
    intervals: tuple[tuple[int, int], ...]
    horizon: int
    truncated: bool
    residue: tuple[int, ...] = ()

    def elements(self) -> list[int]:
        out = [m for a, b in self.intervals for m in range(a, b + 1)]
        return sorted(out + list(self.residue))


def interval_decompose(s: IntSet, horizon: int, cutoff: int = 1) -> IntervalDecomposition:
    """Maximal-interval decomposition of ``s ∩ [0, horizon]``.

    Runs shorter than ``cutoff`` go to ``residue`` instead. The last
    interval is flagged ``truncated`` when it touches the horizon, since
    its true right end may lie beyond.
    """
    intervals, residue = [], []
    truncated = False
    for a, b in runs(s.materialize(horizon)):
        if b == horizon:
            truncated = True
        if b - a + 1 >= cutoff:
            intervals.append((a, b))
        else:
            residue.extend(range(a, b + 1))
    return IntervalDecomposition(tuple(intervals), horizon, truncated, tuple(residue))


# --------------------------------------------------------------------------
# catalog


def salas_sequence(count: int) -> list[int]:
    """s_1 = 5, s_{n+1} = 4 (s_1 + ... + s_n + n) + 1."""
    seq: list[int] = []
    total = 0
    for n in range(1, count + 1):
        s = 5 if n == 1 else 4 * (total + n - 1) + 1
        seq.append(s)
        total += s
    return seq


def _salas_term(n: int) -> int:
    return salas_sequence(n)[-1]


def _pow2(n: int) -> int:
    return 2**n


def _pow2_plus_n(n: int) -> int:
    return 2**n + n


def _pow10(n: int) -> int:
    return 10**n


def _grid(n: int) -> IntSet:
    period = n * 3**n
    return IntSet(
        ArithmeticGrid(period, tuple(range(n)), start=period),
        f"grid({n})",
        frozenset({"infinite"}),
    )


def _grid_least(n: int) -> int:
    return n * 3**n


def complement_of(s: IntSet, name: str | None = None) -> IntSet:
    """ℕ₀ \\ s, annotated as provably disjoint from ``s``."""
    if s.name is None:
        raise ValueError("complement_of needs a named base set")
    return IntSet(
        Complement(s),
        name or f"complement({s.name})",
        frozenset({f"disjoint-from:{s.name}", f"complement-of:{s.name}"}),
    )


def _thick_powers2() -> IntSet:
    return IntSet(
        IntervalUnion(_pow2, _pow2_plus_n, start=1), "thick_powers2", frozenset({"infinite"})
    )


def _powers2() -> IntSet:
    return IntSet(IntervalUnion(_pow2, _pow2, start=1), "powers2", frozenset({"infinite"}))


def _fs_tens() -> IntSet:
    return IntSet(FiniteSums(_pow10), "fs_tens", frozenset({"infinite", "ip-set"}))


def _salas_fs() -> IntSet:
    return IntSet(FiniteSums(_salas_term), "salas_fs", frozenset({"infinite", "ip-set"}))


def _salas_points() -> IntSet:
    return IntSet(IntervalUnion(_salas_term, _salas_term), "salas_points", frozenset({"infinite"}))


def _salas_diff() -> IntSet:
    return IntSet(DifferenceSet(_salas_points()), "salas_diff", frozenset({"infinite"}))


def _catalog_table() -> dict[str, Callable[..., IntSet]]:
    return {
        "naturals": naturals,
        "evens": evens,
        "thick_powers2": _thick_powers2,
        "complement_thick_powers2": lambda: complement_of(
            _thick_powers2(), "complement_thick_powers2"
        ),
        "powers2": _powers2,
        "complement_powers2": lambda: complement_of(_powers2(), "complement_powers2"),
        "grid": _grid,
        "grid_union": lambda: IntSet(
            SequenceUnion(_grid, _grid_least), "grid_union", frozenset({"infinite"})
        ),
        "fs_tens": _fs_tens,
        "complement_fs_tens": lambda: complement_of(_fs_tens(), "complement_fs_tens"),
        "salas_points": _salas_points,
        "salas_fs": _salas_fs,
        "complement_salas_fs": lambda: complement_of(_salas_fs(), "complement_salas_fs"),
        "salas_diff": _salas_diff,
        "complement_salas_diff": lambda: complement_of(_salas_diff(), "complement_salas_diff"),
    }


def catalog_names() -> list[str]:
    return sorted(_catalog_table())


def catalog(name: str, *params: int) -> IntSet:
    """Named example sets; ``catalog("grid", 2)`` takes its parameter.

    Also accepts the call form in the name itself, e.g. ``"grid(3)"``.
    """
    if "(" in name and name.endswith(")"):
        name, arg = name[:-1].split("(", 1)
        params = tuple(int(a) for a in arg.split(",") if a.strip()) + params
    table = _catalog_table()
    if name not in table:
        raise KeyError(f"unknown catalog set {name!r}; known: {', '.join(sorted(table))}")
    s = table[name](*params)
    if f"complement_{name}" in table:
        # the catalog complement is disjoint by construction; record it on both sides
        s = IntSet(s.rule, s.name, s.facts | {f"disjoint-from:complement_{name}"})
    return s


# --------------------------------------------------------------------------
# export


def export_json(s: IntSet, horizon: int) -> str:
    return json.dumps(
        {"name": s.name, "horizon": horizon, "elements": s.materialize(horizon)},
        separators=(",", ":"),
    )

