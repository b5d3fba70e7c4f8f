"""Explicit dyadic weight constructions with their block layouts.

Every constructor returns the weight together with a :class:`BlockLayout`
recording which labelled block sits on which indices, plus the integer
recurrences used to place them.  Blocks are stored run-length encoded as
``(exponent, count)`` pairs so that layouts with ~10**6 indices stay small.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .intset import IntSet, explicit, runs
from .weights import WeightSeq, product_table

__all__ = [
    "Block",
    "BlockLayout",
    "Preprocessed",
    "ConstructionRejected",
    "example1_b",
    "example1_weight",
    "example2_sequences",
    "example2_weight",
    "wag_weight_cofinite",
    "wag_preprocess",
    "wag_weight",
    "wag_weight_unilateral",
    "adjoint_pair_weight",
    "k_chain_sequences",
    "experimental_k_chain_weight",
    "CONSTRUCTORS",
]


class ConstructionRejected(ValueError):
    """A construction failed its own validation; ``diagnostics`` says why."""

    def __init__(self, msg: str, diagnostics: dict | None = None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class Block:
    label: str
    start: int
    runs: tuple[tuple[int, int], ...]  # (exponent, count)

    @property
    def length(self) -> int:
        return sum(c for _, c in self.runs)

    @property
    def stop(self) -> int:
        """One past the last index."""
        return self.start + self.length

    def exponents(self) -> np.ndarray:
        if not self.runs:
            return np.zeros(0, dtype=np.int64)
        e, c = zip(*self.runs)
        return np.repeat(np.array(e, dtype=np.int64), c)

    def to_dict(self) -> dict:
        return {"label": self.label, "start": self.start, "runs": [list(r) for r in self.runs]}


@dataclass(frozen=True)
class BlockLayout:
    name: str
    blocks: tuple[Block, ...]
    recurrences: dict[str, tuple[int, ...]] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def lo(self) -> int:
        return self.blocks[0].start if self.blocks else 0

    @property
    def hi(self) -> int:
        return self.blocks[-1].stop - 1 if self.blocks else -1

    def exponents(self) -> np.ndarray:
        if not self.blocks:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([b.exponents() for b in self.blocks])

    def tiles(self) -> bool:
        """True when consecutive blocks abut with no gap or overlap."""
        return all(a.stop == b.start for a, b in zip(self.blocks, self.blocks[1:]))

    def block_at(self, n: int) -> Block:
        for b in self.blocks:
            if b.start <= n < b.stop:
                return b
        raise IndexError(f"index {n} outside layout [{self.lo}, {self.hi}]")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lo": self.lo,
            "hi": self.hi,
            "blocks": [b.to_dict() for b in self.blocks],
            "recurrences": {k: list(v) for k, v in self.recurrences.items()},
            "notes": list(self.notes),
        }


class _Builder:
    def __init__(self, start: int):
        self.pos = start
        self.blocks: list[Block] = []

    def add(self, label: str, *runs_: tuple[int, int]) -> None:
        r = tuple((int(e), int(c)) for e, c in runs_ if c > 0)
        if not r:  # empty gap blocks take no indices
            return
        b = Block(label, self.pos, r)
        self.blocks.append(b)
        self.pos = b.stop


def _ones(n: int) -> tuple[int, int]:
    return (0, n)


# --------------------------------------------------------------------------
# one operator whose square-sum return set collapses


def example1_b(depth: int) -> list[int]:
    """b_1 = 2, b_{n+1} = 2 b_n + n + 2."""
    b = [2]
    for n in range(1, depth):
        b.append(2 * b[-1] + n + 2)
    return b[:depth]


def example1_weight(depth: int) -> tuple[WeightSeq, BlockLayout]:
    """Unilateral weight (B_1, A_1, B_{b_1}, A_2, B_{b_2}, ...) through A_depth, B_{b_depth}.

    A_n is n twos followed by 2**-n and B_m is m ones, so the layout covers
    indices 0 .. 2 b_depth.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    b = example1_b(depth)
    L = _Builder(0)
    L.add("B1", _ones(1))
    for n in range(1, depth + 1):
        L.add(f"A{n}", (1, n), (-n, 1))
        L.add(f"B{n}", _ones(b[n - 1]))
    lay = BlockLayout("example1", tuple(L.blocks), {"b": tuple(b)})
    w = WeightSeq.from_exponents(lay.exponents(), 0, "uni", name=f"example1(depth={depth})")
    return w, lay


# --------------------------------------------------------------------------
# square-sum mixing, cube-sum collapse


def example2_sequences(depth: int) -> dict[str, list[int]]:
    """s_0 = 1, s_1 = 3, s_{n+1} = 2 (3 (s_n - 1) + n + 1) + n.

    a_n = 3 (s_{n-1} - 1) + n, b_n = s_n - 1 - a_n, c_n = 2 (s_n - 1) - 1,
    each for n = 1 .. depth (s also carries s_0).
    """
    s = [1, 3]
    for n in range(1, depth):
        s.append(2 * (3 * (s[n] - 1) + n + 1) + n)
    s = s[: depth + 1]
    a = [3 * (s[n - 1] - 1) + n for n in range(1, depth + 1)]
    b = [s[n] - 1 - a[n - 1] for n in range(1, depth + 1)]
    c = [2 * (s[n] - 1) - 1 for n in range(1, depth + 1)]
    return {"s": s, "a": a, "b": b, "c": c}


def example2_weight(depth: int) -> tuple[WeightSeq, BlockLayout]:
    """Unilateral weight (C_1, A_1, B_{b_1,1}, C_{c_1}, ..., A_n, B_{b_n,n}, C_{c_n}).

    A_n is n twos, B_{b,n} is b ones followed by 2**-n, C_c is c ones.  The
    last index is 3 (s_depth - 1).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    seq = example2_sequences(depth)
    L = _Builder(0)
    L.add("C1", _ones(1))
    for n in range(1, depth + 1):
        L.add(f"A{n}", (1, n))
        L.add(f"B{n}", _ones(seq["b"][n - 1]), (-n, 1))
        L.add(f"C{n}", _ones(seq["c"][n - 1]))
    lay = BlockLayout("example2", tuple(L.blocks), {k: tuple(v) for k, v in seq.items()})
    w = WeightSeq.from_exponents(lay.exponents(), 0, "uni", name=f"example2(depth={depth})")
    return w, lay


# --------------------------------------------------------------------------
# realizing a thick family: cofinite case


def wag_weight_cofinite(L: int, horizon: int = 10_000) -> tuple[WeightSeq, BlockLayout]:
    """Bilateral weight with e = +1 on [L, inf), 0 on [0, L-1], -1 on negatives."""
    if L < 0:
        raise ValueError("L must be >= 0")
    horizon = max(horizon, L)
    B = _Builder(-horizon)
    B.add("neg", (-1, horizon))
    B.add("flat", _ones(L))
    B.add("growth", (1, horizon - L + 1))
    lay = BlockLayout("case-a", tuple(B.blocks), {"L": (L,)})
    w = WeightSeq.from_exponents([0] * L, 0, "bi", left=-1, right=1, name=f"case-a(L={L})")
    return w, lay


# --------------------------------------------------------------------------
# realizing a thick family: general case


@dataclass(frozen=True)
class Preprocessed:
    """F ∩ [0, horizon] with small points and short maximal intervals removed."""

    source: str | None
    horizon: int
    intervals: tuple[tuple[int, int], ...]
    dropped: tuple[int, ...]
    min_length: int
    truncated: bool

    def elements(self) -> list[int]:
        return [m for a, b in self.intervals for m in range(a, b + 1)]

    def as_set(self) -> IntSet:
        return explicit(self.elements(), f"{self.source}'")

    def indicator(self) -> bytearray:
        ind = bytearray(self.horizon + 1)
        for a, b in self.intervals:
            ind[a : b + 1] = b"\x01" * (b - a + 1)
        return ind

    def log_line(self) -> str:
        return (
            f"preprocessed {self.source} to {self.horizon}: dropped {len(self.dropped)} points "
            f"(0, 1 and runs shorter than {self.min_length}); {len(self.intervals)} intervals"
        )


def wag_preprocess(F: IntSet, N: int, min_length: int = 2) -> Preprocessed:
    """Drop 0 and 1, then every maximal interval shorter than ``min_length``."""
    elems = F.materialize(N)
    dropped = [m for m in elems if m < 2]
    kept = []
    for a, b in runs([m for m in elems if m >= 2]):
        if b - a + 1 >= min_length:
            kept.append((a, b))
        else:
            dropped.extend(range(a, b + 1))
    truncated = bool(kept) and kept[-1][1] == N
    return Preprocessed(F.name, N, tuple(kept), tuple(sorted(dropped)), min_length, truncated)


def _hump(length: int, up: int) -> tuple[tuple[int, int], ...]:
    """[2**up x m, 2**-up x m] plus a trailing 1 when the length is odd."""
    m = length // 2
    return ((up, m), (-up, m), (0, length % 2))


def _positive_layout(pre: Preprocessed, gap) -> _Builder:
    B = _Builder(0)
    B.add("J0", _ones(1))  # index 0 is never in F'
    pos = 1
    for k, (a, b) in enumerate(pre.intervals, start=1):
        B.add(f"J{k}", *gap(a - pos))
        B.add(f"I{k}", *_hump(b - a + 1, 1))
        pos = b + 1
    B.add(f"J{len(pre.intervals) + 1}", *gap(pre.horizon + 1 - pos))
    return B


def _empty_check(pre: Preprocessed) -> None:
    if not pre.intervals:
        raise ConstructionRejected(
            f"{pre.source} has no usable interval below {pre.horizon} after preprocessing",
            {"dropped": len(pre.dropped), "min_length": pre.min_length},
        )


def wag_weight(F: IntSet, N: int) -> tuple[WeightSeq, BlockLayout]:
    """Bilateral weight whose e0-ball return times stay inside F' ∪ {0}.

    On [0, N] the maximal intervals I of the preprocessed F' carry
    [2 x m, 1/2 x m (, 1)] and the gaps carry ones; negatives are all 1/2
    and indices above N are ones.
    """
    pre = wag_preprocess(F, N, 2)
    _empty_check(pre)
    B = _positive_layout(pre, lambda n: (_ones(n),))
    neg = Block("neg", -N, ((-1, N),)) if N > 0 else None
    blocks = ((neg,) if neg else ()) + tuple(B.blocks)
    lay = BlockLayout("wag", blocks, {"intervals": tuple(a for iv in pre.intervals for a in iv)},
                      (pre.log_line(),))
    e = np.concatenate([b.exponents() for b in B.blocks])
    w = WeightSeq.from_exponents(e, 0, "bi", left=-1, right=0, name=f"wag({F.name},N={N})")
    return w, lay


def wag_weight_unilateral(F: IntSet, N: int) -> tuple[WeightSeq, BlockLayout]:
    """The non-negative half of :func:`wag_weight` as a unilateral weight."""
    pre = wag_preprocess(F, N, 2)
    _empty_check(pre)
    B = _positive_layout(pre, lambda n: (_ones(n),))
    lay = BlockLayout("wag-uni", tuple(B.blocks),
                      {"intervals": tuple(a for iv in pre.intervals for a in iv)}, (pre.log_line(),))
    w = WeightSeq.from_exponents(lay.exponents(), 0, "uni", right=0, name=f"wag-uni({F.name},N={N})")
    return w, lay


# --------------------------------------------------------------------------
# an operator and its adjoint realizing two disjoint families


def _valley(length: int) -> tuple[tuple[int, int], ...]:
    if length == 1:
        return (_ones(1),)
    return _hump(length, -1)


def adjoint_pair_weight(F: IntSet, N: int) -> tuple[WeightSeq, WeightSeq, BlockLayout]:
    """Bilateral w with humps on F', valleys on the gaps, mirrored via w(-n) = 1/w(n).

    Returns (w, v, layout) with v(n) = w(1 - n).  F' drops 0, 1 and every
    maximal interval shorter than 3.  The gap before the k-th interval runs
    from the end of the previous interval (or 1) to min I_k - 1.
    """
    from .weights import adjoint_reflect

    pre = wag_preprocess(F, N, 3)
    _empty_check(pre)
    B = _positive_layout(pre, _valley)
    pos_blocks = B.blocks[1:]  # without index 0
    mirrored = []
    for b in reversed(pos_blocks):
        # index start+i maps to -(start+i); reading upward reverses and negates
        r = tuple((-e, c) for e, c in reversed(b.runs))
        bar = b.label[0] + "bar" + b.label[1:]
        mirrored.append(Block(bar, -(b.stop - 1), r))
    blocks = tuple(mirrored) + tuple(B.blocks)
    lay = BlockLayout("adjoint", blocks, {"intervals": tuple(a for iv in pre.intervals for a in iv)},
                      (pre.log_line(),))
    w = WeightSeq.from_exponents(lay.exponents(), lay.lo, "bi", left=0, right=0,
                                 name=f"adjoint({F.name},N={N})")
    return w, adjoint_reflect(w), lay


# --------------------------------------------------------------------------
# experimental: longer power chains


def k_chain_sequences(k: int, depth: int) -> dict[str, list[int]]:
    """s_0 = 1, s_1 = k + 1, a_n = (k+1)(s_{n-1} - 1) + n, s_n = k a_n + n - 1 (n >= 2)."""
    s, a = [1, k + 1], [1]
    for n in range(2, depth + 1):
        a.append((k + 1) * (s[n - 1] - 1) + n)
        s.append(k * a[-1] + n - 1)
    return {"s": s[: depth + 1], "a": a[:depth]}


def _validate_k_chain(w: WeightSeq, k: int, seq: dict[str, list[int]], hi: int) -> dict:
    t = product_table(w, 0, hi)
    E = t.E
    growth = {}
    for n, a in enumerate(seq["a"], start=1):
        if n >= 2 and k * a <= hi:
            growth[n] = [int(E[p * a]) for p in range(1, k + 1)]
    bad_growth = {n: g for n, g in growth.items() if g != [n] * k}
    # joint (1, k+1) return set at radius 1/3: E(m) >= 2 and E((k+1) m) >= 2
    M = hi // (k + 1)
    ms = np.arange(1, M + 1)
    joint = ms[(E[ms] >= 2) & (E[(k + 1) * ms] >= 2)]
    diag = {
        "k": k,
        "horizon": hi,
        "growth": growth,
        "bad_growth": bad_growth,
        "joint_1_k+1": [int(m) for m in joint[:10]],
        "joint_checked_to": M,
    }
    if bad_growth or len(joint) or not growth:
        raise ConstructionRejected(f"k-chain weight for k={k} failed validation", diag)
    return diag


def experimental_k_chain_weight(
    k: int, depth: int, experimental: bool = False
) -> tuple[WeightSeq, BlockLayout]:
    """Generalized chain of growth/collapse blocks targeting powers 1..k.

    Stage n puts n twos ending at a_n, ones up to s_n - 1, 2**-n at s_n, and
    ones up to (k+1)(s_n - 1).  For k = 2 this is exactly the layout of
    :func:`example2_weight`.  There is no proof behind it, so it only ships
    behind ``experimental=True`` and every build is checked: products
    along a_n must be 2**n for powers 1..k and the (1, k+1) joint e0-ball
    return set must be empty.
    """
    if not experimental:
        raise ConstructionRejected("k-chain weights are experimental; enable them explicitly (--experimental on the command line)")
    if k < 1 or depth < 1:
        raise ValueError("k and depth must be >= 1")
    seq = k_chain_sequences(k, depth)
    s, a = seq["s"], seq["a"]
    B = _Builder(0)
    B.add("C0", _ones(1))
    for n in range(1, depth + 1):
        B.add(f"A{n}", (1, n))
        B.add(f"B{n}", _ones(s[n] - 1 - a[n - 1]), (-n, 1))
        B.add(f"C{n}", _ones((k + 1) * (s[n] - 1) - s[n]))
    lay = BlockLayout(f"k-chain({k})", tuple(B.blocks), {k_: tuple(v) for k_, v in seq.items()},
                      ("experimental",))
    if not lay.tiles() or lay.lo != 0:
        raise ConstructionRejected("layout does not tile", {"k": k})
    w = WeightSeq.from_exponents(lay.exponents(), 0, "uni", name=f"k-chain(k={k},depth={depth})")
    diag = _validate_k_chain(w, k, seq, lay.hi)
    lay = BlockLayout(lay.name, lay.blocks, lay.recurrences,
                      lay.notes + (f"validated: growth at n={sorted(diag['growth'])}",))
    return w, lay


CONSTRUCTORS = ("example1", "example2", "case-a", "wag", "wag-uni", "adjoint", "k-chain")
