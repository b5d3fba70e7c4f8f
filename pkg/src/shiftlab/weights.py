"""Exact weight sequences, cumulative product tables and return times.

Weights are stored dyadic-first: ``w_n = 2**e(n)`` with integer ``e``.
Sequences that are not all powers of two fall back to exact
:class:`~fractions.Fraction` arithmetic.

A :class:`ProductTable` holds ``E(n)`` with ``w_1 ... w_n = 2**E(n)`` for
``n > 0``, ``E(0) = 0`` and ``E(n) = -(e(n+1) + ... + e(0))`` for ``n < 0``,
so every window product is a difference of two table entries::

    w_{j+1} ... w_{j+n} = 2**(E(j+n) - E(j))
    w_j ... w_{j-n+1}   = 2**(E(j) - E(j-n))
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "WeightSeq",
    "ProductTable",
    "SpaceKind",
    "BasisNorms",
    "ReturnTimeReport",
    "RangeError",
    "WeightFileError",
    "C0",
    "floor_log2",
    "exp_above",
    "exp_below",
    "product_table",
    "window_product_forward",
    "window_product_backward",
    "adjoint_reflect",
    "conjugate_basis_norms",
    "conjugate_map",
    "apply_weighted_shift",
    "apply_shift",
    "return_time_e0_ball",
    "return_time_c0_general",
    "read_weight_file",
    "write_weight_file",
    "parse_weight_file",
    "format_weight_file",
    "product_table_json",
]

Scalar = int | Fraction


class RangeError(IndexError):
    """An index outside the range a weight or table is defined on."""


class WeightFileError(ValueError):
    pass


# --------------------------------------------------------------------------
# exact log2 helpers


def floor_log2(x: Fraction) -> int:
    """Largest t with 2**t <= x, for rational x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    t = x.numerator.bit_length() - x.denominator.bit_length()
    # now 2**(t-1) < x < 2**(t+1)
    if Fraction(2) ** t > x:
        t -= 1
    return t


def exp_above(x: Fraction) -> int:
    """Least integer t with 2**t > x."""
    return floor_log2(x) + 1


def exp_below(x: Fraction) -> int:
    """Greatest integer t with 2**t < x."""
    t = floor_log2(x)
    return t - 1 if Fraction(2) ** t == x else t


def _pow2(k: int) -> Fraction:
    return Fraction(2) ** int(k)


def _as_exponent(v: Fraction) -> int | None:
    v = Fraction(v)
    if v <= 0:
        raise ValueError("weights must be strictly positive")
    num, den = v.numerator, v.denominator
    if num & (num - 1) == 0 and den == 1:
        return num.bit_length() - 1
    if num == 1 and den & (den - 1) == 0:
        return -(den.bit_length() - 1)
    return None


# --------------------------------------------------------------------------
# weight sequences


@dataclass(frozen=True, eq=False)
class WeightSeq:
    """A positive weight sequence indexed from ``lo`` (0 when unilateral).

    ``data`` holds the explicit block ``lo .. lo+len-1``: an int64 exponent
    array when ``dyadic``, otherwise a tuple of Fractions.  ``left`` and
    ``right`` are constant tails for indices outside the block (``None``
    means undefined there, and queries raise :class:`RangeError`).
    """

    side: str
    lo: int
    data: np.ndarray | tuple[Fraction, ...]
    dyadic: bool = True
    left: Scalar | None = None
    right: Scalar | None = None
    name: str | None = None

    def __post_init__(self):
        if self.side not in ("uni", "bi"):
            raise ValueError("side must be 'uni' or 'bi'")
        if self.side == "uni":
            if self.lo != 0:
                raise ValueError("unilateral weights start at index 0")
            object.__setattr__(self, "left", None)
        if self.dyadic:
            arr = np.asarray(self.data, dtype=np.int64).copy()
            arr.setflags(write=False)
            object.__setattr__(self, "data", arr)
        else:
            vals = tuple(Fraction(v) for v in self.data)
            if any(v <= 0 for v in vals):
                raise ValueError("weights must be strictly positive")
            object.__setattr__(self, "data", vals)
            for tail in ("left", "right"):
                t = getattr(self, tail)
                if t is not None and Fraction(t) <= 0:
                    raise ValueError("weights must be strictly positive")

    # constructors ---------------------------------------------------------

    @classmethod
    def from_exponents(
        cls,
        exps: Sequence[int],
        lo: int = 0,
        side: str = "uni",
        left: int | None = None,
        right: int | None = None,
        name: str | None = None,
    ) -> "WeightSeq":
        return cls(side, lo, np.asarray(exps, dtype=np.int64), True, left, right, name)

    @classmethod
    def from_values(
        cls,
        values: Sequence[Scalar],
        lo: int = 0,
        side: str = "uni",
        left: Scalar | None = None,
        right: Scalar | None = None,
        name: str | None = None,
    ) -> "WeightSeq":
        """Build from weight values; stays dyadic when every value is 2**k."""
        vals = [Fraction(v) for v in values]
        tails = [Fraction(t) if t is not None else None for t in (left, right)]
        exps = [_as_exponent(v) for v in vals]
        texps = [_as_exponent(t) if t is not None else 0 for t in tails]
        if all(e is not None for e in exps + texps):
            lt, rt = (_as_exponent(t) if t is not None else None for t in tails)
            return cls.from_exponents(exps, lo, side, lt, rt, name)
        return cls(side, lo, tuple(vals), False, tails[0], tails[1], name)

    @classmethod
    def constant(cls, value: Scalar, side: str = "uni", name: str | None = None) -> "WeightSeq":
        e = _as_exponent(Fraction(value))
        if e is not None:
            return cls.from_exponents([], 0, side, e if side == "bi" else None, e, name)
        v = Fraction(value)
        return cls(side, 0, (), False, v if side == "bi" else None, v, name)

    # queries --------------------------------------------------------------

    @property
    def hi(self) -> int:
        """Last index of the explicit block."""
        return self.lo + len(self.data) - 1

    @property
    def bilateral(self) -> bool:
        return self.side == "bi"

    def covers(self, lo: int, hi: int) -> bool:
        if self.side == "uni" and lo < 0:
            return False
        if lo < self.lo and self.left is None:
            return False
        if hi > self.hi and self.right is None:
            return False
        return True

    def _raw(self, n: int):
        if self.side == "uni" and n < 0:
            raise RangeError(f"unilateral weight has no index {n}")
        if n < self.lo:
            if self.left is None:
                raise RangeError(f"weight {self.name} undefined at {n}")
            return self.left
        if n > self.hi:
            if self.right is None:
                raise RangeError(f"weight {self.name} undefined at {n}")
            return self.right
        return self.data[n - self.lo]

    def exponent(self, n: int) -> int:
        if not self.dyadic:
            raise TypeError("rational weight has no integer exponent")
        return int(self._raw(n))

    def value(self, n: int) -> Fraction:
        raw = self._raw(n)
        return _pow2(raw) if self.dyadic else Fraction(raw)

    def exponents(self, lo: int, hi: int) -> np.ndarray:
        """Exponent array for indices lo..hi (dyadic only)."""
        if not self.dyadic:
            raise TypeError("rational weight has no integer exponents")
        if hi < lo:
            return np.zeros(0, dtype=np.int64)
        if not self.covers(lo, hi):
            raise RangeError(f"weight {self.name} does not cover [{lo}, {hi}]")
        out = np.empty(hi - lo + 1, dtype=np.int64)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.data[a - self.lo : b - self.lo + 1]
        if lo < self.lo:
            out[: min(self.lo, hi + 1) - lo] = self.left
        if hi > self.hi:
            start = max(self.hi + 1, lo)
            out[start - lo :] = self.right
        return out

    def values(self, lo: int, hi: int) -> list[Fraction]:
        return [self.value(n) for n in range(lo, hi + 1)]

    def with_exponent(self, n: int, e: int) -> "WeightSeq":
        """Copy with e(n) replaced, e.g. for mutation tests."""
        if not self.dyadic or not self.lo <= n <= self.hi:
            raise RangeError("can only overwrite explicit dyadic entries")
        arr = np.array(self.data)
        arr[n - self.lo] = e
        return replace(self, data=arr, name=f"{self.name}*")

    def to_rational(self) -> "WeightSeq":
        if not self.dyadic:
            return self
        lt = _pow2(self.left) if self.left is not None else None
        rt = _pow2(self.right) if self.right is not None else None
        vals = tuple(_pow2(e) for e in self.data)
        return WeightSeq(self.side, self.lo, vals, False, lt, rt, self.name)

    def sup_bounds(self) -> tuple[Fraction, Fraction]:
        """(sup w, sup 1/w) over the explicit block and the tails."""
        vals = [self.value(n) for n in range(self.lo, self.hi + 1)]
        vals += [Fraction(self.value(t)) for t in (self.lo - 1, self.hi + 1) if self.covers(t, t)]
        if not vals:
            raise ValueError("empty weight")
        return max(vals), max(1 / v for v in vals)

    def __repr__(self) -> str:
        return f"WeightSeq({self.name or '?'}, side={self.side}, [{self.lo}, {self.hi}])"


# --------------------------------------------------------------------------
# product tables


@dataclass(frozen=True, eq=False)
class ProductTable:
    weight: WeightSeq
    lo: int
    hi: int
    E: np.ndarray | None  # dyadic: E(n) at position n - lo
    P: tuple[Fraction, ...] | None = None  # rational: w_1...w_n (inverse form for n < 0)

    @property
    def dyadic(self) -> bool:
        return self.E is not None

    def _check(self, *idx: int) -> None:
        for n in idx:
            if not self.lo <= n <= self.hi:
                raise RangeError(f"index {n} outside product table [{self.lo}, {self.hi}]")

    def exponent(self, n: int) -> int:
        self._check(n)
        if self.E is None:
            raise TypeError("rational table has no exponents")
        return int(self.E[n - self.lo])

    def product(self, n: int) -> Fraction:
        """2**E(n): w_1...w_n for n >= 0, 1/(w_{n+1}...w_0) for n < 0."""
        self._check(n)
        if self.E is not None:
            return _pow2(self.E[n - self.lo])
        return self.P[n - self.lo]

    def forward_exponent(self, j: int, n: int) -> int:
        return self.exponent(j + n) - self.exponent(j)

    def backward_exponent(self, j: int, n: int) -> int:
        return self.exponent(j) - self.exponent(j - n)

    def exponents(self, lo: int, hi: int) -> np.ndarray:
        self._check(lo, hi)
        return self.E[lo - self.lo : hi - self.lo + 1]

    def to_dict(self) -> dict:
        out = {"weight": self.weight.name, "side": self.weight.side, "lo": self.lo, "hi": self.hi}
        if self.E is not None:
            out["repr"] = "dyadic"
            out["E"] = [int(e) for e in self.E]
        else:
            out["repr"] = "rational"
            out["products"] = [str(p) for p in self.P]
        return out


def product_table(w: WeightSeq, lo: int, hi: int) -> ProductTable:
    """Cumulative exponents (or exact products) for every n in [lo, hi]."""
    if lo > 0 or hi < 0:
        raise ValueError("product table range must contain 0")
    if w.side == "uni" and lo != 0:
        raise ValueError("unilateral product tables start at 0")
    if w.dyadic:
        e = w.exponents(lo + 1, hi)
        c = np.concatenate(([0], np.cumsum(e, dtype=np.int64)))
        E = c - c[-lo]
        E.setflags(write=False)
        return ProductTable(w, lo, hi, E)
    vals = w.values(lo + 1, hi)
    c = [Fraction(1)]
    for v in vals:
        c.append(c[-1] * v)
    base = c[-lo]
    return ProductTable(w, lo, hi, None, tuple(x / base for x in c))


def window_product_forward(t: ProductTable, j: int, n: int) -> Fraction:
    """w_{j+1} ... w_{j+n} (empty product 1 when n = 0)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if t.dyadic:
        return _pow2(t.forward_exponent(j, n))
    t._check(j, j + n)
    return t.product(j + n) / t.product(j)


def window_product_backward(t: ProductTable, j: int, n: int) -> Fraction:
    """w_j w_{j-1} ... w_{j-n+1}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if t.dyadic:
        return _pow2(t.backward_exponent(j, n))
    t._check(j, j - n)
    return t.product(j) / t.product(j - n)


def adjoint_reflect(w: WeightSeq) -> WeightSeq:
    """v(n) = w(1 - n)."""
    if w.side != "bi":
        raise ValueError("adjoint reflection needs a bilateral weight")
    data = w.data[::-1] if w.dyadic else tuple(reversed(w.data))
    name = w.name[:-2] if w.name and w.name.endswith("^R") else (f"{w.name}^R" if w.name else None)
    return WeightSeq("bi", 1 - w.hi, data, w.dyadic, w.right, w.left, name)


# --------------------------------------------------------------------------
# spaces and conjugate basis norms


@dataclass(frozen=True)
class SpaceKind:
    base: str = "c0"
    p: Fraction | None = None
    side: str | None = None

    def __post_init__(self):
        if self.base not in ("c0", "lp"):
            raise ValueError("space base must be 'c0' or 'lp'")
        if self.base == "lp":
            if self.p is None or Fraction(self.p) < 1:
                raise ValueError("lp spaces need p >= 1")
            object.__setattr__(self, "p", Fraction(self.p))

    @classmethod
    def parse(cls, text: str) -> "SpaceKind":
        text = text.strip().lower()
        if text in ("c0", "c_0"):
            return cls("c0")
        for prefix in ("lp:", "l", "ell"):
            if text.startswith(prefix):
                return cls("lp", Fraction(text[len(prefix):]))
        raise ValueError(f"unknown space {text!r}")

    def __str__(self) -> str:
        return "c0" if self.base == "c0" else f"l{self.p}"


C0 = SpaceKind("c0")


@dataclass(frozen=True, eq=False)
class BasisNorms:
    """||e_n|| = 2**(-E(n)) in the space where B_w becomes the plain shift."""

    table: ProductTable

    @property
    def lo(self) -> int:
        return self.table.lo

    @property
    def hi(self) -> int:
        return self.table.hi

    @property
    def side(self) -> str:
        return self.table.weight.side

    def norm(self, n: int) -> Fraction:
        return 1 / self.table.product(n)

    def below_mask(self, eps: Fraction, lo: int, hi: int) -> np.ndarray:
        """Boolean mask of ||e_n|| < eps for n in lo..hi."""
        eps = Fraction(eps)
        if self.table.dyadic:
            # 2**(-E) < eps  <=>  -E <= exp_below(eps)
            return -self.table.exponents(lo, hi) <= exp_below(eps)
        return np.array([self.norm(n) < eps for n in range(lo, hi + 1)], dtype=bool)


def conjugate_basis_norms(w: WeightSeq, space: SpaceKind, lo: int, hi: int) -> BasisNorms:
    """Basis norms after conjugating B_w to the unweighted shift.

    The intertwining map is phi(x)_n = x_n * 2**E(n), so phi sends e_n to
    2**E(n) e_n and ||e_n||_Y = ||e_n||_X / 2**E(n) with ||e_n||_X = 1 on
    c0 and lp.
    """
    if w.side == "uni":
        lo = max(lo, 0)
    return BasisNorms(product_table(w, min(lo, 0), max(hi, 0)))


def _table_for(w: WeightSeq, idx: Sequence[int]) -> ProductTable:
    lo = min([0, *idx]) if w.side == "bi" else 0
    return product_table(w, lo, max([0, *idx]))


def conjugate_map(w: WeightSeq, x: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """phi(x)_n = x_n * (w_1 ... w_n), with the inverse product for n < 0."""
    if not x:
        return {}
    t = _table_for(w, list(x))
    return {n: Fraction(v) * t.product(n) for n, v in x.items()}


def apply_weighted_shift(w: WeightSeq, x: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """(B_w x)_n = w_{n+1} x_{n+1} on a finitely supported vector."""
    out = {}
    for k, v in x.items():
        if w.side == "uni" and k == 0:
            continue
        out[k - 1] = w.value(k) * Fraction(v)
    return out


def apply_shift(x: Mapping[int, Fraction], side: str) -> dict[int, Fraction]:
    return {k - 1: Fraction(v) for k, v in x.items() if side == "bi" or k > 0}


# --------------------------------------------------------------------------
# return times


@dataclass(frozen=True)
class ReturnTimeReport:
    """Return-time set N(U, V) ∩ [0, horizon] with its defining condition.

    ``members`` is exact when ``certification == "exact"``; otherwise it is
    the certified superset (every true return time is listed) and
    ``sufficient`` the certified subset.
    """

    condition: str
    members: list[int]
    horizon: int
    space: str
    radius: Fraction
    weight: str | None
    certification: str
    sufficient: list[int] | None = None

    @property
    def positive(self) -> list[int]:
        return [m for m in self.members if m > 0]

    def to_dict(self) -> dict:
        out = {
            "condition": self.condition,
            "members": self.members,
            "horizon": self.horizon,
            "space": self.space,
            "radius": str(self.radius),
            "weight": self.weight,
            "certification": self.certification,
        }
        if self.sufficient is not None and self.certification != "exact":
            out["sufficient"] = self.sufficient
        return out


def _check_rho(rho: Fraction) -> Fraction:
    rho = Fraction(rho)
    if not 0 < rho < 1:
        raise ValueError("radius must lie in (0, 1)")
    return rho


def _e0_members(t: ProductTable, bilateral: bool, rho: Fraction, ms: np.ndarray) -> np.ndarray:
    """Mask over ms of: w_1..w_m > (1-rho)/rho and, bilateral, w_{-m+1}..w_0 < rho/(1-rho)."""
    up = (1 - rho) / rho
    if t.dyadic:
        ok = t.E[ms - t.lo] >= exp_above(up)
        if bilateral:
            # backward product w_{-m+1}..w_0 = 2**(E(0) - E(-m)) = 2**(-E(-m))
            ok &= -t.E[-ms - t.lo] <= exp_below(1 / up)
        return ok
    ok = np.array([t.product(int(m)) > up for m in ms], dtype=bool)
    if bilateral:
        ok &= np.array([1 / t.product(-int(m)) < 1 / up for m in ms], dtype=bool)
    return ok


def return_time_e0_ball(
    w: WeightSeq, space: SpaceKind, rho: Fraction, N: int
) -> ReturnTimeReport:
    """Exact N(W, W) for W the open ball of radius rho around e_0.

    On c0, and on unilateral lp (the test vector e_0 + t e_m is extremal),
    the set is exact.  On bilateral lp the c0 condition is only necessary;
    the c0 condition at radius rho/2 is sufficient, since
    |s|^p + |t|^p < 2 (rho/2)^p <= rho^p for p >= 1.
    """
    rho = _check_rho(rho)
    if space.side is not None and space.side != w.side:
        raise ValueError("space side does not match the weight")
    bilateral = w.side == "bi"
    t = product_table(w, -N if bilateral else 0, N)
    ms = np.arange(1, N + 1, dtype=np.int64)
    members = [0] + [int(m) for m in ms[_e0_members(t, bilateral, rho, ms)]]
    cond = f"w_1..w_m > {(1 - rho) / rho}"
    if bilateral:
        cond += f" and w_(-m+1)..w_0 < {rho / (1 - rho)}"
    if space.base == "lp" and bilateral:
        half = rho / 2
        suff = [0] + [int(m) for m in ms[_e0_members(t, True, half, ms)]]
        return ReturnTimeReport(cond, members, N, str(space), rho, w.name, "necessary-superset", suff)
    return ReturnTimeReport(cond, members, N, str(space), rho, w.name, "exact", members)


def _open_overlap(l1: Fraction, u1: Fraction, l2: Fraction, u2: Fraction) -> bool:
    return max(l1, l2) < min(u1, u2)


def return_time_c0_general(
    w: WeightSeq,
    a: Mapping[int, Fraction],
    b: Mapping[int, Fraction],
    delta: Fraction,
    N: int,
    space: SpaceKind = C0,
) -> ReturnTimeReport:
    """N(ball(a, delta), ball(b, delta)) ∩ [0, N] on c0, exactly.

    In sup norm the coordinates decouple: m is a return time iff for every
    target coordinate i, some x_{i+m} within delta of a_{i+m} is sent by the
    window product P = w_{i+1}..w_{i+m} to within delta of b_i, i.e. the open
    intervals (a_{i+m} +- delta) and ((b_i +- delta) / P) meet.  Only
    coordinates in supp(b) ∪ (supp(a) - m) can fail.
    """
    if space.base != "c0":
        raise ValueError("return_time_c0_general is exact on c0 only")
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    a = {int(k): Fraction(v) for k, v in a.items() if v}
    b = {int(k): Fraction(v) for k, v in b.items() if v}
    bilateral = w.side == "bi"
    if not bilateral and any(k < 0 for k in [*a, *b]):
        raise ValueError("unilateral vectors live on indices >= 0")
    idx = [*a, *b, 0]
    lo = min(idx) - N if bilateral else 0
    t = product_table(w, min(lo, 0), max(idx) + N)
    members = []
    for m in range(N + 1):
        coords = set(b) | {k - m for k in a}
        if not bilateral:
            coords = {i for i in coords if i >= 0}
        ok = True
        for i in coords:
            P = window_product_forward(t, i, m)
            ai, bi = a.get(i + m, Fraction(0)), b.get(i, Fraction(0))
            if not _open_overlap(ai - delta, ai + delta, (bi - delta) / P, (bi + delta) / P):
                ok = False
                break
        if ok:
            members.append(m)
    cond = "per-coordinate interval overlap (a_{i+m} +- d) vs (b_i +- d)/w_{i+1}..w_{i+m}"
    return ReturnTimeReport(cond, members, N, "c0", delta, w.name, "exact", members)


# --------------------------------------------------------------------------
# weight files


def _fmt_scalar(v, dyadic: bool) -> str:
    return str(int(v)) if dyadic else str(Fraction(v))


def format_weight_file(w: WeightSeq) -> str:
    """Header ``side=uni|bi repr=dyadic|rational`` then ``index value`` lines.

    Optional header keys ``left=`` / ``right=`` record constant tails and
    ``name=`` the weight id.
    """
    head = [f"side={w.side}", f"repr={'dyadic' if w.dyadic else 'rational'}"]
    if w.left is not None:
        head.append(f"left={_fmt_scalar(w.left, w.dyadic)}")
    if w.right is not None:
        head.append(f"right={_fmt_scalar(w.right, w.dyadic)}")
    if w.name:
        head.append(f"name={w.name}")
    lines = [" ".join(head)]
    for i, v in enumerate(w.data):
        lines.append(f"{w.lo + i} {_fmt_scalar(v, w.dyadic)}")
    return "\n".join(lines) + "\n"


def parse_weight_file(text: str) -> WeightSeq:
    rows = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
    rows = [(i, ln) for i, ln in rows if ln]
    if not rows:
        raise WeightFileError("line 1: empty weight file")
    hline, header = rows[0]
    meta = {}
    for item in header.split():
        if "=" not in item:
            raise WeightFileError(f"line {hline}: bad header item {item!r}")
        k, v = item.split("=", 1)
        meta[k] = v
    side, rep = meta.get("side"), meta.get("repr", "dyadic")
    if side not in ("uni", "bi") or rep not in ("dyadic", "rational"):
        raise WeightFileError(f"line {hline}: header needs side=uni|bi repr=dyadic|rational")
    dyadic = rep == "dyadic"

    def conv(tok: str, lineno: int):
        try:
            v = int(tok) if dyadic else Fraction(tok)
        except (ValueError, ZeroDivisionError) as exc:
            raise WeightFileError(f"line {lineno}: bad value {tok!r}") from exc
        if not dyadic and v <= 0:
            raise WeightFileError(f"line {lineno}: weights must be positive")
        return v

    idx, vals = [], []
    for lineno, ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise WeightFileError(f"line {lineno}: expected 'index value'")
        try:
            n = int(parts[0])
        except ValueError as exc:
            raise WeightFileError(f"line {lineno}: bad index {parts[0]!r}") from exc
        if idx and n != idx[-1] + 1:
            raise WeightFileError(f"line {lineno}: indices must be consecutive")
        idx.append(n)
        vals.append(conv(parts[1], lineno))
    lo = idx[0] if idx else 0
    left = conv(meta["left"], hline) if "left" in meta else None
    right = conv(meta["right"], hline) if "right" in meta else None
    try:
        if dyadic:
            return WeightSeq.from_exponents(vals, lo, side, left, right, meta.get("name"))
        return WeightSeq(side, lo, tuple(vals), False, left, right, meta.get("name"))
    except ValueError as exc:
        raise WeightFileError(f"line {hline}: {exc}") from exc


def read_weight_file(path: str | Path) -> WeightSeq:
    return parse_weight_file(Path(path).read_text())


def write_weight_file(w: WeightSeq, path: str | Path) -> None:
    Path(path).write_text(format_weight_file(w))


def product_table_json(t: ProductTable) -> str:
    return json.dumps(t.to_dict(), separators=(",", ":"))
