"""Floating-point grid-search simulation of return times on c0.

An independent cross-check for the closed-form return-time sets: it never
looks at the interval rule.  For each source coordinate it scans a grid of
candidate values, assembles a finitely supported float vector, pushes it
through B_w m times by explicit iteration and measures sup-norm distances.

Grid search cannot resolve boundary cases, so each coordinate also reports
how far its feasible region is from empty (in grid units); the caller
skips m whenever some coordinate sits inside the guard band.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .weights import WeightSeq

__all__ = ["simulate_shift", "grid_return_times"]


def simulate_shift(w: WeightSeq, x: Mapping[int, float], m: int) -> dict[int, float]:
    """B_w^m x by m explicit steps in floating point."""
    cur = dict(x)
    for _ in range(m):
        nxt = {}
        for k, v in cur.items():
            if w.side == "uni" and k == 0:
                continue
            nxt[k - 1] = float(w.value(k)) * v
        cur = nxt
    return cur


def _window_gain(w: WeightSeq, i: int, m: int) -> float:
    g = 1.0
    for s in range(i + 1, i + m + 1):
        g *= float(w.value(s))
    return g


def _search(a: float, b: float, g: float, d: float, step: float) -> tuple[float | None, float]:
    """Grid value x with |x - a| < d and |g x - b| < d, plus the feasible width.

    The grid lives on whichever side is coarser: x itself when g < 1, the
    image y = g x otherwise, so the feasible width is measured in the grid
    variable.
    """
    if g < 1:
        grid = np.arange(a - d, a + d, step)
        ok = (np.abs(grid - a) < d) & (np.abs(g * grid - b) < d)
        width = min(a + d, (b + d) / g) - max(a - d, (b - d) / g)
        hit = grid[ok]
        return (float(hit[len(hit) // 2]) if len(hit) else None), width
    grid = np.arange(b - d, b + d, step)
    xs = grid / g
    ok = (np.abs(xs - a) < d) & (np.abs(grid - b) < d)
    width = min(g * (a + d), b + d) - max(g * (a - d), b - d)
    hit = xs[ok]
    return (float(hit[len(hit) // 2]) if len(hit) else None), width


def grid_return_times(
    w: WeightSeq,
    a: Mapping[int, float],
    b: Mapping[int, float],
    delta: float,
    mmax: int,
    step: float = 1e-3,
    guard: float = 2.0,
) -> dict[int, bool | None]:
    """m -> True/False for m in [0, mmax], or None inside the guard band."""
    out: dict[int, bool | None] = {}
    a = {k: float(v) for k, v in a.items() if v}
    b = {k: float(v) for k, v in b.items() if v}
    for m in range(mmax + 1):
        sources = set(a) | {i + m for i in b}
        x: dict[int, float] = {}
        found, unsure = True, False
        for k in sorted(sources):
            i = k - m
            ak, bi = a.get(k, 0.0), b.get(i, 0.0)
            if w.side == "uni" and i < 0:
                x[k] = ak  # this coordinate leaves the space
                continue
            val, width = _search(ak, bi, _window_gain(w, i, m), delta, step)
            if abs(width) < guard * step:
                unsure = True
            if val is None:
                found = False
            else:
                x[k] = val
        if unsure:
            out[m] = None
            continue
        if not found:
            out[m] = False
            continue
        y = simulate_shift(w, x, m)
        dx = max([abs(x.get(k, 0.0) - a.get(k, 0.0)) for k in set(x) | set(a)] or [0.0])
        dy = max([abs(y.get(k, 0.0) - b.get(k, 0.0)) for k in set(y) | set(b)] or [0.0])
        out[m] = dx < delta and dy < delta
    return out
