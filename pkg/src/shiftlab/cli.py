"""Command-line front end: ``shiftlab <subcommand> ...``.

Every check prints one report and exits 1 when a verdict came back
Refuted (or, for ``verify-paper``, when any acceptance claim failed).
``check <name>`` is accepted as an alias for ``<name>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import construct as C
from . import dynamics as D
from . import family as FM
from . import intset as S
from .setfile import load_sets
from .verify import CLAIMS, RunConfig, default_horizon, run_claims
from .weights import (
    RangeError,
    SpaceKind,
    WeightFileError,
    product_table,
    read_weight_file,
    return_time_c0_general,
    return_time_e0_ball,
    write_weight_file,
)

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# output


def _emit(report: dict[str, Any], fmt: str, out=None) -> None:
    out = out or sys.stdout
    report = FM._jsonable(report)
    if fmt == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return
    if fmt == "csv":
        rows = report.get("rows")
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        if rows:
            wr.writerow(list(rows[0]))
            for r in rows:
                wr.writerow(list(r.values()))
        else:
            wr.writerow(["key", "value"])
            for k, v in sorted(_flatten(report).items()):
                wr.writerow([k, v])
        out.write(buf.getvalue())
        return
    for k, v in sorted(_flatten(report).items()):
        out.write(f"{k}: {v}\n")


def _flatten(d: Any, prefix: str = "") -> dict[str, Any]:
    if isinstance(d, dict):
        out = {}
        for k, v in d.items():
            out.update(_flatten(v, f"{prefix}{k}."))
        return out
    return {prefix.rstrip("."): json.dumps(d) if isinstance(d, list) else d}


def _verdict_report(check: str, v: FM.Verdict, extra: dict | None = None) -> dict:
    return {"check": check, "params": v.params, "verdict": v.status.value, "horizon": v.horizon,
            "witness": v.witness, **(extra or {})}


# --------------------------------------------------------------------------
# argument helpers


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _load_weight(path: str):
    try:
        return read_weight_file(path)
    except FileNotFoundError as exc:
        raise UsageError(f"no such weight file: {path}") from exc
    except WeightFileError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _resolve_set(name: str, setfile: str | None) -> S.IntSet:
    if setfile:
        sets = load_sets(setfile)
        if name in sets:
            return sets[name]
    return S.catalog(name.strip())


def _fit(w, N: int, reach: int = 1) -> int:
    """Largest horizon <= N whose product windows (times ``reach``) stay inside w's range."""
    limits = [N]
    if w.right is None:
        limits.append(w.hi // reach)
    if w.side == "bi" and w.left is None:
        limits.append((-w.lo) // reach)
    fit = min(limits)
    if fit < 1:
        raise UsageError(f"weight {w.name} is too short for any horizon")
    return fit


def _vector(text: str) -> dict[int, Fraction]:
    """``"0:1,3:-1/2"`` -> {0: 1, 3: -1/2}."""
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        k, _, v = item.partition(":")
        out[int(k)] = Fraction(v)
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--horizon", type=int, default=None, help="horizon N (default $SHIFTLAB_HORIZON or 10000)")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--timings", action="store_true", help="include wall-clock runtime in the report")


# --------------------------------------------------------------------------
# subcommands


def cmd_construct(a) -> int:
    N = a.horizon or default_horizon()
    name = a.name
    v = None
    if name == "example1":
        w, lay = C.example1_weight(a.depth)
    elif name == "example2":
        w, lay = C.example2_weight(a.depth)
    elif name == "case-a":
        w, lay = C.wag_weight_cofinite(a.L, N)
    elif name in ("wag", "wag-uni", "adjoint"):
        if not a.set:
            raise UsageError(f"construct {name} needs --set")
        F = _resolve_set(a.set, a.setfile)
        if name == "wag":
            w, lay = C.wag_weight(F, N)
        elif name == "wag-uni":
            w, lay = C.wag_weight_unilateral(F, N)
        else:
            w, v, lay = C.adjoint_pair_weight(F, N)
    elif name == "k-chain":
        w, lay = C.experimental_k_chain_weight(a.k, a.depth, experimental=a.experimental)
    else:
        raise UsageError(f"unknown constructor {name!r}; known: {', '.join(C.CONSTRUCTORS)}")
    out = Path(a.out or f"{name}.w")
    write_weight_file(w, out)
    Path(str(out) + ".layout.json").write_text(json.dumps(lay.to_dict(), indent=1) + "\n")
    files = [str(out), str(out) + ".layout.json"]
    if v is not None:
        write_weight_file(v, str(out) + ".v")
        files.append(str(out) + ".v")
    _emit({"check": "construct", "weight": w.name, "side": w.side, "lo": w.lo, "hi": w.hi,
           "files": files, "notes": list(lay.notes)}, a.format)
    return 0


def cmd_products(a) -> int:
    w = _load_weight(a.weight)
    lo = a.lo if a.lo is not None else (w.lo if w.side == "bi" else 0)
    hi = a.hi if a.hi is not None else w.hi
    t = product_table(w, min(lo, 0), max(hi, 0))
    d = t.to_dict()
    if a.format == "csv":
        key = "E" if t.dyadic else "products"
        d = {"rows": [{"n": t.lo + i, key: x} for i, x in enumerate(d[key])]}
    _emit(d, a.format)
    return 0


def cmd_return_times(a) -> int:
    N = a.horizon or default_horizon()
    space = SpaceKind.parse(a.space)
    t0 = time.perf_counter()
    if a.sum:
        specs = []
        for item in a.sum:
            path, _, p = item.rpartition(":")
            specs.append((_load_weight(path), int(p)))
        for w, p in specs:
            N = _fit(w, N, p)
        r = D.direct_sum_return_times(specs, space, a.rho, N)
    else:
        if not a.weight:
            raise UsageError("return-times needs --weight or --sum")
        w = _load_weight(a.weight)
        if a.a is not None or a.b is not None:
            va, vb = _vector(a.a or ""), _vector(a.b or "")
            span = max([abs(k) for k in [*va, *vb]] or [0])
            N = _fit(w, N - span, 1) if w.right is None else N
            r = return_time_c0_general(w, va, vb, a.rho, N, space)
        else:
            r = return_time_e0_ball(w, space, a.rho, _fit(w, N))
    rep = {"check": "return-times", **r.to_dict()}
    if a.timings:
        rep["runtime"] = round(time.perf_counter() - t0, 4)
    if a.format == "csv":
        rep = {"rows": [{"m": m} for m in r.members]}
    _emit(rep, a.format)
    return 0


def cmd_bes(a) -> int:
    N = a.horizon or default_horizon()
    w = _load_weight(a.weight)
    N = _fit(w, N + a.j) - a.j
    b = D.bes_sets(w, a.M, a.j, N)
    A, Ab = b.A.materialize(N), b.A_bar.materialize(N)
    if a.format == "csv":
        As, Abs = set(A), set(Ab)
        rows = [{"n": n, "A": int(n in As), "A_bar": int(n in Abs)} for n in range(1, N + 1)]
        _emit({"rows": rows}, "csv")
        return 0
    _emit({"check": "bes-check", "params": {"weight": w.name, "M": b.M, "j": b.j}, "horizon": N,
           "A": A, "A_bar": Ab, "both": b.both()}, a.format)
    return 0


def cmd_wag(a) -> int:
    N = a.horizon or default_horizon()
    w = _load_weight(a.weight)
    F = _resolve_set(a.set, a.setfile)
    v = D.check_wag_inclusion(w, F, a.M, a.j, N)
    _emit(_verdict_report("wag-check", v), a.format)
    return 1 if v.refuted else 0


def cmd_salas_uni(a) -> int:
    N = a.horizon or default_horizon()
    w, v_ = _load_weight(a.w), _load_weight(a.v)
    N = _fit(v_, _fit(w, N))
    v = D.salas_unilateral_check(w, v_, N, a.ladder)
    _emit(_verdict_report("salas-uni", v), a.format)
    return 1 if v.refuted else 0


def cmd_salas_bi(a) -> int:
    N = a.horizon or default_horizon()
    w, v_ = _load_weight(a.w), _load_weight(a.v)
    N = _fit(v_, _fit(w, N + a.q)) - a.q
    v = D.salas_bilateral_check(w, v_, a.eps, a.q, N)
    _emit(_verdict_report("salas-bi", v), a.format)
    return 1 if v.refuted else 0


def cmd_joint_norms(a) -> int:
    N = a.horizon or default_horizon()
    ws = [_load_weight(p) for p in a.weight]
    for w in ws:
        N = _fit(w, N + a.window) - a.window
    pred = FM.parse_predicate(a.predicate)
    v = D.joint_basis_norm_check(ws, a.eps, a.window, pred, N)
    _emit(_verdict_report("joint-norms", v), a.format)
    return 1 if v.refuted else 0


def cmd_family(a) -> int:
    N = a.horizon or default_horizon()
    s = _resolve_set(a.set, a.setfile)
    pred = FM.parse_predicate(a.predicate)
    v = pred(s, N)
    _emit(_verdict_report("family", v), a.format)
    return 1 if v.refuted else 0


def cmd_verify(a) -> int:
    cfg = RunConfig(horizon=a.horizon or default_horizon(), seed=a.seed, workers=a.workers,
                    format=a.format)
    ov = {}
    if a.wag_weight:
        ov["wag_weight"] = _load_weight(a.wag_weight)
    ids = [int(x) for x in a.claims.split(",")] if a.claims else None
    results = run_claims(cfg, ids, ov)
    rep = {"check": "verify-paper", "horizon": cfg.horizon, "seed": cfg.seed,
           "claims": [r.to_dict(a.timings) for r in results],
           "passed": sum(r.passed for r in results), "total": len(results)}
    if a.format == "text":
        for r in results:
            sys.stdout.write(r.line() + (f"  ({r.seconds:.2f}s)" if a.timings else "") + "\n")
    else:
        _emit(rep, a.format)
    return 0 if all(r.passed for r in results) else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shiftlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("construct", help="build a weight and write it to a file")
    p.add_argument("name", help=", ".join(C.CONSTRUCTORS))
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--L", type=int, default=0)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--set", help="catalog name or set-file entry")
    p.add_argument("--setfile")
    p.add_argument("--experimental", action="store_true")
    p.add_argument("--out")
    _common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("products", help="cumulative product exponents")
    p.add_argument("--weight", required=True)
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)
    _common(p)
    p.set_defaults(func=cmd_products)

    p = sub.add_parser("return-times", help="e0-ball, general c0 or direct-sum return times")
    p.add_argument("--weight")
    p.add_argument("--sum", action="append", metavar="FILE:POWER")
    p.add_argument("--rho", type=_fraction, default=Fraction(1, 3))
    p.add_argument("--space", default="c0", help="c0 or lp:P")
    p.add_argument("--a", help="centre of the source ball, e.g. 0:1,2:1/2")
    p.add_argument("--b", help="centre of the target ball")
    _common(p)
    p.set_defaults(func=cmd_return_times)

    p = sub.add_parser("bes-check", help="forward/backward window sets A and A-bar")
    p.add_argument("--weight", required=True)
    p.add_argument("--M", type=_fraction, required=True)
    p.add_argument("--j", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_bes)

    p = sub.add_parser("wag-check", help="E-set inclusion for a weight built from a set")
    p.add_argument("--weight", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--setfile")
    p.add_argument("--M", type=_fraction, required=True)
    p.add_argument("--j", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_wag)

    p = sub.add_parser("salas-uni", help="running sup of min products, as a 2^t ladder")
    p.add_argument("--w", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--ladder", type=int, default=10)
    _common(p)
    p.set_defaults(func=cmd_salas_uni)

    p = sub.add_parser("salas-bi", help="bilateral window criterion search")
    p.add_argument("--w", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--eps", type=_fraction, required=True)
    p.add_argument("--q", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_salas_bi)

    p = sub.add_parser("joint-norms", help="joint small basis-norm sets fed to a family predicate")
    p.add_argument("--weight", action="append", required=True)
    p.add_argument("--eps", type=_fraction, required=True)
    p.add_argument("--window", type=int, default=0)
    p.add_argument("--predicate", required=True)
    _common(p)
    p.set_defaults(func=cmd_joint_norms)

    p = sub.add_parser("family", help="one family predicate on one set")
    p.add_argument("--set", required=True)
    p.add_argument("--setfile")
    p.add_argument("--predicate", required=True, help="e.g. thick:k=5, syndetic:b=10")
    _common(p)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("verify-paper", help="run the acceptance suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--claims", help="comma-separated claim ids (default all %d)" % len(CLAIMS))
    p.add_argument("--wag-weight", help="replace the constructed wag weight with this file")
    _common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "check":
        argv = argv[1:]
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        return a.func(a)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (UsageError, C.ConstructionRejected, KeyError, ValueError, RangeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"shiftlab: error: {msg}", file=sys.stderr)
        if isinstance(exc, C.ConstructionRejected) and exc.diagnostics:
            print(json.dumps(FM._jsonable(exc.diagnostics), indent=1), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
