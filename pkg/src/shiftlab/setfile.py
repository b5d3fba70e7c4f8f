"""Parser for set description files.

One definition per line, ``name = <rule>``; ``#`` starts a comment.
Rules (``EXPR`` is integer arithmetic in the variable ``n`` using
``+ - * // % **`` and parentheses)::

    explicit 0 10 100 110
    grid MOD RES[,RES...] [from START]
    intervals EXPR .. EXPR [from N0]
    fsums EXPR [from N0] [depth D]
    catalog NAME [PARAM]
    shift NAME OFFSET
    complement NAME
    union NAME NAME ...
    intersect NAME NAME ...
    diff NAME

Names on the right-hand side refer to earlier lines or to catalog sets.
"""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass
from pathlib import Path

from . import intset as S

__all__ = ["SetFileError", "Expr", "parse_sets", "load_sets"]


class SetFileError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}


def _check(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body)
    elif isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _check(node.operand)
    elif isinstance(node, ast.Constant) and type(node.value) is int:
        pass
    elif isinstance(node, ast.Name) and node.id == "n":
        pass
    else:
        raise ValueError(f"unsupported expression element {ast.dump(node)}")


def _eval(node: ast.AST, n: int) -> int:
    if isinstance(node, ast.Expression):
        return _eval(node.body, n)
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, n), _eval(node.right, n))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, n)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant):
        return node.value
    return n


@dataclass(frozen=True)
class Expr:
    """Integer expression in ``n``; ``^`` is accepted as a power operator."""

    source: str

    def __post_init__(self):
        _check(self._tree())

    def _tree(self) -> ast.Expression:
        return ast.parse(self.source.replace("^", "**"), mode="eval")

    def __call__(self, n: int) -> int:
        return _eval(self._tree(), n)


def _keyword(tokens: list[str], key: str, default: int) -> tuple[list[str], int]:
    if key in tokens:
        i = tokens.index(key)
        value = int(tokens[i + 1])
        return tokens[:i] + tokens[i + 2 :], value
    return tokens, default


def _lookup(env: dict[str, S.IntSet], name: str) -> S.IntSet:
    if name in env:
        return env[name]
    return S.catalog(name)


def _build(kind: str, args: list[str], env: dict[str, S.IntSet]) -> S.IntSet:
    if kind == "explicit":
        return S.explicit(int(a) for a in args)
    if kind == "grid":
        args, start = _keyword(args, "from", 0)
        modulus, residues = int(args[0]), tuple(int(r) for r in args[1].split(","))
        return S.IntSet(S.ArithmeticGrid(modulus, residues, start))
    if kind == "intervals":
        args, n0 = _keyword(args, "from", 1)
        text = " ".join(args)
        if ".." not in text:
            raise ValueError("intervals needs 'LO .. HI'")
        lo, hi = (t.strip() for t in text.split("..", 1))
        return S.IntSet(S.IntervalUnion(Expr(lo), Expr(hi), n0))
    if kind == "fsums":
        args, n0 = _keyword(args, "from", 1)
        args, depth = _keyword(args, "depth", S.DEFAULT_FS_DEPTH)
        return S.IntSet(S.FiniteSums(Expr(" ".join(args)), n0, depth))
    if kind == "catalog":
        return S.catalog(args[0], *(int(a) for a in args[1:]))
    if kind == "shift":
        return S.shift_set(_lookup(env, args[0]), int(args[1]))
    if kind == "complement":
        base = _lookup(env, args[0])
        return S.complement_of(base) if base.name else S.IntSet(S.Complement(base))
    if kind == "union":
        return S.IntSet(S.Union(tuple(_lookup(env, a) for a in args)))
    if kind == "intersect":
        return S.IntSet(S.Intersection(tuple(_lookup(env, a) for a in args)))
    if kind == "diff":
        return S.IntSet(S.DifferenceSet(_lookup(env, args[0])))
    raise ValueError(f"unknown rule kind {kind!r}")


def parse_sets(text: str) -> dict[str, S.IntSet]:
    env: dict[str, S.IntSet] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SetFileError(lineno, "expected 'name = rule'")
        name, rhs = (p.strip() for p in line.split("=", 1))
        if not name.isidentifier():
            raise SetFileError(lineno, f"bad set name {name!r}")
        tokens = rhs.split()
        if not tokens:
            raise SetFileError(lineno, "empty rule")
        try:
            s = _build(tokens[0], tokens[1:], env)
        except (ValueError, KeyError, IndexError, SyntaxError) as exc:
            raise SetFileError(lineno, str(exc)) from exc
        env[name] = s if s.name == name else S.IntSet(s.rule, name, s.facts)
    return env


def load_sets(path: str | Path) -> dict[str, S.IntSet]:
    return parse_sets(Path(path).read_text())
