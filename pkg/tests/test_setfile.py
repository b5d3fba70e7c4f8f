import pytest

from shiftlab.intset import catalog
from shiftlab.setfile import Expr, SetFileError, load_sets, parse_sets

TEXT = """
# a few sets
small = explicit 0 10 100 110
thick = intervals 2^n .. 2^n + n
thirds = grid 3 0,1 from 6
tens = fsums 10^n depth 5
ct = complement thick
u = union small thirds
both = intersect thick thirds
moved = shift thick -2
d = diff small
cat = catalog grid 2
"""


def test_parse_all_rule_kinds():
    env = parse_sets(TEXT)
    assert env["small"].materialize(200) == [0, 10, 100, 110]
    assert env["thick"].materialize(40) == catalog("thick_powers2").materialize(40)
    assert env["thirds"].materialize(12) == [6, 7, 9, 10, 12]
    assert env["tens"].materialize(1000) == [10, 100, 110, 1000]
    assert env["ct"].materialize(8) == [0, 1, 7]
    assert env["u"].materialize(12) == [0, 6, 7, 9, 10, 12]
    assert env["both"].materialize(12) == [6, 9, 10]
    assert env["moved"].materialize(6) == [0, 1, 2, 3, 4, 6]
    assert env["d"].materialize(200) == [10, 90, 100, 110]
    assert env["cat"].materialize(40) == [18, 19, 36, 37]
    assert env["ct"].disjoint_from() == {"thick"}


def test_names_are_attached():
    assert parse_sets("a = explicit 1 2")["a"].name == "a"


@pytest.mark.parametrize("text,line", [
    ("a = explicit 1\nb = bogus 1\n", 2),
    ("\n\nnot a rule\n", 3),
    ("a = intervals n\n", 1),
    ("a = intervals __import__('os') .. 1\n", 1),
    ("9x = explicit 1\n", 1),
    ("a = union undefined_name\n", 1),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(SetFileError) as e:
        parse_sets(text)
    assert e.value.lineno == line
    assert f"line {line}" in str(e.value)


def test_expr_power_and_safety():
    assert Expr("2^n + n")(5) == 37
    assert Expr("-(n // 2) % 7")(9) == 3
    with pytest.raises(ValueError):
        Expr("n.real")


def test_load_from_file(tmp_path):
    p = tmp_path / "sets.txt"
    p.write_text("e = explicit 3 1 2\n")
    assert load_sets(p)["e"].materialize(5) == [1, 2, 3]
