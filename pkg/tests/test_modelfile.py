from fractions import Fraction as F

import pytest
from hypothesis import given

from lpcons.model import BinarySystem, LinIneq
from lpcons.modelfile import ModelParseError, format_model, parse_model

from conftest import systems


def test_parses_the_three_row_example():
    m = parse_model("vars 4\nx1 + x2 + x4 >= 1\nx1 - x2 + x3 >= 0\nx1 - x4 >= 0\n")
    assert m.system == BinarySystem(4, (
        LinIneq.make({1: 1, 2: 1, 4: 1}, 1), LinIneq.make({1: 1, 2: -1, 3: 1}, 0), LinIneq.make({1: 1, 4: -1}, 0)))
    assert m.objective is None


def test_parses_objective_and_comments():
    m = parse_model("# header\nvars 2\n2 x1 + 4 x2 >= 1   # first\n2 x1 - 4 x2 >= -3\nmax 3 x2 - 1 x1\n")
    assert m.system.rows == (LinIneq.make({1: 2, 2: 4}, 1), LinIneq.make({1: 2, 2: -4}, -3))
    assert m.objective == {1: -1, 2: 3} and m.direction == "max"


def test_empty_system():
    assert parse_model("vars 1").system == BinarySystem(1, ())


def test_equality_and_leq_and_terms_on_both_sides():
    m = parse_model("vars 3\nx1 + 1/2 x2 = x3 + 1\n3/2*x1 <= 2\n")
    assert m.system.rows == (
        LinIneq.make({1: 1, 2: F(1, 2), 3: -1}, 1),
        LinIneq.make({1: -1, 2: F(-1, 2), 3: 1}, -1),
        LinIneq.make({1: F(-3, 2)}, -2),
    )


@pytest.mark.parametrize("text, line, col, fragment", [
    ("vars 2\nx3 >= 1", 2, 1, "outside"),
    ("vars 2\n1.5 x1 >= 1", 2, 1, "malformed rational"),
    ("vars 2\n2/0 x1 >= 1", 2, 1, "zero denominator"),
    ("vars 2\n  x1 + x2 >= 1/", 2, 14, "malformed rational"),
    ("x1 >= 0", 1, 1, "vars"),
    ("vars 2\nx1 x2 >= 1", 2, 4, "expected '+' or '-'"),
    ("vars 2\nx1 ? 1", 2, 4, "unexpected character"),
    ("vars 2\nx1 + x2", 2, 1, "exactly one"),
    ("vars 2\nx1 >= 1 >= 0", 2, 9, "exactly one"),
    ("vars two", 1, 6, "nonnegative integer"),
    ("vars 2\nvars 3", 2, 1, "second"),
    ("vars 2\nmax x1\nmin x2", 3, 1, "second objective"),
    ("", 1, 1, "missing"),
])
def test_errors_report_position(text, line, col, fragment):
    with pytest.raises(ModelParseError) as info:
        parse_model(text)
    err = info.value
    assert (err.line, err.column) == (line, col)
    assert fragment in str(err)


@given(systems(max_n=4, max_m=5))
def test_print_then_parse_is_identity(S):
    assert parse_model(format_model(S)).system == S


def test_objective_round_trip():
    m = parse_model("vars 3\nx1 >= 0\nmin -1/2 x3 + x1\n")
    again = parse_model(m.text())
    assert again == m
