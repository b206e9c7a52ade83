from fractions import Fraction

import pytest

from topsocle.errors import ExpressionError
from topsocle.utils.expressions import (
    parse_coefficient,
    parse_generators,
    parse_matrix,
    parse_polynomial,
    split_by_x_exponent,
    tokenize,
)

NAMES = ["u", "v", "x", "y", "z"]


def test_parse_example_hypersurface():
    terms = parse_polynomial("u^4*x^2 + v^8*y*z", NAMES)
    assert terms == {(4, 0, 2, 0, 0): Fraction(1), (0, 8, 0, 1, 1): Fraction(1)}


def test_both_power_spellings():
    assert parse_polynomial("u**2", ["u", "v"]) == parse_polynomial("u^2", ["u", "v"]) == {(2, 0): 1}


def test_rational_coefficients():
    assert parse_polynomial("u/2 - 3*v", ["u", "v"]) == {(1, 0): Fraction(1, 2), (0, 1): Fraction(-3)}


def test_unknown_variable_reports_position():
    with pytest.raises(ExpressionError) as exc:
        parse_polynomial("u*w", ["u", "v"])
    assert exc.value.position == 2
    assert exc.value.token == "w"


def test_function_names_are_unknown_variables():
    with pytest.raises(ExpressionError) as exc:
        parse_polynomial("sqrt(2)*u", ["u", "v"])
    assert exc.value.token == "sqrt"


def test_bad_character():
    with pytest.raises(ExpressionError) as exc:
        parse_polynomial("u$", ["u"])
    assert exc.value.position == 1
    assert exc.value.token == "$"


@pytest.mark.parametrize("text", ["", "   ", "1/u", "u +* v", "(u + v"])
def test_rejected_input(text):
    with pytest.raises(ExpressionError):
        parse_polynomial(text, ["u", "v"])


def test_tokenize_kinds():
    assert [kind for _, kind, _ in tokenize("2*u^3")] == ["number", "op", "name", "op", "number"]


def test_split_by_x_exponent(uv_ring):
    grouped = split_by_x_exponent(uv_ring, "u*x + v*y + u*y")
    assert set(grouped) == {(1, 0), (0, 1)}
    assert str(grouped[(1, 0)]) == "u"
    assert str(grouped[(0, 1)]) == "u + v"


def test_cancelling_terms_disappear(uv_ring):
    assert split_by_x_exponent(uv_ring, "u*x - u*x + v*y") == {(0, 1): parse_coefficient(uv_ring, "v")}


def test_parse_generators():
    assert parse_generators(["u", "v"], ["u^4", "u^3*v", "u*v^3", "v^4"]) == [(4, 0), (3, 1), (1, 3), (0, 4)]
    with pytest.raises(ExpressionError):
        parse_generators(["u", "v"], ["2*u"])
    with pytest.raises(ExpressionError):
        parse_generators(["u", "v"], ["u + v"])


def test_parse_matrix(uv_ring):
    rows = parse_matrix(uv_ring, "u,v,0;0,u,v")
    assert [[str(c) for c in row] for row in rows] == [["u", "v", "0"], ["0", "u", "v"]]
    with pytest.raises(ExpressionError):
        parse_matrix(uv_ring, "u,v;u")
