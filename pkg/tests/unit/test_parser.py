"""Unit tests for the expression language."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab.core import expression as ex
from curvlab.core.parser import fold_constant, parse_expr, tokenize
from curvlab.exceptions import (
    ArityError,
    DomainError,
    ExpressionSyntaxError,
    StructuralValidationError,
    UnknownIdentifierError,
)

COORDS = ("x", "y", "z")


def test_parse_precedence():
    """Test that products bind tighter than sums and powers tighter than both."""
    expr = parse_expr("1 + x*y^2", COORDS)
    expected = ex.add(ex.const(1), ex.mul(ex.var(0), ex.power(ex.var(1), 2)))
    assert expr == expected


def test_unary_minus_binds_looser_than_power():
    """Test that -x^2 parses as -(x^2)."""
    assert parse_expr("-x^2", COORDS) == ex.neg(ex.power(ex.var(0), 2))


def test_negative_literal_folds():
    """Test that a negated number becomes a negative constant."""
    assert parse_expr("-1", COORDS) == ex.const(-1.0)
    assert parse_expr("x * -2", COORDS) == ex.mul(ex.var(0), ex.const(-2.0))


def test_left_associative_subtraction_and_division():
    """Test that chains of - and / associate to the left."""
    x, y, z = ex.var(0), ex.var(1), ex.var(2)
    assert parse_expr("x - y - z", COORDS) == ex.sub(ex.sub(x, y), z)
    assert parse_expr("x / y / z", COORDS) == ex.div(ex.div(x, y), z)


def test_functions_and_pi():
    """Test the elementary functions and the named constant."""
    expr = parse_expr("sin(x) * exp(y) + pi", COORDS)
    product = ex.mul(ex.apply("sin", ex.var(0)), ex.apply("exp", ex.var(1)))
    assert expr == ex.add(product, ex.const(math.pi))


def test_constant_exponent_folds():
    """Test that a parenthesized constant exponent is folded."""
    expr = parse_expr("x^(2/3)", COORDS)
    assert isinstance(expr, ex.Binary) and expr.op is ex.BinaryOp.POW
    assert expr.right == ex.const(2.0 / 3.0)
    assert parse_expr("y^-2", COORDS) == ex.power(ex.var(1), -2)


def test_non_constant_exponent_rejected():
    """Test that exponents depending on a coordinate are rejected."""
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expr("x^(y)", COORDS)
    assert info.value.offset == 2


def test_unknown_identifier_offset():
    """Test the byte offset of an unknown identifier."""
    with pytest.raises(UnknownIdentifierError) as info:
        parse_expr("x + foo", COORDS)
    assert info.value.offset == 4


def test_byte_offsets_count_utf8():
    """Test that offsets are measured in bytes, not characters."""
    with pytest.raises(ExpressionSyntaxError) as info:
        tokenize("é + $")
    assert info.value.offset == 0
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expr("x + é", COORDS)
    assert info.value.offset == 4


def test_arity_errors():
    """Test bare function names, two-argument calls and calls of coordinates."""
    with pytest.raises(ArityError):
        parse_expr("sin x", COORDS)
    with pytest.raises(ArityError) as info:
        parse_expr("sin(x, y)", COORDS)
    assert info.value.offset == 5
    with pytest.raises(ArityError):
        parse_expr("x(y)", COORDS)


def test_syntax_errors():
    """Test unbalanced parentheses and trailing input."""
    for text in ("(x + y", "x +", "x y", "", "x ** 2"):
        with pytest.raises(ExpressionSyntaxError):
            parse_expr(text, COORDS)


def test_errors_are_structural():
    """Test that every parse error maps to the structural exit code."""
    with pytest.raises(StructuralValidationError) as info:
        parse_expr("cosh(x)", COORDS)
    assert info.value.exit_code == 2


def test_fold_constant():
    """Test folding of coordinate-free expressions."""
    assert fold_constant(parse_expr("pi - 0.4", ())) == pytest.approx(math.pi - 0.4)
    assert fold_constant(parse_expr("2^10 / 4", ())) == 256.0
    with pytest.raises(DomainError):
        fold_constant(parse_expr("log(0)", ()))


def test_fold_constant_fractional_power_of_negative():
    """Test that a fractional power of a negative constant is a domain error."""
    assert fold_constant(parse_expr("(-2)^3", ())) == -8.0
    with pytest.raises(DomainError) as info:
        fold_constant(parse_expr("(-8)^(1/3)", ()))
    assert info.value.exit_code == 3


def test_to_text_examples():
    """Test printing of a few representative trees."""
    assert ex.to_text(parse_expr("-(x*y)", COORDS), COORDS) == "-(x * y)"
    assert ex.to_text(parse_expr("(x^2)^3", COORDS), COORDS) == "(x^2)^3"
    assert ex.to_text(parse_expr("x - (y - z)", COORDS), COORDS) == "x - (y - z)"
    assert ex.to_text(parse_expr("sin(a)^2", ("a",)), ("a",)) == "sin(a)^2"


_leaves = st.one_of(
    st.floats(
        min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False
    ).map(ex.const),
    st.integers(min_value=0, max_value=2).map(ex.var),
)


def _extend(children: st.SearchStrategy) -> st.SearchStrategy:
    functions = st.sampled_from(sorted(ex.FUNCTION_NAMES))
    exponents = st.sampled_from([2.0, 3.0, -1.0, 0.5, 2.0 / 3.0])
    return st.one_of(
        children.map(ex.neg),
        st.tuples(functions, children).map(lambda t: ex.apply(*t)),
        st.tuples(children, children).map(lambda t: ex.add(*t)),
        st.tuples(children, children).map(lambda t: ex.sub(*t)),
        st.tuples(children, children).map(lambda t: ex.mul(*t)),
        st.tuples(children, children).map(lambda t: ex.div(*t)),
        st.tuples(children, exponents).map(lambda t: ex.power(*t)),
    )


expressions = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(expressions)
def test_print_parse_round_trip(expr):
    """Test that printed expressions parse back to the same tree."""
    assert parse_expr(ex.to_text(expr, COORDS), COORDS) == expr


def test_validate_chart():
    """Test that expressions may not address coordinates beyond the chart."""
    expr = parse_expr("x*z", COORDS)
    ex.validate_chart(expr, 3)
    with pytest.raises(StructuralValidationError):
        ex.validate_chart(expr, 2)
