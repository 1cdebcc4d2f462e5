"""Unit tests for truncated Taylor arithmetic."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab.core.jets import JetArray, eval_jet, graded_multi_indices, jet_algebra
from curvlab.core.metric import MetricField, Point, metric_jets, metric_value
from curvlab.core.parser import parse_expr
from curvlab.exceptions import DomainError, InvalidArgumentError
from curvlab.services.catalog import catalog_entries, entry_points, get_entry

XY = ("x", "y")


def test_graded_multi_indices_are_degree_major():
    """Test ordering and count of multi-indices."""
    indices = graded_multi_indices(2, 2)
    assert indices == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert len(graded_multi_indices(4, 4)) == math.comb(8, 4)


def test_product_rule_exact():
    """Test second derivatives of sin(x) exp(y) against closed forms."""
    x, y = 0.3, -0.7
    jet = eval_jet(parse_expr("sin(x)*exp(y)", XY), (x, y), 2, XY)
    assert jet.partial((0, 0)) == pytest.approx(math.sin(x) * math.exp(y))
    assert jet.partial((1, 0)) == pytest.approx(math.cos(x) * math.exp(y))
    assert jet.partial((0, 1)) == pytest.approx(math.sin(x) * math.exp(y))
    assert jet.partial((2, 0)) == pytest.approx(-math.sin(x) * math.exp(y))
    assert jet.partial((1, 1)) == pytest.approx(math.cos(x) * math.exp(y))


def test_fourth_order_power():
    """Test that x^4 has fourth derivative 24 and x^(1/2) the known third derivative."""
    jet = eval_jet(parse_expr("x^4", XY), (0.5, 0.0), 4, XY)
    assert jet.partial((4, 0)) == pytest.approx(24.0)
    assert jet.partial((3, 0)) == pytest.approx(12.0)
    root = eval_jet(parse_expr("x^0.5", XY), (2.0, 0.0), 3, XY)
    assert root.partial((3, 0)) == pytest.approx(3.0 / 8.0 * 2.0 ** (-2.5))


def test_derivative_lowers_order():
    """Test that differentiating a jet shifts its coefficients."""
    jet = eval_jet(parse_expr("x^3*y", XY), (1.0, 2.0), 3, XY)
    dx = jet.derivative(0)
    assert dx.order == 2
    assert dx.partial((0, 0)) == pytest.approx(3.0 * 2.0)
    assert dx.partial((1, 1)) == pytest.approx(6.0)
    with pytest.raises(InvalidArgumentError):
        eval_jet(parse_expr("x", XY), (1.0, 2.0), 0, XY).derivative(0)


def test_truncate_is_prefix():
    """Test that a lower-order truncation keeps the leading coefficients."""
    jet = eval_jet(parse_expr("exp(x + y)", XY), (0.1, 0.2), 4, XY)
    low = jet.truncate(2)
    np.testing.assert_array_equal(low.data, jet.data[: jet_algebra(2, 2).size])
    with pytest.raises(InvalidArgumentError):
        low.truncate(3)


def test_constant_and_coordinate_jets():
    """Test the building blocks of jet evaluation."""
    algebra = jet_algebra(2, 2)
    c = JetArray.constant(np.array([1.0, 2.0]), algebra)
    assert c.shape == (2,)
    assert np.all(c.data[:, 1:] == 0.0)
    y = JetArray.coordinate(1, 5.0, algebra)
    assert y.partial((0, 1)) == 1.0
    assert (y * y).partial((0, 2)) == pytest.approx(2.0)


def test_domain_errors():
    """Test that evaluation outside an expression's domain raises with the node text."""
    with pytest.raises(DomainError) as info:
        eval_jet(parse_expr("log(x - 1)", XY), (0.5, 0.0), 1, XY)
    assert "log" in str(info.value)
    with pytest.raises(DomainError):
        eval_jet(parse_expr("1/(x - y)", XY), (0.5, 0.5), 1, XY)
    with pytest.raises(DomainError):
        eval_jet(parse_expr("sqrt(x)", XY), (0.0, 0.0), 1, XY)
    with pytest.raises(DomainError):
        eval_jet(parse_expr("x^0.5", XY), (-1.0, 0.0), 0, XY)


def test_domain_error_exit_code():
    """Test that domain errors map to the numerical exit code."""
    with pytest.raises(DomainError) as info:
        eval_jet(parse_expr("log(x)", XY), (-1.0, 0.0), 0, XY)
    assert info.value.exit_code == 3


SAMPLE = parse_expr("sin(x)*y^2 + exp(x*y)/(2 + cos(y)) + log(3 + x)", XY)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=-1.0, max_value=1.0),
)
def test_gradient_matches_central_differences(x, y):
    """Test first derivatives against central finite differences."""
    jet = eval_jet(SAMPLE, (x, y), 2, XY)
    h = 1e-5

    def value(a: float, b: float) -> float:
        return float(eval_jet(SAMPLE, (a, b), 0, XY).value)

    dx = (value(x + h, y) - value(x - h, y)) / (2 * h)
    dy = (value(x, y + h) - value(x, y - h)) / (2 * h)
    assert jet.partial((1, 0)) == pytest.approx(dx, abs=1e-6)
    assert jet.partial((0, 1)) == pytest.approx(dy, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=-1.0, max_value=1.0),
)
def test_mixed_partial_matches_differences_of_gradient(x, y):
    """Test second derivatives against differences of the exact first derivatives."""
    jet = eval_jet(SAMPLE, (x, y), 2, XY)
    h = 1e-5
    plus = eval_jet(SAMPLE, (x + h, y), 1, XY).partial((0, 1))
    minus = eval_jet(SAMPLE, (x - h, y), 1, XY).partial((0, 1))
    assert jet.partial((1, 1)) == pytest.approx((plus - minus) / (2 * h), abs=1e-6)


def _unit(n: int, *axes: int) -> tuple[int, ...]:
    alpha = [0] * n
    for axis in axes:
        alpha[axis] += 1
    return tuple(alpha)


def _metric_differences(
    m: MetricField, p: Point, h: float
) -> dict[tuple[int, ...], np.ndarray]:
    """Central differences of the metric matrix for every first and second partial."""

    def at(*steps: tuple[int, int]) -> np.ndarray:
        coords = list(p.coords)
        for axis, sign in steps:
            coords[axis] += sign * h
        return metric_value(m, Point(tuple(coords)))

    n = m.dim
    center = at()
    found = {}
    for i in range(n):
        plus, minus = at((i, 1)), at((i, -1))
        found[_unit(n, i)] = (plus - minus) / (2 * h)
        found[_unit(n, i, i)] = (plus - 2 * center + minus) / h**2
        for j in range(i):
            corners = (
                at((i, 1), (j, 1))
                - at((i, 1), (j, -1))
                - at((i, -1), (j, 1))
                + at((i, -1), (j, -1))
            )
            found[_unit(n, i, j)] = corners / (4 * h**2)
    return found


@pytest.mark.slow
@pytest.mark.parametrize("name", [e.name for e in catalog_entries()])
def test_metric_jets_match_finite_differences(name):
    """Test first and second metric derivatives of every entry at 100 seeded points."""
    entry = get_entry(name)
    for p in entry_points(entry, 0, 100):
        jets = metric_jets(entry.metric, p, 2)
        differences = _metric_differences(entry.metric, p, 1e-3)
        for alpha, difference in differences.items():
            np.testing.assert_allclose(
                jets.partial(alpha), difference, rtol=1e-5, atol=1e-5
            )
