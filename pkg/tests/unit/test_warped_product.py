"""Unit tests for warped-product curvature."""

from dataclasses import replace

import numpy as np
import pytest

from curvlab.core import expression as ex
from curvlab.core.metric import DomainBox, Interval, MetricField, Point
from curvlab.core.parser import parse_expr
from curvlab.exceptions import DimensionError, StructuralValidationError
from curvlab.models.warped import WarpedProductSpec, assemble_metric


def test_assemble_metric_blocks(entry):
    """Test the block layout eps dt^2 + f^2 g_F."""
    spec = entry("frw_s3").definition
    m = assemble_metric(spec)
    assert m.coord_names == ("t", "a", "b", "c")
    assert m.signature == (-1, 1, 1, 1)
    assert m.components[0][0] == ex.const(-1.0)
    assert m.components[1][0] == ex.const(0.0)
    assert m.domain.intervals[0] == Interval(1.0, 2.0)


def test_warping_must_be_positive(entry):
    """Test that a warping function vanishing on the base interval is rejected."""
    f = parse_expr("t", ("t",))
    spec = WarpedProductSpec("bad", -1, f, Interval(-1.0, 1.0), entry("flat_3").metric)
    with pytest.raises(StructuralValidationError):
        assemble_metric(spec)


def test_spec_validation(entry):
    """Test epsilon, fiber signature and base-only warping checks."""
    fiber = entry("flat_3").metric
    lorentzian = entry("minkowski_4").metric
    f = parse_expr("exp(t)", ("t",))
    with pytest.raises(StructuralValidationError):
        WarpedProductSpec("eps", 0, f, Interval(0.0, 1.0), fiber)
    with pytest.raises(StructuralValidationError):
        WarpedProductSpec("fiber", 1, f, Interval(0.0, 1.0), lorentzian)
    with pytest.raises(StructuralValidationError):
        WarpedProductSpec("clash", 1, f, Interval(0.0, 1.0), fiber, t_name="x")


def test_warping_derivatives(entry):
    """Test (f, f', f'') of f = 1 + t^2."""
    spec = entry("frw_s3").definition
    assert spec.warping_derivatives(1.5) == pytest.approx((3.25, 3.0, 2.0))


def test_service_caches_follow_spec_content(warped_service, entry, points):
    """Test that a spec sharing only its label with another gets its own metric."""
    spec = entry("frw_s3").definition
    other = replace(spec, f=parse_expr("2 + t^2", ("t",)))
    p = points("frw_s3", 1)[0]
    g_aa = warped_service.assemble_metric(spec).components[1][1]
    assert warped_service.assemble_metric(other).components[1][1] != g_aa
    assert warped_service.compare_blocks(spec, p).worst < 1e-8
    assert warped_service.compare_blocks(other, p).worst < 1e-8
    assert warped_service.fiber_packet(other, p) is warped_service.fiber_packet(spec, p)


@pytest.mark.parametrize(
    "name", ["frw_s3", "frw_flat", "warped_s2xs2", "warped_s2xr", "hyperbolic_4"]
)
def test_closed_form_blocks_match_engine(warped_service, entry, points, name):
    """Test every closed-form Riemann and Ricci block against the generic engine."""
    spec = entry(name).definition
    for p in points(name, 3):
        comparison = warped_service.compare_blocks(spec, p)
        assert comparison.worst < 1e-8, comparison.residuals


def test_literal_scalar_formula_differs_for_lorentzian(
    warped_service, engine, entry, points
):
    """Test that the unsigned scalar formula is wrong for eps = -1, right for +1."""
    scalar = warped_service.closed_form_ricci_scalar
    frw = entry("frw_s3")
    p = points("frw_s3", 1)[0]
    exact = engine.packet(frw.metric, p).r
    literal = scalar(frw.definition, p, literal=True).scalar
    assert abs(literal - exact) > 1e-3
    hyperbolic = entry("hyperbolic_4")
    q = points("hyperbolic_4", 1)[0]
    literal = scalar(hyperbolic.definition, q, literal=True).scalar
    assert literal == pytest.approx(engine.packet(hyperbolic.metric, q).r)


def test_electric_weyl_matches_closed_form(warped_service, engine, entry, points):
    """Test E = -(eps/(n-2)) FRic0 on the non-Einstein fiber control."""
    spec = entry("warped_s2xr").definition
    p = points("warped_s2xr", 1)[0]
    closed = warped_service.electric_weyl(spec, p).components
    packet = engine.packet(entry("warped_s2xr").metric, p)
    from_engine = warped_service.engine_electric_weyl(packet)
    np.testing.assert_allclose(from_engine, closed, atol=1e-9)
    assert np.linalg.norm(closed) > 1e-2


def test_electric_weyl_vanishes_for_einstein_fiber(warped_service, entry, points):
    """Test that an Einstein fiber gives a vanishing electric part."""
    spec = entry("warped_s2xs2").definition
    p = points("warped_s2xs2", 1)[0]
    assert warped_service.electric_weyl(spec, p).norm() < 1e-12


def test_mixed_and_fiber_weyl_relations(warped_service, entry, points):
    """Test W(x, y, z, U) = 0 and the fiber block of W on both product fibers."""
    for name in ("warped_s2xs2", "warped_s2xr"):
        spec = entry(name).definition
        p = points(name, 1)[0]
        assert warped_service.mixed_weyl_check(spec, p) < 1e-10
        assert warped_service.fiber_weyl_relation(spec, p) < 1e-9


def test_einstein_fiber_conditions_and_conclusions(warped_service, entry, points):
    """Test the three equivalent conditions and their conclusions on warped_s2xs2."""
    spec = entry("warped_s2xs2").definition
    verification = warped_service.theorem_1_1_verify(spec, points("warped_s2xs2"))
    assert verification.all_conditions
    assert verification.conditions_agree
    assert verification.conclusions_hold
    assert not verification.predicate("conformally_flat").verdict
    assert verification.predicate("bach_flat").max_residual < 1e-7
    for row in verification.points:
        assert row.quasi_einstein.verdict
        assert row.u_alignment_residual < 1e-8


def test_non_einstein_fiber_conditions_fail_together(warped_service, entry, points):
    """Test that all three conditions fail together on warped_s2xr."""
    spec = entry("warped_s2xr").definition
    verification = warped_service.theorem_1_1_verify(spec, points("warped_s2xr"))
    assert verification.conditions_agree
    assert not verification.all_conditions
    for name in ("fiber_einstein", "electric_weyl_zero", "harmonic_weyl"):
        result = verification.predicate(name)
        assert not result.verdict
        assert result.max_residual > 1e-4


def test_weyl_statements_need_dimension_four(warped_service):
    """Test that a three-dimensional warped product is refused by the Weyl checks."""
    plane = MetricField.diagonal(
        "plane",
        ("x", "y"),
        [ex.const(1.0), ex.const(1.0)],
        (1, 1),
        DomainBox.of((-1.0, 1.0), (-1.0, 1.0)),
    )
    f = parse_expr("exp(t)", ("t",))
    small = WarpedProductSpec("small", 1, f, Interval(0.0, 1.0), plane)
    assert small.dim == 3
    with pytest.raises(DimensionError):
        warped_service.theorem_1_1_verify(small, [Point.of(0.5, 0.0, 0.0)])
    with pytest.raises(DimensionError):
        warped_service.electric_weyl(small, Point.of(0.5, 0.0, 0.0))
