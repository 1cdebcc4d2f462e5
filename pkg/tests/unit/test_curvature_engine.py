"""Unit tests for the curvature engine."""

import numpy as np
import pytest

from curvlab.core.jets import jet_einsum
from curvlab.core.metric import (
    DomainBox,
    MetricField,
    Point,
    inverse_metric_jets,
    metric_jets,
    metric_value,
    signature_of,
)
from curvlab.core.parser import parse_expr
from curvlab.core.tensors import lower_index, raise_index
from curvlab.exceptions import (
    DegenerateMetricError,
    DimensionError,
    InvalidArgumentError,
)
from curvlab.services.curvature_engine import (
    METRIC_FIELD,
    BachNormalization,
    CurvatureEngine,
    PacketDepth,
)


def _plane(g_xx: str, bounds=((-1.0, 1.0), (-1.0, 1.0))) -> MetricField:
    coords = ("x", "y")
    components = [parse_expr(g_xx, coords), parse_expr("1", coords)]
    return MetricField.diagonal(
        "plane", coords, components, (1, 1), DomainBox.of(*bounds)
    )


def test_metric_jets_symmetric_and_valued(entry, points):
    """Test metric values and the bitwise symmetry of metric jets."""
    m = entry("sphere_4").metric
    p = points("sphere_4", 1)[0]
    jets = metric_jets(m, p, 2)
    np.testing.assert_array_equal(jets.data, np.swapaxes(jets.data, 0, 1))
    a, b = p.coords[0], p.coords[1]
    assert metric_value(m, p)[1, 1] == pytest.approx(np.sin(a) ** 2)
    assert metric_value(m, p)[2, 2] == pytest.approx(np.sin(a) ** 2 * np.sin(b) ** 2)


def test_degenerate_metric_raises():
    """Test that a vanishing determinant is a numerical-domain error."""
    m = _plane("x^2")
    with pytest.raises(DegenerateMetricError) as info:
        metric_jets(m, Point.of(0.0, 0.5), 0)
    assert info.value.exit_code == 3


def test_point_outside_domain_rejected():
    """Test that points outside the chart box are rejected."""
    m = _plane("1")
    with pytest.raises(InvalidArgumentError):
        metric_value(m, Point.of(2.0, 0.0))
    with pytest.raises(InvalidArgumentError):
        metric_value(m, Point.of(0.0, 0.0, 0.0))


def test_signature_of():
    """Test eigenvalue sign counting."""
    assert signature_of(np.diag([-1.0, 1.0, 1.0, 1.0])) == (1, 3)
    assert signature_of(np.array([[0.0, 1.0], [1.0, 0.0]])) == (1, 1)


def test_flat_metric_has_zero_curvature(engine, entry, points):
    """Test that Euclidean space has vanishing Christoffel symbols and Riemann."""
    m = entry("euclidean_4").metric
    packet = engine.packet(m, points("euclidean_4", 1)[0], PacketDepth.BACH)
    assert np.max(np.abs(packet.christoffel.value)) == 0.0
    assert packet.riem04.max_abs() == 0.0
    assert packet.bach.max_abs() == 0.0


def test_sphere_riemann_convention(engine, entry, points):
    """Test R_abcd = g_ac g_bd - g_ad g_bc and Ric = 3 g on the unit 4-sphere."""
    m = entry("sphere_4").metric
    for p in points("sphere_4", 3):
        packet = engine.packet(m, p)
        g = packet.g
        model = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
        np.testing.assert_allclose(packet.riem04.components, model, atol=1e-10)
        np.testing.assert_allclose(packet.ric.components, 3.0 * g, atol=1e-10)
        assert packet.r == pytest.approx(12.0)
        assert packet.weyl04.norm() < 1e-9


def test_christoffel_symmetric_and_polar_values(engine, entry, points):
    """Test Gamma^k_ij = Gamma^k_ji and a known polar-coordinate symbol."""
    m = entry("sphere_3").metric
    p = points("sphere_3", 1)[0]
    gamma = engine.christoffel(m, p).value
    np.testing.assert_allclose(gamma, np.swapaxes(gamma, 1, 2), atol=1e-14)
    a = p.coords[0]
    # Gamma^a_bb = -sin(a) cos(a)
    assert gamma[0, 1, 1] == pytest.approx(-np.sin(a) * np.cos(a))
    with pytest.raises(InvalidArgumentError):
        engine.christoffel(m, p, jet_extra=4)


def test_structural_identities_hold(engine, entry, points):
    """Test the Riemann symmetries and Bianchi identities on curved metrics."""
    for name in ("sphere_4", "pp_wave_4", "warped_s2xs2", "nil3", "contact_e2_group"):
        m = entry(name).metric
        for p in points(name, 2):
            residuals = engine.structural_residuals(m, p)
            assert max(residuals.values()) < 1e-9, (name, residuals)


def test_weyl_requires_dimension_four(engine, entry, points):
    """Test that Weyl objects are refused below dimension four."""
    m = entry("sphere_3").metric
    p = points("sphere_3", 1)[0]
    with pytest.raises(DimensionError):
        engine.weyl(m, p)
    with pytest.raises(DimensionError):
        engine.bach(m, p)
    assert engine.packet(m, p).weyl04 is None


def test_ricci_scalar_operator(engine, entry, points):
    """Test that the Ricci operator is g^-1 Ric with trace r."""
    m = entry("s2xr").metric
    p = points("s2xr", 1)[0]
    ric, r, q = engine.ricci_scalar(m, p)
    assert r == pytest.approx(2.0)
    assert np.trace(q.components) == pytest.approx(r)
    assert ric.components[2, 2] == pytest.approx(0.0, abs=1e-12)


def test_product_of_spheres_weyl_nonzero_and_harmonic(engine, entry, points):
    """Test that S2 x S2 has nonzero, divergence-free Weyl and vanishing Bach tensor."""
    m = entry("s2xs2").metric
    packet = engine.packet(m, points("s2xs2", 1)[0], PacketDepth.BACH)
    assert packet.weyl04.norm() > 1e-2
    assert packet.div_weyl.norm() < 1e-9
    assert packet.bach.norm() < 1e-8


def test_bach_normalizations_agree_on_einstein_metrics(entry, points):
    """Test that both Bach normalizations vanish on an Einstein product."""
    m = entry("s2xs2").metric
    p = points("s2xs2", 1)[0]
    conformal = CurvatureEngine(BachNormalization.CONFORMAL)
    assert conformal.bach(m, p).norm() < 1e-8
    assert BachNormalization.STANDARD.coefficient(4) == pytest.approx(1.0 / 3.0)
    assert BachNormalization.CONFORMAL.coefficient(4) == pytest.approx(1.0)


def test_bach_is_trace_free(engine, entry, points):
    """Test that the Bach tensor of the non-Einstein warped control is trace-free."""
    m = entry("warped_s2xr").metric
    p = points("warped_s2xr", 1)[0]
    packet = engine.packet(m, p, PacketDepth.BACH)
    trace = float(np.einsum("ab,ab->", packet.g_inv, packet.bach.components))
    assert abs(trace) < 1e-8 * (1.0 + packet.bach.norm())


def test_covariant_derivative_of_metric_vanishes(engine, entry, points):
    """Test metric compatibility through the generic covariant derivative."""
    m = entry("frw_s3").metric
    nabla_g = engine.covariant_derivative(METRIC_FIELD, m, points("frw_s3", 1)[0])
    assert nabla_g.max_abs() < 1e-12


def test_inverse_metric_jets_invert_to_order(entry, points):
    """Test that g^-1 g is the identity jet up to the truncation order."""
    m = entry("sphere_4").metric
    g = metric_jets(m, points("sphere_4", 1)[0], 3)
    product = jet_einsum("ik,kj->ij", inverse_metric_jets(g), g)
    np.testing.assert_allclose(product.value, np.eye(4), atol=1e-12)
    assert np.max(np.abs(product.data[..., 1:])) < 1e-10


def test_unit_sphere_riemann_and_index_moves(engine, entry, points):
    """Test R_abcd = g_ac g_bd - g_ad g_bc and index moves between R^a_bcd and it."""
    m = entry("sphere_4").metric
    p = points("sphere_4", 1)[0]
    riem13, riem04 = engine.riemann(m, p)
    g = metric_value(m, p)
    model = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    np.testing.assert_allclose(riem04.components, model, atol=1e-9)
    lowered = lower_index(riem13, 0, g).components
    raised = raise_index(riem04, 0, g).components
    np.testing.assert_allclose(lowered, riem04.components, atol=1e-10)
    np.testing.assert_allclose(raised, riem13.components, atol=1e-10)
    with pytest.raises(InvalidArgumentError):
        raise_index(riem13, 0, g)


@pytest.mark.parametrize("name", ["s2xs2", "warped_s2xr"])
def test_constant_rescaling_keeps_weyl_and_scales_riemann(engine, entry, points, name):
    """Test that g -> 4g leaves W^a_bcd unchanged and multiplies R_abcd by 4."""
    m = entry(name).metric
    scaled = m.scaled(4.0)
    assert scaled.label == f"4*{m.label}"
    for p in points(name, 3):
        weyl13, _ = engine.weyl(m, p)
        scaled_weyl13, _ = engine.weyl(scaled, p)
        _, riem04 = engine.riemann(m, p)
        _, scaled_riem04 = engine.riemann(scaled, p)
        np.testing.assert_allclose(
            scaled_weyl13.components, weyl13.components, atol=1e-9
        )
        np.testing.assert_allclose(
            scaled_riem04.components, 4.0 * riem04.components, atol=1e-9
        )
