"""Unit tests for the classifier service."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab.exceptions import DimensionError, InvalidArgumentError
from curvlab.schemas.fits import KernelVectorKind, QuasiEinsteinBranch
from curvlab.schemas.report import PredicateResult
from curvlab.services.catalog import catalog_entries
from curvlab.services.classifier import cluster_eigenvalues, fit_quasi_einstein

FOUR_DIMENSIONAL = [e.name for e in catalog_entries() if e.dim == 4]
INCREASING_TOLERANCES = [10.0**-k for k in range(9, 0, -1)]


def _flat_weyl_by_loops(weyl04: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Rows (a, c, d) and columns b of g^ae W_ebcd, one component at a time."""
    n = g_inv.shape[0]
    rows = []
    for a in range(n):
        for c in range(n):
            for d in range(n):
                row = []
                for b in range(n):
                    row.append(sum(g_inv[a, e] * weyl04[e, b, c, d] for e in range(n)))
                rows.append(row)
    return np.array(rows)


def _kernel_projector(matrix: np.ndarray, threshold: float) -> np.ndarray:
    _, singular, vh = np.linalg.svd(matrix)
    basis = vh[int(np.sum(singular > threshold)) :]
    return basis.T @ basis


def test_cluster_eigenvalues():
    """Test grouping of nearby eigenvalues."""
    clusters = cluster_eigenvalues(np.array([1.0, 3.0, 1.0 + 1e-12, 1.0]), 1e-9)
    assert clusters[0][1] == 3
    assert clusters[0][0] == pytest.approx(1.0)
    assert clusters[1] == (3.0, 1)


def test_fit_on_einstein_matrix():
    """Test the Einstein branch of the quasi-Einstein fit."""
    g = np.diag([-1.0, 2.0, 3.0, 4.0])
    fit = fit_quasi_einstein(g, 2.5 * g, 1e-9)
    assert fit.verdict
    assert fit.branch is QuasiEinsteinBranch.EINSTEIN
    assert fit.a == pytest.approx(2.5)
    assert fit.b == 0.0


def test_fit_on_timelike_rank_one_matrix():
    """Test recovery of a, b and a unit timelike generator."""
    g = np.diag([-1.0, 1.0, 1.0, 1.0])
    u = np.array([1.0, 0.0, 0.0, 0.0])
    fit = fit_quasi_einstein(g, 0.7 * g + 2.0 * np.outer(u, u), 1e-9)
    assert fit.verdict
    assert fit.branch is QuasiEinsteinBranch.NON_NULL
    assert fit.a == pytest.approx(0.7)
    assert fit.b == pytest.approx(2.0)
    assert fit.epsilon_u == -1
    np.testing.assert_allclose(np.abs(fit.u), [1.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_fit_rejects_rank_two_deviation():
    """Test that two independent directions are not quasi-Einstein."""
    g = np.eye(4)
    ric = np.diag([1.0, 2.0, 3.0, 3.0])
    fit = fit_quasi_einstein(g, ric, 1e-9)
    assert not fit.verdict
    assert fit.branch is QuasiEinsteinBranch.NONE
    assert fit.second_singular_value > 0.5


def test_sphere_is_einstein(classifier, entry, points):
    """Test the Einstein verdict and constant on the unit 4-sphere."""
    report = classifier.classify(entry("sphere_4").metric, points("sphere_4"))
    assert report.predicate("einstein").verdict
    assert report.constants["einstein_constant"] == pytest.approx(3.0)
    assert report.predicate("constant_curvature").verdict
    assert report.constants["sectional_constant"] == pytest.approx(1.0)
    assert report.predicate("conformally_flat").verdict
    assert report.predicate("harmonic_weyl").verdict
    assert report.predicate("bach_flat").verdict


def test_s2xr_is_quasi_einstein_not_einstein(classifier, entry, points):
    """Test Ric = g - dz (x) dz on the sphere times a line."""
    m = entry("s2xr").metric
    pts = points("s2xr")
    assert not classifier.is_einstein(m, pts).verdict
    fit = classifier.quasi_einstein_fit(m, pts[0])
    assert fit.verdict
    assert fit.a == pytest.approx(1.0)
    assert fit.b == pytest.approx(-1.0)
    assert fit.epsilon_u == 1


def test_pp_wave_takes_null_branch(classifier, entry, points):
    """Test that the plane wave's Ricci tensor is detected as null dust."""
    m = entry("pp_wave_4").metric
    for p in points("pp_wave_4", 3):
        fit = classifier.quasi_einstein_fit(m, p)
        assert fit.verdict
        assert fit.branch is QuasiEinsteinBranch.NULL
        assert fit.epsilon_u == 0
        assert fit.a == pytest.approx(0.0, abs=1e-9)
        assert fit.b == 1.0
        assert fit.residual < 1e-8
        np.testing.assert_allclose(fit.u, [np.sqrt(2.0), 0.0, 0.0, 0.0], atol=1e-9)


def test_pp_wave_kernel_is_null(classifier, entry, points):
    """Test that the Weyl kernel of the plane wave is spanned by the null d_v."""
    m = entry("pp_wave_4").metric
    kernel = classifier.weakly_cf_kernel(m, points("pp_wave_4", 1)[0])
    assert kernel.dimension == 1
    assert not kernel.contains_non_null
    vector = kernel.basis[0]
    assert vector.kind is KernelVectorKind.NULL
    expected = [0.0, 1.0, 0.0, 0.0]
    np.testing.assert_allclose(np.abs(vector.components), expected, atol=1e-9)


def test_weakly_cf_check(classifier, entry, points):
    """Test the residual of W(., .)V for a kernel and a non-kernel vector."""
    m = entry("pp_wave_4").metric
    p = points("pp_wave_4", 1)[0]
    assert classifier.weakly_cf_check(m, p, [0.0, 3.0, 0.0, 0.0]) < 1e-10
    assert classifier.weakly_cf_check(m, p, [1.0, 0.0, 0.0, 0.0]) > 1e-3
    with pytest.raises(InvalidArgumentError):
        classifier.weakly_cf_check(m, p, [0.0, 0.0, 0.0, 0.0])


def test_conformally_flat_kernel_is_everything(classifier, entry, points):
    """Test that a vanishing Weyl tensor has the whole tangent space as kernel."""
    m = entry("sphere_4").metric
    kernel = classifier.weakly_cf_kernel(m, points("sphere_4", 1)[0])
    assert kernel.dimension == 4
    assert kernel.contains_non_null


def test_eardley_check_on_plane_wave(classifier, entry, points):
    """Test the rigidity check: null kernel, no violations."""
    report = classifier.eardley_check(entry("pp_wave_4").metric, points("pp_wave_4"))
    assert report.consistent
    assert report.null_kernel_points == len(report.points)
    assert all(p.weyl_norm > 1e-3 for p in report.points)
    with pytest.raises(DimensionError):
        classifier.eardley_check(entry("sasakian_r5").metric, points("sasakian_r5", 1))


def test_harmonic_weyl_on_product(classifier, entry, points):
    """Test harmonic Weyl on the Einstein product of spheres."""
    result = classifier.harmonic_weyl_check(entry("s2xs2").metric, points("s2xs2"))
    assert result.verdict
    with pytest.raises(DimensionError):
        classifier.harmonic_weyl_check(entry("sphere_3").metric, points("sphere_3"))


def test_constant_curvature_check(classifier, entry, points):
    """Test the sectional-curvature fit on the hyperbolic warped product."""
    m = entry("hyperbolic_4").metric
    fit = classifier.constant_curvature_check(m, points("hyperbolic_4"))
    assert fit.verdict
    assert fit.c == pytest.approx(-1.0)
    m = entry("s2xs2").metric
    product = classifier.constant_curvature_check(m, points("s2xs2"))
    assert not product.verdict


def test_three_dimensional_classification_skips_weyl(classifier, entry, points):
    """Test that Weyl predicates are omitted below dimension four."""
    report = classifier.classify(entry("sphere_3").metric, points("sphere_3"))
    names = {p.name for p in report.predicates}
    assert "conformally_flat" not in names
    assert {"einstein", "quasi_einstein", "constant_curvature"} <= names


def test_witness_is_first_failing_point(classifier, entry, points):
    """Test that a failing predicate names the first failing point."""
    pts = points("warped_s2xr", 3)
    report = classifier.classify(entry("warped_s2xr").metric, pts)
    einstein = report.predicate("einstein")
    assert not einstein.verdict
    assert einstein.witness_point == list(pts[0].coords)


@pytest.mark.parametrize("name", FOUR_DIMENSIONAL)
def test_weyl_kernel_matches_index_by_index_assembly(
    classifier, engine, ladder, entry, points, name
):
    """Test the flattened-matrix kernel against a loop-built Weyl matrix."""
    m = entry(name).metric
    for p in points(name, 3):
        packet = engine.packet(m, p)
        kernel = classifier.weakly_cf_kernel(m, p)
        loops = _flat_weyl_by_loops(packet.weyl04.components, packet.g_inv)
        tol = ladder.derived * (1.0 + packet.riem04.norm())
        expected = _kernel_projector(loops, tol)
        basis = np.array([v.components for v in kernel.basis]).reshape(-1, m.dim)
        assert kernel.dimension == basis.shape[0]
        np.testing.assert_allclose(basis.T @ basis, expected, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(min_value=-3.0, max_value=3.0),
    b=st.floats(min_value=-3.0, max_value=3.0),
    u=st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=4, max_size=4),
    noise=st.floats(min_value=0.0, max_value=1e-3),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_loosening_tolerance_never_retracts_a_fit(a, b, u, noise, seed):
    """Test that a quasi-Einstein verdict stays true as the tolerance grows."""
    g = np.diag([-1.0, 1.0, 1.0, 1.0])
    e = np.random.default_rng(seed).normal(size=(4, 4))
    ric = a * g + b * np.outer(u, u) + noise * (e + e.T)
    verdicts = [
        fit_quasi_einstein(g, ric, tol).verdict for tol in INCREASING_TOLERANCES
    ]
    assert verdicts == sorted(verdicts)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=10))
def test_loosening_tolerance_never_retracts_a_predicate(residuals):
    """Test the same monotonicity for aggregated predicates."""
    points = [[float(i)] for i in range(len(residuals))]
    verdicts = [
        PredicateResult.aggregate("p", residuals, points, tol).verdict
        for tol in INCREASING_TOLERANCES
    ]
    assert verdicts == sorted(verdicts)


def test_explicit_tolerance_is_honoured(classifier, entry, points):
    """Test that an explicit tolerance is used as given and zero is rejected."""
    m = entry("sphere_4").metric
    pts = points("sphere_4", 2)
    assert classifier.is_einstein(m, pts).threshold == classifier.ladder.theorem
    assert classifier.is_einstein(m, pts, tol=1e-3).threshold == 1e-3
    with pytest.raises(InvalidArgumentError):
        classifier.is_einstein(m, pts, tol=0.0)
    with pytest.raises(InvalidArgumentError):
        classifier.quasi_einstein_fit(m, pts[0], tol=0.0)
