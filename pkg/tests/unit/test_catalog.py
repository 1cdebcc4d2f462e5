"""Unit tests for the built-in catalog and the point sampler."""

import numpy as np
import pytest

from curvlab.core.metric import DomainBox, metric_jets
from curvlab.exceptions import CatalogLookupError, InvalidArgumentError
from curvlab.models.catalog import EntryKind, Expectation, Procedure, Provenance
from curvlab.services.catalog import (
    catalog_entries,
    entry_points,
    get_entry,
    sample_points,
)

REQUIRED = (
    "euclidean_4",
    "minkowski_4",
    "sphere_4",
    "hyperbolic_4",
    "frw_s3",
    "frw_flat",
    "warped_s2xs2",
    "warped_s2xr",
    "pp_wave_4",
    "sasakian_r3",
    "sasakian_r5",
    "nil3",
)


def test_catalog_has_required_entries():
    """Test that the documented fixtures exist with unique names."""
    entries = catalog_entries()
    names = [e.name for e in entries]
    assert len(names) == len(set(names))
    assert len(names) >= 13
    assert set(REQUIRED) <= set(names)


def test_every_entry_documents_expectations():
    """Test that each entry carries at least one expectation with a provenance tag."""
    for entry in catalog_entries():
        assert entry.expected, entry.name
        assert all(isinstance(e.provenance, Provenance) for e in entry.expected)


def test_entry_kinds_match_definitions():
    """Test the kind of a few representative entries."""
    assert get_entry("frw_s3").kind is EntryKind.WARPED
    assert get_entry("nil3").kind is EntryKind.CONTACT
    assert get_entry("pp_wave_4").kind is EntryKind.PLAIN
    assert get_entry("sasakian_r5").dim == 5


def test_lookup_accepts_prefix():
    """Test that the catalog: prefix is optional."""
    assert get_entry("catalog:sphere_4") is get_entry("sphere_4")


def test_lookup_suggests_close_names():
    """Test that an unknown name fails with suggestions and the structural exit code."""
    with pytest.raises(CatalogLookupError) as info:
        get_entry("sphere4")
    assert "sphere_4" in str(info.value)
    assert info.value.exit_code == 2


def test_sampler_is_deterministic():
    """Test that a seed fixes the points and a different seed changes them."""
    domain = get_entry("sphere_4").domain
    first = sample_points(domain, seed=7, count=10)
    again = sample_points(domain, seed=7, count=10)
    other = sample_points(domain, seed=8, count=10)
    assert first == again
    assert first != other
    assert len(first) == 10


def test_sampler_respects_margin():
    """Test that points stay inside the margin-shrunk box."""
    domain = DomainBox.of((0.0, 1.0), (-2.0, 2.0))
    shrunk = domain.shrink(0.25)
    for p in sample_points(domain, seed=1, count=200, margin=0.25):
        assert shrunk.contains(p)
        assert 0.25 <= p.coords[0] <= 0.75
        assert -1.0 <= p.coords[1] <= 1.0


def test_sampler_rejects_bad_arguments():
    """Test the count and margin guards."""
    domain = DomainBox.of((0.0, 1.0))
    with pytest.raises(InvalidArgumentError):
        sample_points(domain, seed=0, count=0)
    with pytest.raises(InvalidArgumentError):
        sample_points(domain, seed=0, count=3, margin=0.5)


def test_entry_points_use_entry_domain():
    """Test that entry points lie in the entry's chart."""
    entry = get_entry("frw_s3")
    pts = entry_points(entry, seed=0, count=5)
    assert all(entry.domain.contains(p) for p in pts)
    assert all(p.dim == 4 for p in pts)


def test_expectation_describe():
    """Test the one-line rendering of an expectation."""
    e = Expectation(
        Procedure.CLASSIFY,
        "einstein",
        True,
        Provenance.DERIVED,
        {"einstein_constant": 3.0},
        "unit sphere",
    )
    assert e.describe() == (
        "classify.einstein = true (einstein_constant=3)  [DERIVED] unit sphere"
    )
    bare = Expectation(Procedure.WARPED, "bach_flat", False, Provenance.PAPER)
    assert bare.describe() == "warped.bach_flat = false  [PAPER]"


def test_pp_wave_profile_sources_null_dust(engine, entry, points):
    """Test the wave profile's transverse Laplacian -4 and Ric = 2 du (x) du."""
    m = entry("pp_wave_4").metric
    expected = np.zeros((4, 4))
    expected[0, 0] = 2.0
    for p in points("pp_wave_4", 3):
        jets = metric_jets(m, p, 2)
        laplacian = jets.partial((0, 0, 2, 0)) + jets.partial((0, 0, 0, 2))
        assert laplacian[0, 0] == pytest.approx(-4.0)
        ric, _, _ = engine.ricci_scalar(m, p)
        np.testing.assert_allclose(ric.components, expected, atol=1e-9)
