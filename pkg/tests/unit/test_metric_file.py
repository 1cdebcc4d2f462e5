"""Unit tests for metric definition files."""

import numpy as np
import pytest

from curvlab.cli.metric_file import (
    AnalysisDefaults,
    dump_definition,
    dump_entry,
    load_metric_file,
    parse_metric_file,
)
from curvlab.core.metric import Point, metric_value
from curvlab.exceptions import MetricFileError
from curvlab.models.catalog import EntryKind
from curvlab.models.contact import ContactStructure
from curvlab.models.warped import WarpedProductSpec
from curvlab.services.analysis_service import metric_of

EXPORTED = (
    "frw_s3",
    "warped_s2xr",
    "sphere_4",
    "pp_wave_4",
    "sasakian_r5",
    "contact_e2_group",
)

PLANE = """\
[metric]
version = 1
kind = plain
label = plane
dimension = 2
coordinates = x, y
signature = +, +

[components]
g_{x,x} = 1 + y^2
g_{y,y} = 1

[domain]
x = (-1, 1)
y = (0, pi / 2)
"""


def _middle(domain) -> Point:
    return Point(tuple((iv.lower + iv.upper) / 2 for iv in domain.intervals))


def test_parse_plain_definition():
    """Test a minimal plain definition with an expression in the domain."""
    parsed = parse_metric_file(PLANE)
    assert parsed.kind is EntryKind.PLAIN
    assert parsed.label == "plane"
    m = parsed.definition
    assert m.coord_names == ("x", "y")
    assert m.domain.intervals[1].upper == pytest.approx(np.pi / 2)
    assert parsed.analysis == AnalysisDefaults()


def test_digit_component_form():
    """Test the 0-based g_ij spelling of components."""
    text = PLANE.replace("g_{x,x} = 1 + y^2", "g_00 = 1 + y^2")
    text = text.replace("g_{y,y} = 1", "g_11 = 1")
    m = parse_metric_file(text).definition
    p = _middle(m.domain)
    assert metric_value(m, p)[0, 0] == pytest.approx(1.0 + p.coords[1] ** 2)


def test_expression_error_column():
    """Test that an expression error points at the offending byte of the line."""
    text = PLANE.replace("g_{x,x} = 1 + y^2", "g_{x,x} = 1 + $")
    with pytest.raises(MetricFileError) as info:
        parse_metric_file(text)
    assert info.value.line == 10
    assert info.value.column == 15
    assert info.value.exit_code == 2


def test_unknown_stanza_and_stray_lines():
    """Test rejection of unknown stanzas, stray text and repeated keys."""
    with pytest.raises(MetricFileError) as info:
        parse_metric_file(PLANE + "\n[tensors]\n")
    assert "tensors" in str(info.value)
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE + "just words\n")
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE.replace("g_{y,y} = 1", "g_{y,y} = 1\ng_{y,y} = 2"))


def test_structural_mistakes():
    """Test version, kind, dimension and domain checks."""
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE.replace("version = 1", "version = 2"))
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE.replace("kind = plain", "kind = kahler"))
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE.replace("dimension = 2", "dimension = 3"))
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE.replace("y = (0, pi / 2)\n", ""))
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE.replace("x = (-1, 1)", "x = (1, -1)"))
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE.replace("g_{y,y} = 1", "g_{y,x} = 0\ng_{x,y} = 0"))


def test_analysis_defaults():
    """Test the optional analysis stanza and its guards."""
    stanza = "\n[analysis]\nseed = 3\npoints = 7\ntol_theorem = 1e-5\n"
    parsed = parse_metric_file(PLANE + stanza)
    assert parsed.analysis.seed == 3
    assert parsed.analysis.points == 7
    tolerances = parsed.analysis.tolerances()
    assert tolerances == {"structural": None, "derived": None, "theorem": 1e-5}
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE + "\n[analysis]\npoints = 0\n")
    with pytest.raises(MetricFileError):
        parse_metric_file(PLANE + "\n[analysis]\nworkers = 2\n")


def test_warped_definition_with_catalog_fiber():
    """Test a warped definition referring to a catalog fiber."""
    text = """\
[metric]
version = 1
kind = warped
label = closed_frw

[warped]
epsilon = -1
base = t
f = cosh(t)
interval = (0.5, 1.5)
fiber = catalog:sphere_3
"""
    with pytest.raises(MetricFileError):
        parse_metric_file(text)
    spec = parse_metric_file(text.replace("cosh(t)", "exp(t)")).definition
    assert isinstance(spec, WarpedProductSpec)
    assert spec.dim == 4
    assert spec.fiber.label == "sphere_3"


@pytest.mark.parametrize("name", EXPORTED)
def test_dump_parse_round_trip(entry, name):
    """Test that exported catalog entries parse back to the same metric values."""
    original = entry(name)
    parsed = parse_metric_file(dump_entry(original))
    assert parsed.kind is original.kind
    m = metric_of(parsed.definition)
    assert m.coord_names == original.metric.coord_names
    assert m.signature == original.metric.signature
    for a, b in zip(m.domain.intervals, original.domain.intervals):
        assert a.lower == pytest.approx(b.lower, abs=1e-15)
        assert a.upper == pytest.approx(b.upper, abs=1e-15)
    p = _middle(original.domain)
    np.testing.assert_allclose(
        metric_value(m, p), metric_value(original.metric, p), rtol=1e-14, atol=1e-14
    )
    if isinstance(original.definition, ContactStructure):
        assert parsed.definition.eta == original.definition.eta
        assert parsed.definition.phi == original.definition.phi


def test_dump_definition_with_analysis(entry):
    """Test that analysis defaults survive a round trip."""
    defaults = AnalysisDefaults(seed=5, points=9)
    text = dump_definition(entry("sphere_4").definition, defaults)
    assert parse_metric_file(text).analysis == defaults


def test_load_metric_file(tmp_path):
    """Test reading from disk and the error for a missing file."""
    path = tmp_path / "plane.metric"
    path.write_text(PLANE, encoding="utf-8")
    assert load_metric_file(path).label == "plane"
    with pytest.raises(MetricFileError):
        load_metric_file(tmp_path / "missing.metric")
