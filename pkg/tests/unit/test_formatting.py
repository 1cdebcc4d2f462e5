"""Unit tests for report rendering."""

from curvlab.cli.formatting import (
    parse_machine,
    render,
    render_catalog_list,
    render_entry,
    render_machine,
    table,
)
from curvlab.schemas.report import (
    AssertionResult,
    ClassificationReport,
    PredicateResult,
    Report,
    ToleranceLadder,
)
from curvlab.services.catalog import catalog_entries, get_entry


def _report() -> Report:
    witnesses = [[0.1, 0.2], [0.3, 0.4]]
    classification = ClassificationReport(
        metric_label="toy",
        points_used=2,
        predicates=[
            PredicateResult.aggregate("einstein", [1e-12, 3e-12], witnesses, 1e-8),
            PredicateResult.aggregate(
                "constant_curvature", [0.5, 1e-12], witnesses, 1e-8
            ),
        ],
        constants={"einstein_constant": 3.0, "sectional_constant": None},
    )
    return Report(
        tool_version="0.1.0",
        command="analyze",
        target="catalog:toy",
        input_digest="sha256:00",
        seed=0,
        points=2,
        tolerances=ToleranceLadder(),
        tolerance_source={
            "structural": "settings",
            "derived": "flag",
            "theorem": "settings",
        },
        classification=classification,
        assertions=[
            AssertionResult(
                name="check", passed=False, entry="toy", residual=0.25, detail="off"
            )
        ],
        sections={"warped": {"conditions_agree": True}},
        notes=["a note"],
    )


def test_machine_output_round_trips():
    """Test that the machine document parses back to an equal report."""
    report = _report()
    text = render_machine(report)
    assert parse_machine(text) == report
    assert render_machine(parse_machine(text)) == text
    assert render(report, "machine") == text


def test_text_output_lists_predicates_and_assertions():
    """Test the main blocks of the text report."""
    text = render(_report(), "text")
    assert "classification of toy (2 points)" in text
    assert "derived=1e-08 (flag)" in text
    assert "einstein_constant: 3" in text
    assert "sectional_constant" not in text
    assert "conditions_agree: true" in text
    assert "assertions (0/1 passed)" in text
    assert "FAIL" in text
    assert "(0.1, 0.2)" in text


def test_predicate_witness_in_table():
    """Test that a failing predicate shows its first failing point."""
    report = _report()
    failing = report.classification.predicate("constant_curvature")
    assert failing.witness_point == [0.1, 0.2]
    assert not failing.verdict


def test_table_alignment():
    """Test the fixed-width table layout."""
    lines = table(("a", "long header"), [["x", 1.5], ["yy", True]])
    assert lines[0] == "a   long header"
    assert lines[1] == "--  -----------"
    assert lines[2] == "x   1.5"
    assert lines[3] == "yy  true"


def test_catalog_rendering():
    """Test the catalog listing and the entry summary."""
    listing = render_catalog_list(catalog_entries())
    assert listing.count("\n") == len(catalog_entries()) + 2
    assert "frw_s3" in listing and "warped" in listing
    shown = render_entry(get_entry("s2xr"))
    assert shown.startswith("s2xr (plain, dimension 3)")
    assert "classify.quasi_einstein = true" in shown
    assert "[DERIVED]" in shown
