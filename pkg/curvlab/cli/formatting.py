"""Text and machine renderings of reports and catalog listings."""

from __future__ import annotations

from typing import Any, Iterable, Sequence

from curvlab.models.catalog import CatalogEntry
from curvlab.schemas.report import AssertionResult, PredicateResult, Report

OUTPUT_FORMATS = ("text", "machine")
PREDICATE_HEADERS = ("predicate", "verdict", "max residual", "threshold", "witness")
ASSERTION_HEADERS = ("result", "entry", "assertion", "residual", "detail")


def render_machine(report: Report) -> str:
    """Self-describing JSON document; identical reports give identical bytes."""
    return report.model_dump_json(indent=2) + "\n"


def parse_machine(text: str) -> Report:
    return Report.model_validate_json(text)


def _number(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> list[str]:
    """Left-aligned fixed-width table."""
    cells = [[_number(c) if not isinstance(c, str) else c for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += [
        "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells
    ]
    return lines


def _witness(point: Sequence[float] | None) -> str:
    if point is None:
        return "-"
    return "(" + ", ".join(f"{x:.4g}" for x in point) + ")"


def _predicate_rows(predicates: Sequence[PredicateResult]) -> list[list[Any]]:
    return [
        [
            p.name,
            _number(p.verdict),
            p.max_residual,
            p.threshold,
            _witness(p.witness_point),
        ]
        for p in predicates
    ]


def _assertion_rows(assertions: Sequence[AssertionResult]) -> list[list[Any]]:
    return [
        [
            "PASS" if a.passed else "FAIL",
            a.entry or "-",
            a.name,
            a.residual,
            a.detail or "",
        ]
        for a in assertions
    ]


def _section_lines(name: str, value: Any, indent: str = "  ") -> list[str]:
    if isinstance(value, dict):
        scalars = {k: v for k, v in value.items() if not isinstance(v, (dict, list))}
        if not scalars:
            return []
        return [f"{indent}{name}:"] + [
            f"{indent}  {k}: {_number(v)}" for k, v in scalars.items()
        ]
    if isinstance(value, list):
        preds = [
            v for v in value if isinstance(v, dict) and "verdict" in v and "name" in v
        ]
        if preds:
            return [f"{indent}{name}:"] + [
                f"{indent}  {p['name']}: {_number(p['verdict'])} "
                f"(max residual {_number(p['max_residual'])})"
                for p in preds
            ]
        return []
    return [f"{indent}{name}: {_number(value)}"]


def render_text(report: Report) -> str:
    """Human-readable tabular report."""
    lines = [
        f"{report.tool} {report.tool_version}  {report.command} {report.target}",
        f"input digest  {report.input_digest}",
        f"seed {report.seed}, {report.points} points",
        "tolerances    "
        + ", ".join(
            f"{rung}={getattr(report.tolerances, rung):g} "
            f"({report.tolerance_source.get(rung, 'settings')})"
            for rung in ("structural", "derived", "theorem")
        ),
    ]
    if report.classification is not None:
        c = report.classification
        lines += ["", f"classification of {c.metric_label} ({c.points_used} points)"]
        lines += table(PREDICATE_HEADERS, _predicate_rows(c.predicates))
        constants = {k: v for k, v in c.constants.items() if v is not None}
        if constants:
            lines += ["", "constants"]
            lines += [f"  {k}: {_number(v)}" for k, v in constants.items()]
    for name, value in report.sections.items():
        section = _section_lines(name, value)
        if section:
            lines += [""] + section
    if report.assertions:
        passed = sum(a.passed for a in report.assertions)
        lines += ["", f"assertions ({passed}/{len(report.assertions)} passed)"]
        lines += table(ASSERTION_HEADERS, _assertion_rows(report.assertions))
    if report.notes:
        lines += ["", "notes"] + [f"  {n}" for n in report.notes]
    return "\n".join(lines) + "\n"


def render(report: Report, output_format: str) -> str:
    return render_machine(report) if output_format == "machine" else render_text(report)


def render_catalog_list(entries: Sequence[CatalogEntry]) -> str:
    rows = [[e.name, e.kind.value, str(e.dim), e.notes] for e in entries]
    return "\n".join(table(("name", "kind", "dim", "notes"), rows)) + "\n"


def render_entry(entry: CatalogEntry) -> str:
    """Definition summary and the documented expectations with provenance tags."""
    m = entry.metric
    lines = [f"{entry.name} ({entry.kind.value}, dimension {entry.dim})"]
    if entry.notes:
        lines.append(f"  {entry.notes}")
    lines += [
        f"  coordinates: {', '.join(m.coord_names)}",
        f"  signature:   {', '.join('+' if s > 0 else '-' for s in m.signature)}",
        "  domain:      "
        + " x ".join(f"({iv.lower:.4g}, {iv.upper:.4g})" for iv in m.domain.intervals),
        "",
        "expected",
    ]
    lines += [f"  {e.describe()}" for e in entry.expected]
    return "\n".join(lines) + "\n"
