"""Command implementations behind the ``curvlab`` entry point."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

from curvlab import __version__
from curvlab.cli.formatting import render_catalog_list, render_entry
from curvlab.cli.metric_file import (
    MetricFile,
    dump_entry,
    load_metric_file,
    parse_metric_file,
)
from curvlab.config import settings
from curvlab.schemas.report import AssertionResult, Report, ToleranceLadder
from curvlab.services.analysis_service import (
    VERIFY_TARGETS,
    AnalysisService,
    check_catalog,
)
from curvlab.services.catalog import catalog_entries, get_entry

logger = logging.getLogger(__name__)

CATALOG_PREFIX = "catalog:"


@dataclass(frozen=True)
class RunOptions:
    """Flags shared by the analysis commands; ``None`` defers to file or settings."""

    seed: int | None = None
    points: int | None = None
    tol_structural: float | None = None
    tol_derived: float | None = None
    tol_theorem: float | None = None
    workers: int | None = None

    def tolerance_flags(self) -> dict[str, float | None]:
        return {
            "structural": self.tol_structural,
            "derived": self.tol_derived,
            "theorem": self.tol_theorem,
        }


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def resolve_target(target: str) -> tuple[MetricFile, str]:
    """Metric file for a path or a ``catalog:<name>`` URI, plus its source text."""
    if target.startswith(CATALOG_PREFIX):
        text = dump_entry(get_entry(target))
        return parse_metric_file(text), text
    metric_file = load_metric_file(target)
    return metric_file, Path(target).read_text(encoding="utf-8")


def resolve_ladder(
    options: RunOptions, file_defaults: dict[str, float | None] | None = None
) -> tuple[ToleranceLadder, dict[str, str]]:
    """Tolerance ladder with the source of each rung: flag, file or settings."""
    flags = options.tolerance_flags()
    file_defaults = file_defaults or {}
    values: dict[str, float | None] = {}
    source: dict[str, str] = {}
    for rung in ("structural", "derived", "theorem"):
        if flags.get(rung) is not None:
            values[rung], source[rung] = flags[rung], "flag"
        elif file_defaults.get(rung) is not None:
            values[rung], source[rung] = file_defaults[rung], "file"
        else:
            source[rung] = "settings"
    return ToleranceLadder.from_settings(**values), source


def cmd_analyze(target: str, options: RunOptions) -> Report:
    """Curvature packets and every applicable predicate for one definition."""
    metric_file, text = resolve_target(target)
    defaults = metric_file.analysis
    seed = _first(options.seed, defaults.seed, settings.default_seed)
    points = _first(options.points, defaults.points, settings.default_points)
    ladder, source = resolve_ladder(options, defaults.tolerances())
    service = AnalysisService(ladder, workers=options.workers)
    outcome = service.analyze(metric_file.definition, seed, points)
    return Report(
        tool_version=__version__,
        command="analyze",
        target=target,
        input_digest=digest(text),
        seed=seed,
        points=points,
        tolerances=ladder,
        tolerance_source=source,
        point_results=outcome.point_results,
        classification=outcome.classification,
        assertions=outcome.assertions,
        sections={"kind": outcome.kind, **outcome.sections},
        notes=outcome.notes,
    )


def cmd_verify_paper(target: str, options: RunOptions) -> Report:
    """One verification suite over its catalog entries."""
    seed = _first(options.seed, None, settings.default_seed)
    points = _first(options.points, None, settings.default_points)
    ladder, source = resolve_ladder(options)
    service = AnalysisService(ladder, workers=options.workers)
    outcome = service.verify(target, seed, points)
    canonical = "".join(dump_entry(get_entry(name)) for name in outcome.entries)
    return Report(
        tool_version=__version__,
        command="verify-paper",
        target=target,
        input_digest=digest(canonical),
        seed=seed,
        points=points,
        tolerances=ladder,
        tolerance_source=source,
        assertions=outcome.assertions,
        sections=outcome.sections,
        notes=outcome.notes,
    )


def cmd_catalog_check(names: list[str] | None, options: RunOptions) -> Report:
    """Reproduce the documented expectations of catalog entries."""
    seed = _first(options.seed, None, settings.default_seed)
    points = _first(options.points, None, settings.default_points)
    ladder, source = resolve_ladder(options)
    service = AnalysisService(ladder, workers=options.workers)
    entries = [get_entry(n) for n in names] if names else catalog_entries()
    assertions: list[AssertionResult] = check_catalog(
        service, [e.name for e in entries], seed, points
    )
    return Report(
        tool_version=__version__,
        command="catalog check",
        target=",".join(e.name for e in entries),
        input_digest=digest("".join(dump_entry(e) for e in entries)),
        seed=seed,
        points=points,
        tolerances=ladder,
        tolerance_source=source,
        assertions=assertions,
    )


def cmd_catalog_list() -> str:
    return render_catalog_list(catalog_entries())


def cmd_catalog_show(name: str) -> str:
    return render_entry(get_entry(name))


def cmd_catalog_export(name: str, output: str | None = None) -> str:
    """Metric file text of an entry, also written to ``output`` when given."""
    text = dump_entry(get_entry(name))
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info("exported %s to %s", name, output)
    return text


def _first(*values: int | None) -> int:
    for value in values:
        if value is not None:
            return value
    raise ValueError("no default available")


__all__ = [
    "RunOptions",
    "VERIFY_TARGETS",
    "cmd_analyze",
    "cmd_verify_paper",
    "cmd_catalog_check",
    "cmd_catalog_list",
    "cmd_catalog_show",
    "cmd_catalog_export",
    "resolve_target",
    "resolve_ladder",
]
