"""Command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from curvlab import __version__
from curvlab.cli.commands import (
    RunOptions,
    cmd_analyze,
    cmd_catalog_check,
    cmd_catalog_export,
    cmd_catalog_list,
    cmd_catalog_show,
    cmd_verify_paper,
)
from curvlab.cli.formatting import OUTPUT_FORMATS, render
from curvlab.exceptions import CurvLabError
from curvlab.services.analysis_service import VERIFY_TARGETS
from curvlab.telemetry import setup_logging, setup_telemetry, shutdown_telemetry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ASSERTION = 1


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=None, help="Sampler seed (default from settings: 0)"
    )
    parser.add_argument(
        "--points",
        type=_positive_int,
        default=None,
        help="Number of sample points (default 50)",
    )
    parser.add_argument(
        "--tol-structural",
        type=_positive_float,
        default=None,
        help="Structural tolerance rung",
    )
    parser.add_argument(
        "--tol-derived",
        type=_positive_float,
        default=None,
        help="Derived tolerance rung",
    )
    parser.add_argument(
        "--tol-theorem",
        type=_positive_float,
        default=None,
        help="Theorem tolerance rung",
    )
    parser.add_argument(
        "--format", choices=OUTPUT_FORMATS, default="text", help="Report format"
    )
    parser.add_argument(
        "--workers",
        type=_positive_int,
        default=None,
        help="Threads for point evaluation",
    )
    parser.add_argument(
        "--output", default=None, help="Write the report to this file instead of stdout"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvlab", description="Numerical curvature laboratory"
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument("--log-level", default=None, help="Override CURVLAB_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser(
        "analyze", help="Classify a metric file or catalog:<name>"
    )
    analyze.add_argument("target", help="Metric definition file or catalog:<name>")
    _run_flags(analyze)

    verify = commands.add_parser("verify-paper", help="Run a verification suite")
    verify.add_argument("target", choices=VERIFY_TARGETS)
    _run_flags(verify)

    catalog = commands.add_parser("catalog", help="Inspect the built-in catalog")
    actions = catalog.add_subparsers(dest="action", required=True)
    actions.add_parser("list", help="Names and kinds of all entries")
    show = actions.add_parser("show", help="Definition summary and expectations")
    show.add_argument("name")
    export = actions.add_parser("export", help="Entry as a metric definition file")
    export.add_argument("name")
    export.add_argument("--output", default=None, help="File to write")
    check = actions.add_parser("check", help="Reproduce documented expectations")
    check.add_argument("names", nargs="*")
    _run_flags(check)
    return parser


def _options(args: argparse.Namespace) -> RunOptions:
    return RunOptions(
        seed=args.seed,
        points=args.points,
        tol_structural=args.tol_structural,
        tol_derived=args.tol_derived,
        tol_theorem=args.tol_theorem,
        workers=args.workers,
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(args: argparse.Namespace) -> int:
    """Execute a parsed command and return its exit code."""
    if args.command == "catalog" and args.action in ("list", "show", "export"):
        if args.action == "list":
            sys.stdout.write(cmd_catalog_list())
        elif args.action == "show":
            sys.stdout.write(cmd_catalog_show(args.name))
        else:
            text = cmd_catalog_export(args.name, args.output)
            if not args.output:
                sys.stdout.write(text)
        return EXIT_OK

    options = _options(args)
    if args.command == "analyze":
        report = cmd_analyze(args.target, options)
    elif args.command == "verify-paper":
        report = cmd_verify_paper(args.target, options)
    else:
        report = cmd_catalog_check(args.names or None, options)
    _emit(render(report, args.format), args.output)
    return EXIT_OK if report.passed else EXIT_ASSERTION


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the command and map errors to exit codes.

    Returns:
        int: 0 clean, 1 failed assertion, 2 invalid input, 3 numerical-domain error
    """
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level)
    setup_telemetry()
    try:
        return run(args)
    except CurvLabError as exc:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(f"curvlab: error: {exc}\n")
        return exc.exit_code
    finally:
        shutdown_telemetry()


if __name__ == "__main__":
    sys.exit(main())
