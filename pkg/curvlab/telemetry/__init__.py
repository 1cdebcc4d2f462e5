"""Telemetry package for logging and OpenTelemetry instrumentation."""

from curvlab.telemetry.logging import setup_logging
from curvlab.telemetry.tracing import get_tracer, setup_telemetry, shutdown_telemetry

__all__ = [
    "setup_logging",
    "setup_telemetry",
    "shutdown_telemetry",
    "get_tracer",
]
