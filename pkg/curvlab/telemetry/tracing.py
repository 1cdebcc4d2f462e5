"""OpenTelemetry tracing configuration."""

from opentelemetry import trace
from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import (
    BatchSpanProcessor,
    ConsoleSpanExporter,
    SpanExporter,
)

from curvlab import __version__
from curvlab.config import Settings, settings

_provider: TracerProvider | None = None


def _exporter(config: Settings) -> SpanExporter:
    if config.otel_traces_exporter == "console":
        return ConsoleSpanExporter()
    return OTLPSpanExporter(
        endpoint=config.otel_exporter_otlp_endpoint,
        insecure=True,  # Use insecure for local collectors
    )


def setup_telemetry(config: Settings | None = None) -> bool:
    """Install a tracer provider when tracing is enabled.

    Args:
        config: Settings to read; defaults to the global instance

    Returns:
        bool: Whether a provider was installed
    """
    global _provider
    config = config or settings
    if not config.otel_enabled or _provider is not None:
        return _provider is not None

    resource = Resource.create(
        {
            "service.name": config.otel_service_name,
            "service.version": __version__,
            "deployment.environment": config.app_env,
        }
    )
    _provider = TracerProvider(resource=resource)
    _provider.add_span_processor(BatchSpanProcessor(_exporter(config)))
    trace.set_tracer_provider(_provider)
    return True


def shutdown_telemetry() -> None:
    """Flush pending spans before the process exits."""
    if _provider is not None:
        _provider.shutdown()


def get_tracer(name: str) -> trace.Tracer:
    """Get a tracer instance.

    Args:
        name: Tracer name (typically module name)

    Returns:
        trace.Tracer: Tracer instance
    """
    return trace.get_tracer(name)
