"""Logging configuration for the command-line front end."""

import json
import logging
import logging.config
from typing import Any

from curvlab.config import Settings, settings


class JsonFormatter(logging.Formatter):
    """One JSON object per record."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "time": self.formatTime(record),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload)


def setup_logging(config: Settings | None = None, level: str | None = None) -> None:
    """Configure the ``curvlab`` logger hierarchy to write to stderr.

    Args:
        config: Settings to read; defaults to the global instance
        level: Override of the configured level
    """
    config = config or settings
    formatter = "json" if config.log_format == "json" else "text"
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "text": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
                "json": {"()": JsonFormatter},
            },
            "handlers": {
                "stderr": {
                    "class": "logging.StreamHandler",
                    "stream": "ext://sys.stderr",
                    "formatter": formatter,
                }
            },
            "loggers": {
                "curvlab": {
                    "handlers": ["stderr"],
                    "level": (level or config.log_level).upper(),
                    "propagate": False,
                }
            },
        }
    )
