"""Logging configuration for the verifier CLI."""

import logging
import sys

from verifier.constants import LogFormat, ServiceName
from verifier.logging.formatter import ContextTextFormatter, JSONLogFormatter


def configure_logging(
    service: ServiceName = ServiceName.VERIFIER,
    *,
    level: str = "INFO",
    fmt: LogFormat = LogFormat.JSON,
) -> None:
    """Install one stderr handler on the root logger; stdout carries command output only."""
    root = logging.getLogger()
    root.setLevel(level.upper())
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JSONLogFormatter(service=service) if fmt is LogFormat.JSON else ContextTextFormatter())
    root.addHandler(handler)
