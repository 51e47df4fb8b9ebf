"""Structured logging: formatters and setup."""

from verifier.logging.formatter import ContextTextFormatter, JSONLogFormatter
from verifier.logging.setup import configure_logging

__all__ = ["ContextTextFormatter", "JSONLogFormatter", "configure_logging"]
