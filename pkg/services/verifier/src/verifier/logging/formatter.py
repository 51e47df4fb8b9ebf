"""Log formatters: single-line JSON for collection, annotated text for terminals."""

import json
import logging
from datetime import UTC, datetime

# Attributes the harness attaches through ``extra=``.
CONTEXT_FIELDS = ("lemma", "instance", "seed")


def record_context(record: logging.LogRecord) -> dict[str, object]:
    """The check context carried by ``record``, in ``CONTEXT_FIELDS`` order."""
    return {name: value for name in CONTEXT_FIELDS if (value := getattr(record, name, None)) is not None}


class JSONLogFormatter(logging.Formatter):
    """Emit log records as single-line JSON objects.

    Output format::

        {"timestamp": "...", "level": "ERROR", "service": "verifier",
         "logger": "verifier.harness", "message": "...", "lemma": "enl2", "instance": 3, "seed": 7}
    """

    def __init__(self, service: str) -> None:
        super().__init__()
        self._service = service

    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, object] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=UTC).isoformat(),
            "level": record.levelname,
            "service": self._service,
            "logger": record.name,
            "message": record.getMessage(),
            **record_context(record),
        }
        if record.exc_info and record.exc_info[1] is not None:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


class ContextTextFormatter(logging.Formatter):
    """``time - logger - LEVEL - message [lemma=... instance=...]``."""

    def __init__(self) -> None:
        super().__init__("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        context = record_context(record)
        if not context:
            return line
        return f"{line} [{' '.join(f'{k}={v}' for k, v in context.items())}]"
