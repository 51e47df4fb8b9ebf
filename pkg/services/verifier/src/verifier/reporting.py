"""Serialization of check reports: JSON documents and per-instance CSV rows."""

import csv
import io
import json
import math
from typing import Any

import numpy as np

from verifier.schemas import CheckReport

ROW_FIELDS = ["instance", "lhs", "rhs", "ratio", "skipped", "violation", "searched"]


def round_floats(value: Any, digits: int) -> Any:
    """Round every float to ``digits`` significant digits; non-finite floats become ``None``."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(format(value, f".{digits}g"))
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [round_floats(v, digits) for v in value]
    return value


def render_document(document: Any, digits: int = 17) -> str:
    """Any JSON-compatible document with the report float conventions."""
    return json.dumps(round_floats(document, digits), indent=2) + "\n"


def render_json(report: CheckReport, digits: int = 17) -> str:
    return render_document(report.model_dump(mode="python", exclude={"rows"}), digits)


def render_csv(report: CheckReport, digits: int = 17) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=ROW_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        record = round_floats(row.model_dump(mode="python"), digits)
        writer.writerow({k: "" if record[k] is None else record[k] for k in ROW_FIELDS})
    return buffer.getvalue()
