"""Tests for JSON and CSV report rendering."""

import json
import math

import numpy as np

from verifier.constants import CheckKind, LemmaId
from verifier.reporting import ROW_FIELDS, render_csv, render_document, render_json, round_floats
from verifier.schemas import CheckReport, InstanceRow


def _report() -> CheckReport:
    return CheckReport(
        lemma=LemmaId.ENL2,
        kind=CheckKind.STRICT,
        instances=2,
        violations=0,
        worst_ratio=0.1 + 0.2,
        estimated_constant=None,
        witness={"instance": 0, "N": 3},
        runtime_ms=None,
        config_echo={"seed": 1},
        rows=[
            InstanceRow(instance=0, lhs=0.1 + 0.2, rhs=1.0, ratio=0.1 + 0.2, skipped=False),
            InstanceRow(instance=1, lhs=None, rhs=None, ratio=None, skipped=True),
        ],
    )


def test_round_floats() -> None:
    """Significant-digit rounding; non-finite values and numpy scalars are normalized."""
    assert round_floats(0.1 + 0.2, 17) == 0.30000000000000004
    assert round_floats(0.1 + 0.2, 3) == 0.3
    assert round_floats({"a": [math.inf, math.nan, 1]}, 17) == {"a": [None, None, 1]}
    value = round_floats(np.float64(2.5), 17)
    assert value == 2.5 and type(value) is float
    assert round_floats((True, "x"), 17) == [True, "x"]


def test_render_json_excludes_rows() -> None:
    text = render_json(_report(), digits=6)
    assert text.endswith("\n")
    document = json.loads(text)
    assert "rows" not in document
    assert document["lemma"] == "enl2"
    assert document["worst_ratio"] == 0.3
    assert document["passed"] is True


def test_render_csv_rows() -> None:
    lines = render_csv(_report()).splitlines()
    assert lines[0] == ",".join(ROW_FIELDS)
    assert lines[1] == "0,0.30000000000000004,1.0,0.30000000000000004,False,False,False"
    assert lines[2] == "1,,,,True,False,False"


def test_render_document_is_stable() -> None:
    document = {"b": 1.0, "a": [1.0 / 3.0]}
    assert render_document(document, 4) == render_document(document, 4)
    assert json.loads(render_document(document, 4)) == {"b": 1.0, "a": [0.3333]}
