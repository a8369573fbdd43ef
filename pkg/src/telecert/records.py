"""Bit-exact data formats: JSON records and CSV emission.

Every record is JSON with sorted keys, fixed separators and shortest
round-trip float text, so encode -> decode -> encode is byte-identical.
Process matrices are stored entrywise as [re, im] pairs in the fixed
matrix-unit basis E1=|0><0|, E2=|0><1|, E3=|1><0|, E4=|1><1|; a record
with any other basis tag is rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import ValidationError
from .linalg import hermiticity_defect
from .tomography import ConditionalProbTable

PROCESS_MATRIX_SCHEMA = "process-matrix/v1"
PROB_TABLE_SCHEMA = "prob-table/v1"
COUNT_TABLE_SCHEMA = "count-table/v1"
TRANSITION_SCHEMA = "transition-matrix/v1"
BASIS_TAG = "matrix-unit-E1..E4"

_ROW_KEYS = ["v1+", "v1-", "v2+", "v2-", "v3+", "v3-"]
_OUT_KEYS = ["v1", "v2", "v3"]


def _dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def _loads(text: str, what: str) -> dict:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed {what} record: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValidationError(f"malformed {what} record: expected a JSON object")
    return payload


def _require_schema(payload: dict, expected: str, what: str) -> None:
    schema = payload.get("schema")
    if schema != expected:
        raise ValidationError(
            f"schema mismatch for {what}: expected {expected!r}, got {schema!r}"
        )


def _check_finite(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{what} contains a non-finite value")
    return value


def process_matrix_payload(chi: np.ndarray, metadata: dict | None = None) -> dict:
    """Record payload for a process matrix (the object behind the JSON text)."""
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (4, 4):
        raise ValidationError(f"process matrix must be 4x4, got {chi.shape}")
    entries = [
        [
            [
                _check_finite(chi[r, c].real, "process matrix"),
                _check_finite(chi[r, c].imag, "process matrix"),
            ]
            for c in range(4)
        ]
        for r in range(4)
    ]
    return {
        "schema": PROCESS_MATRIX_SCHEMA,
        "basis": BASIS_TAG,
        "entries": entries,
        "metadata": metadata or {},
    }


def encode_process_matrix(chi: np.ndarray, metadata: dict | None = None) -> str:
    """Serialise a process matrix; field order is deterministic."""
    return _dumps(process_matrix_payload(chi, metadata))


def decode_process_matrix(text: str) -> tuple[np.ndarray, dict]:
    """Parse and validate a process-matrix record.

    Distinct diagnostics for schema mismatch, basis-tag mismatch and
    non-Hermitian payloads (beyond 1e-9).
    """
    payload = _loads(text, "process matrix")
    _require_schema(payload, PROCESS_MATRIX_SCHEMA, "process matrix")
    if payload.get("basis") != BASIS_TAG:
        raise ValidationError(
            f"basis tag mismatch: expected {BASIS_TAG!r}, got {payload.get('basis')!r}"
        )
    entries = payload.get("entries")
    try:
        arr = np.array(
            [[complex(e[0], e[1]) for e in row] for row in entries], dtype=complex
        )
    except (TypeError, IndexError) as exc:
        raise ValidationError(f"malformed process-matrix entries: {exc}") from exc
    if arr.shape != (4, 4):
        raise ValidationError(f"process matrix entries must be 4x4, got {arr.shape}")
    defect = hermiticity_defect(arr)
    if defect > 1e-9:
        raise ValidationError(
            f"process-matrix payload is not Hermitian: max |M - M^dagger| = {defect:.3e}"
        )
    return arr, payload.get("metadata", {})


def _encode_table(probs_or_counts: np.ndarray, schema: str) -> str:
    rows = {}
    for i in range(3):
        for s, sign in enumerate("+-"):
            key = f"v{i + 1}{sign}"
            rows[key] = {
                f"v{j + 1}": [
                    _check_finite(probs_or_counts[i, s, j, 0], "table"),
                    _check_finite(probs_or_counts[i, s, j, 1], "table"),
                ]
                for j in range(3)
            }
    return _dumps({"schema": schema, "rows": rows})


def encode_prob_table(table: ConditionalProbTable) -> str:
    return _encode_table(table.probs, PROB_TABLE_SCHEMA)


def encode_count_table(counts: np.ndarray) -> str:
    counts = np.asarray(counts)
    return _encode_table(counts, COUNT_TABLE_SCHEMA)


def _decode_table(text: str, schema: str, what: str) -> np.ndarray:
    payload = _loads(text, what)
    _require_schema(payload, schema, what)
    rows = payload.get("rows")
    if not isinstance(rows, dict):
        raise ValidationError(f"{what} record is missing its rows object")
    arr = np.empty((3, 2, 3, 2))
    for i in range(3):
        for s, sign in enumerate("+-"):
            key = f"v{i + 1}{sign}"
            if key not in rows:
                raise ValidationError(f"{what} record is missing row {key!r}")
            row = rows[key]
            for j, out_key in enumerate(_OUT_KEYS):
                if out_key not in row:
                    raise ValidationError(
                        f"{what} record row {key!r} is missing output {out_key!r}"
                    )
                pair = row[out_key]
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ValidationError(
                        f"{what} record row {key!r}, output {out_key!r} "
                        "must be a [plus, minus] pair"
                    )
                arr[i, s, j, 0] = _check_finite(pair[0], what)
                arr[i, s, j, 1] = _check_finite(pair[1], what)
    return arr


def decode_prob_table(text: str, renormalize: bool = False) -> tuple[ConditionalProbTable, float]:
    """Parse a probability table; optionally renormalise noisy pairs.

    With ``renormalize`` each (input, output-property) pair with positive
    sum is scaled to sum 1; the largest adjustment applied is returned so
    callers can record it.  Without it the table must already satisfy the
    normalisation invariant.
    """
    arr = _decode_table(text, PROB_TABLE_SCHEMA, "probability table")
    adjustment = 0.0
    if renormalize:
        sums = arr.sum(axis=3)
        if np.any(sums <= 0):
            raise ValidationError("probability table has a non-positive pair sum")
        adjustment = float(np.max(np.abs(sums - 1.0)))
        arr = arr / sums[..., None]
    table = ConditionalProbTable(probs=arr)
    table.validate()
    return table, adjustment


def decode_count_table(text: str) -> np.ndarray:
    arr = _decode_table(text, COUNT_TABLE_SCHEMA, "count table")
    if np.any(arr < 0):
        raise ValidationError("count table has negative tallies")
    return arr


def encode_transition_matrix(omega: np.ndarray, metadata: dict | None = None) -> str:
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (8, 8):
        raise ValidationError(f"transition matrix must be 8x8, got {omega.shape}")
    entries = [[_check_finite(x, "transition matrix") for x in row] for row in omega]
    return _dumps(
        {"schema": TRANSITION_SCHEMA, "entries": entries, "metadata": metadata or {}}
    )


def decode_transition_matrix(text: str) -> np.ndarray:
    payload = _loads(text, "transition matrix")
    _require_schema(payload, TRANSITION_SCHEMA, "transition matrix")
    entries = payload.get("entries")
    arr = np.asarray(entries, dtype=float)
    if arr.shape != (8, 8):
        raise ValidationError(f"transition matrix entries must be 8x8, got {arr.shape}")
    return arr


def format_value(value) -> str:
    """Shortest round-trip text for CSV cells."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(header: list[str], rows: list[list]) -> str:
    """CSV with mandatory header, UNIX line endings, round-trip numbers."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()
