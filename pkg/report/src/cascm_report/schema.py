"""Result-file schema: loading and validation.

The benchmark CLI emits one row per run with a fixed header; this module is
the only place that knows those column names.  CSV and JSON-lines carry the
same values, so both load into the same plain-dict rows with typed fields.
"""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path

#: The benchmark CLI's output schema, in header order.
SCHEMA_COLUMNS = (
    "bench", "policy", "threads", "run_index", "seed",
    "successes", "failures", "ops", "wall_time_s", "throughput",
    "jain", "norm_stdev",
    "waiting_time_ms", "exp_threshold", "c", "m", "conc", "slice",
    "contention_threshold", "num_ops", "max_wait_ms",
)

_INT_COLUMNS = frozenset({
    "threads", "run_index", "seed", "successes", "failures", "ops",
    "exp_threshold", "c", "m", "conc", "slice", "contention_threshold",
    "num_ops",
})
_FLOAT_COLUMNS = frozenset({
    "wall_time_s", "throughput", "jain", "norm_stdev",
    "waiting_time_ms", "max_wait_ms",
})


class SchemaError(ValueError):
    """Input rows do not carry the benchmark output schema."""


def _coerce(row: dict) -> dict:
    out = {}
    for name in SCHEMA_COLUMNS:
        value = row[name]
        try:
            if name in _INT_COLUMNS:
                out[name] = int(value)
            elif name in _FLOAT_COLUMNS:
                out[name] = float(value)
            else:
                out[name] = str(value)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"column {name!r}: bad value {value!r}") from exc
    return out


def validate_rows(raw_rows) -> list[dict]:
    """Check raw mapping rows against the schema and coerce field types.

    Missing schema columns are an error; unknown extra columns are dropped
    with a warning (newer producers may add fields).
    """
    rows = []
    warned: set[str] = set()
    for index, raw in enumerate(raw_rows):
        missing = [c for c in SCHEMA_COLUMNS if c not in raw]
        if missing:
            raise SchemaError(
                f"row {index} is missing column(s): {', '.join(missing)}")
        for name in raw:
            if name not in SCHEMA_COLUMNS and name not in warned:
                warned.add(name)
                warnings.warn(f"ignoring unknown column {name!r}",
                              stacklevel=2)
        rows.append(_coerce(raw))
    return rows


def load_rows(path: str | Path) -> list[dict]:
    """Load benchmark rows from a CSV or JSON-lines result file."""
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise SchemaError(f"{path} is empty")
    first = text.lstrip()[0]
    if first == "{":  # JSON-lines: one object per line
        raw = [json.loads(line) for line in text.splitlines() if line.strip()]
    else:
        raw = list(csv.DictReader(text.splitlines()))
    if not raw:
        raise SchemaError(f"{path} holds no rows")
    return validate_rows(raw)
