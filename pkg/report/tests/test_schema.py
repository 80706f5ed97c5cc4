"""Result-file loading and validation."""

import json
from pathlib import Path

import pytest

from cascm_report.schema import (SCHEMA_COLUMNS, SchemaError, load_rows,
                                 validate_rows)

FIXTURE = Path(__file__).parent / "fixtures" / "results_48.csv"


def test_load_fixture_csv():
    rows = load_rows(FIXTURE)
    assert len(rows) == 48
    first = rows[0]
    assert set(first) == set(SCHEMA_COLUMNS)
    assert isinstance(first["threads"], int)
    assert isinstance(first["jain"], float)
    assert first["bench"] == "cas"


def test_load_jsonl_equivalent(tmp_path):
    rows = load_rows(FIXTURE)
    jsonl = tmp_path / "rows.jsonl"
    jsonl.write_text("".join(json.dumps(r) + "\n" for r in rows))
    assert load_rows(jsonl) == rows


def test_missing_column_is_an_error(tmp_path):
    bad = tmp_path / "bad.csv"
    lines = FIXTURE.read_text().splitlines()
    # drop the failures column entirely
    idx = lines[0].split(",").index("failures")
    stripped = [",".join(v for i, v in enumerate(line.split(",")) if i != idx)
                for line in lines]
    bad.write_text("\n".join(stripped))
    with pytest.raises(SchemaError, match="failures"):
        load_rows(bad)


def test_unknown_column_warns_and_is_dropped(tmp_path):
    extra = tmp_path / "extra.csv"
    lines = FIXTURE.read_text().splitlines()
    lines[0] += ",mystery"
    lines[1:] = [line + ",42" for line in lines[1:]]
    extra.write_text("\n".join(lines))
    with pytest.warns(UserWarning, match="mystery"):
        rows = load_rows(extra)
    assert "mystery" not in rows[0]
    assert len(rows) == 48


def test_bad_value_is_an_error():
    raw = [dict.fromkeys(SCHEMA_COLUMNS, "1")]
    raw[0]["threads"] = "many"
    with pytest.raises(SchemaError, match="threads"):
        validate_rows(raw)


def test_empty_file_is_an_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(SchemaError):
        load_rows(empty)
    header_only = tmp_path / "header.csv"
    header_only.write_text(",".join(SCHEMA_COLUMNS) + "\n")
    with pytest.raises(SchemaError):
        load_rows(header_only)
