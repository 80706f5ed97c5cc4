"""Series extraction and rendering behavior."""

from pathlib import Path

import pytest

from cascm_report.figures import (ReportError, failures_series,
                                  fairness_table, render_failures_figure,
                                  render_fairness_table,
                                  render_throughput_figure,
                                  throughput_series)
from cascm_report.schema import load_rows

FIXTURE = Path(__file__).parent / "fixtures" / "results_48.csv"


@pytest.fixture(scope="module")
def rows():
    return load_rows(FIXTURE)


def test_throughput_series_structure(rows):
    series = throughput_series(rows, "cas")
    assert list(series) == ["native", "cb"]  # first-appearance order
    assert all(len(points) == 3 for points in series.values())
    assert [t for t, _ in series["native"]] == [1, 2, 4]


def test_single_level_is_an_error(rows):
    only = [r for r in rows if r["threads"] == 2]
    with pytest.raises(ReportError, match="level"):
        throughput_series(only, "cas")


def test_unknown_bench_is_an_error(rows):
    with pytest.raises(ReportError, match="bench"):
        failures_series(rows, "queue")


def test_struct_bench_uses_completed_ops():
    rows = [
        {"bench": "stack", "policy": "native", "threads": t, "ops": 10 * t,
         "successes": 1, "failures": 0}
        for t in (1, 2)
    ]
    series = throughput_series(rows, "stack")
    assert series["native"] == [(1, 10.0), (2, 20.0)]


def test_fairness_table_empty_error():
    with pytest.raises(ReportError):
        fairness_table([])


def test_render_throughput_returns_plotted_series(rows, tmp_path):
    path, series = render_throughput_figure(rows, "cas", tmp_path)
    assert path == tmp_path / "cas_throughput.svg"
    assert path.exists()
    text = path.read_text()
    assert "native" in text and "cb" in text  # legend labels present


def test_render_failures_zero_floor_annotation(rows, tmp_path):
    path, series = render_failures_figure(rows, "cas", tmp_path)
    assert series["cb"][0] == (1, 0.0)  # the true mean is preserved
    assert "zero plotted at axis floor" in path.read_text()


def test_rendering_is_deterministic(rows, tmp_path):
    p1, s1 = render_throughput_figure(rows, "cas", tmp_path / "a")
    p2, s2 = render_throughput_figure(rows, "cas", tmp_path / "b")
    assert s1 == s2
    assert p1.read_bytes() == p2.read_bytes()


def test_png_format(rows, tmp_path):
    path, _ = render_throughput_figure(rows, "cas", tmp_path, fmt="png")
    assert path.suffix == ".png"
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_fairness_table_file_layout(rows, tmp_path):
    path, table = render_fairness_table(rows, tmp_path)
    lines = path.read_text().splitlines()
    assert lines[0] == "policy,Normal stdev,Jain's Index"
    assert len(lines) == 1 + len(table)
    assert lines[1].startswith("native,")
