"""Figure and table rendering.

Every chart plots per-(policy, concurrency-level) means of values taken
directly from the input rows; no other statistics are derived.  Renderers
return both the written path and the exact data series they plotted, so
callers (and tests) can audit the numbers without parsing image files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# fixed salt for svg element ids: identical input -> byte-identical output
matplotlib.rcParams["svg.hashsalt"] = "cascm-report"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


class ReportError(ValueError):
    """Input rows cannot produce the requested figure."""


#: Series type: policy -> [(threads, mean value), ...] sorted by threads.
Series = "dict[str, list[tuple[int, float]]]"


def _policies_in_order(rows) -> list[str]:
    seen = []
    for row in rows:
        if row["policy"] not in seen:
            seen.append(row["policy"])
    return seen


def _mean_series(rows, bench: str, value_column: str):
    """Per-policy mean of a column at each concurrency level of a bench."""
    rows = [r for r in rows if r["bench"] == bench]
    if not rows:
        raise ReportError(f"no rows for bench {bench!r}")
    series = {}
    for policy in _policies_in_order(rows):
        by_level: dict[int, list[float]] = {}
        for row in rows:
            if row["policy"] == policy:
                by_level.setdefault(row["threads"], []).append(
                    float(row[value_column]))
        series[policy] = [(threads, sum(vals) / len(vals))
                          for threads, vals in sorted(by_level.items())]
    levels = {threads for points in series.values() for threads, _ in points}
    if len(levels) < 2:
        raise ReportError(
            f"bench {bench!r} has {len(levels)} concurrency level(s); "
            "need at least 2 to draw a trend")
    return series


def throughput_series(rows, bench: str):
    """Mean useful work per level: successful cas for the micro-benchmark,
    completed operations for the structures."""
    column = "successes" if bench == "cas" else "ops"
    return _mean_series(rows, bench, column)


def failures_series(rows, bench: str):
    """Mean failed-cas count per level."""
    return _mean_series(rows, bench, "failures")


def _plot_series(series, title: str, ylabel: str, path: Path,
                 log_y: bool = False) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    floor = None
    if log_y:
        positive = [v for points in series.values()
                    for _, v in points if v > 0]
        floor = min(positive) / 10 if positive else 0.1
        ax.set_yscale("log")
    annotated = False
    for policy, points in series.items():
        xs = [threads for threads, _ in points]
        if log_y:
            # zero cannot sit on a log axis; pin it to the floor and say so
            ys = [v if v > 0 else floor for _, v in points]
            if any(v == 0 for _, v in points) and not annotated:
                annotated = True
                ax.annotate("zero plotted at axis floor",
                            xy=(xs[0], floor), xytext=(0.02, 0.02),
                            textcoords="axes fraction", fontsize=8)
        else:
            ys = [v for _, v in points]
        ax.plot(xs, ys, marker="o", label=policy)
    ax.set_xlabel("threads")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    if path.suffix == ".svg":
        # drop the embedded creation date so identical input gives
        # byte-identical output
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path)
    plt.close(fig)


def render_throughput_figure(rows, bench: str, outdir: str | Path,
                             fmt: str = "svg"):
    """Mean successes (or completed ops) vs concurrency, one line per
    policy.  Returns (path, series)."""
    series = throughput_series(rows, bench)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{bench}_throughput.{fmt}"
    ylabel = "mean successful cas" if bench == "cas" else "mean completed ops"
    _plot_series(series, f"{bench}: useful work vs concurrency", ylabel, path)
    return path, series


def render_failures_figure(rows, bench: str, outdir: str | Path,
                           fmt: str = "svg"):
    """Mean cas failures vs concurrency on a logarithmic y-axis.  Returns
    (path, series); the series carries true means, zero included."""
    series = failures_series(rows, bench)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{bench}_failures.{fmt}"
    _plot_series(series, f"{bench}: cas failures vs concurrency",
                 "mean failed cas (log)", path, log_y=True)
    return path, series


def fairness_table(rows):
    """Per-policy fairness averages: the per-run metrics are averaged within
    each concurrency level first, then across levels, mirroring how the
    summary table is built."""
    if not rows:
        raise ReportError("no rows for the fairness table")
    table = []
    for policy in _policies_in_order(rows):
        by_level: dict[int, list] = {}
        for row in rows:
            if row["policy"] == policy:
                by_level.setdefault(row["threads"], []).append(row)
        level_means = [
            (sum(r["norm_stdev"] for r in level) / len(level),
             sum(r["jain"] for r in level) / len(level))
            for _, level in sorted(by_level.items())
        ]
        n = len(level_means)
        table.append((policy,
                      sum(m[0] for m in level_means) / n,
                      sum(m[1] for m in level_means) / n))
    return table


def render_fairness_table(rows, outdir: str | Path):
    """Write the fairness summary as CSV with the classic column structure:
    one row per policy, 'Normal stdev' and "Jain's Index" columns.  Returns
    (path, table) with the unrounded values."""
    table = fairness_table(rows)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "fairness_table.csv"
    lines = ["policy,Normal stdev,Jain's Index"]
    lines += [f"{policy},{nstd:.3f},{jain:.3f}"
              for policy, nstd, jain in table]
    path.write_text("\n".join(lines) + "\n")
    return path, table
