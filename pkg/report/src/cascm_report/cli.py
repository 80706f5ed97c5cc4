"""`report` command: render figures and tables from benchmark result files.

Exit codes: 0 success, 1 bad input data, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .figures import (ReportError, render_failures_figure,
                      render_fairness_table, render_throughput_figure)
from .schema import SchemaError, load_rows

FIGURE_NAMES = ("throughput", "failures", "fairness")


@dataclass
class ReportConfig:
    """One rendering request, as resolved from the command line."""

    inputs: list[Path]
    outdir: Path
    figures: tuple[str, ...] = FIGURE_NAMES
    fmt: str = "svg"
    written: list[Path] = field(default_factory=list)


def generate(config: ReportConfig) -> list[Path]:
    """Render the selected figures for every bench present in the input."""
    rows = []
    for path in config.inputs:
        rows.extend(load_rows(path))
    benches = []
    for row in rows:
        if row["bench"] not in benches:
            benches.append(row["bench"])
    written = []
    for figure in config.figures:
        if figure == "fairness":
            path, _ = render_fairness_table(rows, config.outdir)
            written.append(path)
            continue
        render = (render_throughput_figure if figure == "throughput"
                  else render_failures_figure)
        for bench in benches:
            path, _ = render(rows, bench, config.outdir, config.fmt)
            written.append(path)
    config.written = written
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="report",
        description="Render figures from cascm benchmark result files")
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="FILE", help="result file (csv or jsonl); "
                        "repeatable")
    parser.add_argument("--outdir", required=True, metavar="DIR")
    parser.add_argument("--figures", default=",".join(FIGURE_NAMES),
                        help="comma-separated subset of: "
                        + ", ".join(FIGURE_NAMES))
    parser.add_argument("--format", dest="fmt", default="svg",
                        choices=["svg", "png"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    figures = tuple(name for name in args.figures.split(",") if name)
    if not figures:
        parser.exit(2, "report: error: empty figure selection\n")
    unknown = [name for name in figures if name not in FIGURE_NAMES]
    if unknown:
        parser.exit(2, f"report: error: unknown figure(s): "
                       f"{', '.join(unknown)}\n")
    config = ReportConfig(inputs=[Path(p) for p in args.inputs],
                          outdir=Path(args.outdir), figures=figures,
                          fmt=args.fmt)
    try:
        written = generate(config)
    except (OSError, SchemaError, ReportError) as exc:
        print(f"report: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
