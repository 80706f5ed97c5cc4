"""Report generation for cascm benchmark result files."""

from .figures import (ReportError, failures_series, fairness_table,
                      render_failures_figure, render_fairness_table,
                      render_throughput_figure, throughput_series)
from .schema import SCHEMA_COLUMNS, SchemaError, load_rows, validate_rows

__all__ = [
    "ReportError", "SchemaError", "SCHEMA_COLUMNS",
    "load_rows", "validate_rows",
    "throughput_series", "failures_series", "fairness_table",
    "render_throughput_figure", "render_failures_figure",
    "render_fairness_table",
]

__version__ = "0.1.0"
