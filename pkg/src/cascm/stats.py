"""Fairness metrics over per-thread throughput vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass


class UndefinedMetricError(ValueError):
    """The metric is undefined for this input (zero sum or zero mean)."""


def jain_index(x) -> float:
    """Jain's fairness index (sum x)**2 / (n * sum x**2).

    Ranges from 1/n (one sample gets everything) to 1 (all equal).
    Inputs must be non-negative, non-empty, and not all zero.
    """
    xs = list(x)
    n = len(xs)
    if n == 0:
        raise ValueError("jain_index of an empty vector")
    if any(v < 0 for v in xs):
        raise ValueError("jain_index requires non-negative samples")
    top = max(xs)
    if top == 0.0:
        raise UndefinedMetricError("jain_index undefined for all-zero input")
    # the index is scale-invariant; normalizing by the max keeps the squares
    # away from under/overflow for extreme inputs
    xs = [v / top for v in xs]
    total = math.fsum(xs)
    squares = math.fsum(v * v for v in xs)
    return (total * total) / (n * squares)


def norm_stdev(x) -> float:
    """Population standard deviation divided by the mean (coefficient of
    variation).  Requires a non-empty vector with positive mean."""
    xs = list(x)
    n = len(xs)
    if n == 0:
        raise ValueError("norm_stdev of an empty vector")
    top = max(xs, default=0.0)
    if top > 0:
        # scale-invariant, like the index above: normalize before squaring
        xs = [v / top for v in xs]
    mean = math.fsum(xs) / n
    if mean <= 0:
        raise UndefinedMetricError("norm_stdev undefined for non-positive mean")
    var = math.fsum((v - mean) ** 2 for v in xs) / n
    return math.sqrt(var) / mean


@dataclass(frozen=True)
class FairnessStats:
    """Fairness of a per-thread throughput vector."""

    jain: float
    norm_stdev: float

    @classmethod
    def of(cls, x) -> "FairnessStats":
        return cls(jain=jain_index(x), norm_stdev=norm_stdev(x))
