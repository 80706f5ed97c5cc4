"""Policy parameters and tuned per-platform presets.

Each contention-management policy reads only the fields relevant to it:

* constant backoff: waiting_time_ms
* exponential backoff: exp_threshold, c, m
* time slice: conc, slice
* mcs / array-based: contention_threshold, num_ops, max_wait_ms

The named presets carry the tuned values for the three machine families the
policies were originally calibrated on.  Because the mcs and array-based
rows of a preset differ, preset resolution is per (preset, policy).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from enum import Enum


class Policy(str, Enum):
    """Contention-management policy selector for a cell."""

    NATIVE = "native"
    CB = "cb"
    EXP = "exp"
    TS = "ts"
    MCS = "mcs"
    AB = "ab"


@dataclass(frozen=True)
class PolicyParams:
    """Platform-dependent policy constants.

    waiting_time_ms and max_wait_ms are nominal milliseconds, realized as
    calibrated spin iterations.  slice is the log2 of the time-slice length
    in nanoseconds.  c and m shape the exponential backoff exponent
    min(c * f, m) for f consecutive failures.
    """

    waiting_time_ms: float = 0.13
    exp_threshold: int = 2
    c: int = 8
    m: int = 24
    conc: int = 1
    slice: int = 20
    contention_threshold: int = 8
    num_ops: int = 10_000
    max_wait_ms: float = 0.9

    def __post_init__(self):
        if self.conc < 1:
            raise ValueError("conc must be >= 1")
        for name in ("waiting_time_ms", "exp_threshold", "c", "m", "slice",
                     "contention_threshold", "num_ops", "max_wait_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def replace(self, **changes) -> "PolicyParams":
        return dataclasses.replace(self, **changes)


# Tuned values per machine family.  The mcs/ab entries override the
# mode-switching triple for the respective policy.
_PRESETS: dict[str, dict] = {
    "xeon": {
        "waiting_time_ms": 0.13,
        "exp_threshold": 2, "c": 8, "m": 24,
        "conc": 1, "slice": 20,
        "mcs": {"contention_threshold": 8, "num_ops": 10_000, "max_wait_ms": 0.9},
        "ab": {"contention_threshold": 2, "num_ops": 10_000, "max_wait_ms": 0.9},
    },
    "i7": {
        "waiting_time_ms": 0.8,
        "exp_threshold": 2, "c": 9, "m": 27,
        "conc": 1, "slice": 25,
        "mcs": {"contention_threshold": 8, "num_ops": 10_000, "max_wait_ms": 7.5},
        "ab": {"contention_threshold": 2, "num_ops": 100_000, "max_wait_ms": 7.5},
    },
    "sparc": {
        "waiting_time_ms": 0.2,
        "exp_threshold": 1, "c": 1, "m": 15,
        "conc": 10, "slice": 6,
        "mcs": {"contention_threshold": 14, "num_ops": 10, "max_wait_ms": 1.0},
        "ab": {"contention_threshold": 14, "num_ops": 100, "max_wait_ms": 1.0},
    },
}

PRESET_NAMES = tuple(_PRESETS) + ("auto",)

#: Environment variable naming the default preset.
PRESET_ENV_VAR = "CASCM_PRESET"


def auto_preset_name(hardware_threads: int | None = None) -> str:
    """Pick a preset family by hardware thread count (coarse heuristic)."""
    if hardware_threads is None:
        hardware_threads = os.cpu_count() or 1
    if hardware_threads <= 8:
        return "i7"
    if hardware_threads <= 20:
        return "xeon"
    return "sparc"


def preset_params(name: str, policy: Policy = Policy.NATIVE) -> PolicyParams:
    """Resolve a named preset for a policy into a flat PolicyParams.

    Policies other than mcs/ab get the mcs row's mode-switching triple as a
    filler; they never read those fields.
    """
    if name == "auto":
        name = auto_preset_name()
    try:
        raw = _PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}"
        ) from None
    triple = raw["ab"] if policy is Policy.AB else raw["mcs"]
    return PolicyParams(
        waiting_time_ms=raw["waiting_time_ms"],
        exp_threshold=raw["exp_threshold"],
        c=raw["c"],
        m=raw["m"],
        conc=raw["conc"],
        slice=raw["slice"],
        **triple,
    )


def default_preset_name() -> str:
    """Preset named by the environment, falling back to the heuristic."""
    return os.environ.get(PRESET_ENV_VAR) or "auto"
