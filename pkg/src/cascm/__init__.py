"""Software contention management for compare-and-swap.

An atomically updatable reference cell whose cas can be wrapped by one of
five waiting policies (constant backoff, exponential backoff, time slicing,
a queue of waiters, or an ownership token with array handoff), plus
lock-free stack/queue implementations built on such cells and a benchmark
harness with fairness statistics and parameter tuning.
"""

from .backoff import ConstantBackoffCell, ExpBackoffCell, TimeSliceCell
from .bench import (BenchKind, BenchResult, RunSummary, WorkloadSpec,
                    aggregate_runs, derive_seeds, run_cas_micro,
                    run_queue_bench, run_stack_bench, run_workload,
                    tune_params)
from .cell import AtomicBool, AtomicCell, AtomicInt
from .factory import make_cell
from .params import (PolicyParams, Policy, auto_preset_name, preset_params,
                     PRESET_NAMES)
from .queued import ArrayBasedCell, McsCell
from .registry import (NONE, RegistrationError, RegistryError,
                       RegistryFullError, ThreadRegistry)
from .stats import FairnessStats, UndefinedMetricError, jain_index, norm_stdev
from .structs import (EMPTY, ArenaExhaustedError, MSQueue, NodeArena,
                      TreiberStack)
from .timing import calibrate, calibrated_wait

__all__ = [
    "AtomicBool", "AtomicCell", "AtomicInt",
    "ConstantBackoffCell", "ExpBackoffCell", "TimeSliceCell",
    "McsCell", "ArrayBasedCell", "make_cell",
    "Policy", "PolicyParams", "preset_params", "auto_preset_name",
    "PRESET_NAMES",
    "ThreadRegistry", "NONE", "RegistryError", "RegistryFullError",
    "RegistrationError",
    "TreiberStack", "MSQueue", "NodeArena", "EMPTY", "ArenaExhaustedError",
    "jain_index", "norm_stdev", "FairnessStats", "UndefinedMetricError",
    "BenchKind", "BenchResult", "RunSummary", "WorkloadSpec",
    "run_workload", "run_cas_micro", "run_queue_bench", "run_stack_bench",
    "aggregate_runs", "tune_params", "derive_seeds",
    "calibrate", "calibrated_wait",
]

__version__ = "0.1.0"
