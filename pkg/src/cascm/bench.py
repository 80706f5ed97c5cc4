"""Workload drivers: the shared-cell cas micro-benchmark, queue and stack
workloads, parameter tuning, and run aggregation.

Two run modes exist.  Timed mode follows the original protocol (threads run
until a stop flag is raised after a fixed duration) and is meant for trend
measurements.  Fixed-op mode runs each thread for an exact operation count
and is fully deterministic given the seeds, which is what the correctness
suites rely on.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field
from enum import Enum

from .factory import make_cell
from .params import PolicyParams, Policy
from .registry import DEFAULT_MAX_THREADS, ThreadRegistry
from .stats import FairnessStats
from .structs import EMPTY, MSQueue, TreiberStack

#: objects pre-generated per thread for the cas micro-benchmark payload pool
PAYLOAD_POOL_SIZE = 128
#: length of the per-thread operation pattern in the queue/stack workloads
PATTERN_LENGTH = 128

DEFAULT_DURATION_S = 5.0
DEFAULT_RUNS = 10
DEFAULT_PREPOPULATE = 1000
DEFAULT_WARMUP_S = 0.5


class BenchKind(str, Enum):
    CAS_MICRO = "cas"
    QUEUE = "queue"
    STACK = "stack"


class BenchError(RuntimeError):
    """A worker thread failed; the run was aborted."""


def mix64(seed: int, lane: int) -> int:
    """Split a 64-bit stream: decorrelated seed for (seed, lane)."""
    z = (seed + lane * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def derive_seeds(base_seed: int, runs: int = DEFAULT_RUNS) -> tuple[int, ...]:
    """Per-run seeds derived from one base seed."""
    return tuple(mix64(base_seed, run) for run in range(runs))


@dataclass
class WorkloadSpec:
    """One benchmark configuration; executed once per seed."""

    bench: BenchKind
    policy: Policy = Policy.NATIVE
    params: PolicyParams = field(default_factory=PolicyParams)
    threads: int = 1
    duration_s: float = DEFAULT_DURATION_S
    seeds: tuple[int, ...] = ()
    prepopulate: int | None = None  # None: 1000 for queue/stack, 0 for cas
    mode: str = "timed"  # "timed" | "ops"
    ops: int = 0  # per-thread target in fixed-op mode
    max_threads: int = DEFAULT_MAX_THREADS
    warmup_s: float | None = None  # None: 0.5 s in timed mode, none in ops mode
    track_chain: bool = False  # cas: chain-linked payloads + post-run chain walk
    collect: bool = False  # queue/stack: keep op logs and item records
    wrap_next: bool = True  # queue: contention-manage node next links too

    def __post_init__(self):
        self.bench = BenchKind(self.bench)
        self.policy = Policy(self.policy)
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.threads > self.max_threads:
            raise ValueError("threads exceeds max_threads")
        if not self.seeds:
            self.seeds = derive_seeds(0, DEFAULT_RUNS)
        if self.mode not in ("timed", "ops"):
            raise ValueError("mode must be 'timed' or 'ops'")
        if self.mode == "ops" and self.ops < 1:
            raise ValueError("fixed-op mode needs ops >= 1")

    @property
    def runs(self) -> int:
        return len(self.seeds)

    def effective_prepopulate(self) -> int:
        if self.prepopulate is not None:
            return self.prepopulate
        return 0 if self.bench is BenchKind.CAS_MICRO else DEFAULT_PREPOPULATE

    def effective_warmup(self) -> float:
        if self.warmup_s is not None:
            return self.warmup_s
        return DEFAULT_WARMUP_S if self.mode == "timed" else 0.0


@dataclass
class BenchResult:
    """Counters of a single run."""

    bench: BenchKind
    policy: Policy
    threads: int
    seed: int
    per_thread_successes: list[int]
    per_thread_failures: list[int]
    per_thread_ops: list[int]
    wall_time_s: float
    chain_length: int | None = None
    op_logs: list[list] | None = None
    added_items: list[list] | None = None
    removed_items: list[list] | None = None
    residual_items: list | None = None

    @property
    def total_successes(self) -> int:
        return sum(self.per_thread_successes)

    @property
    def total_failures(self) -> int:
        return sum(self.per_thread_failures)

    @property
    def total_ops(self) -> int:
        return sum(self.per_thread_ops)

    @property
    def throughput(self) -> float:
        return self.total_ops / self.wall_time_s if self.wall_time_s > 0 else 0.0

    def work_vector(self) -> list[int]:
        """Per-thread useful-work counts fairness is computed over."""
        if self.bench is BenchKind.CAS_MICRO:
            return self.per_thread_successes
        return self.per_thread_ops

    @property
    def fairness(self) -> FairnessStats:
        return FairnessStats.of(self.work_vector())


class _Payload:
    """Opaque micro-benchmark payload; compared by identity only."""

    __slots__ = ()


class _ChainPayload:
    """Payload that remembers the value it replaced, so the cell's full
    transition chain can be walked after the run."""

    __slots__ = ("prev",)

    def __init__(self, prev=None):
        self.prev = prev


def _launch(workers, duration_s: float, stop, mode: str) -> float:
    """Start workers behind a barrier, run the clock, join, return wall time."""
    errors: list[BaseException] = []
    barrier = threading.Barrier(len(workers) + 1)

    def runner(fn):
        try:
            barrier.wait()
            fn()
        except BaseException as exc:  # propagated after join
            errors.append(exc)
            stop[0] = True

    threads = [threading.Thread(target=runner, args=(fn,), daemon=True)
               for fn in workers]
    for t in threads:
        t.start()
    barrier.wait()
    start = time.perf_counter()
    if mode == "timed":
        time.sleep(duration_s)
        stop[0] = True
    for t in threads:
        t.join()
    wall = time.perf_counter() - start
    if errors:
        raise BenchError(f"worker failed: {errors[0]!r}") from errors[0]
    return wall


def _run_cas_once(spec: WorkloadSpec, seed: int) -> BenchResult:
    registry = ThreadRegistry(spec.max_threads)
    initial = _ChainPayload() if spec.track_chain else _Payload()
    cell = make_cell(spec.policy, initial, spec.params, registry,
                     seed=mix64(seed, 0x5EED))
    n = spec.threads
    successes = [0] * n
    failures = [0] * n
    stop = [False]

    def worker(slot: int):
        def body():
            tind = registry.register()
            try:
                succ = fail = 0
                if spec.track_chain:
                    if spec.mode == "ops":
                        target = spec.ops
                        while succ < target:
                            observed = cell.read(tind)
                            if cell.cas(observed, _ChainPayload(observed), tind):
                                succ += 1
                            else:
                                fail += 1
                    else:
                        while not stop[0]:
                            observed = cell.read(tind)
                            if cell.cas(observed, _ChainPayload(observed), tind):
                                succ += 1
                            else:
                                fail += 1
                else:
                    pool = [_Payload() for _ in range(PAYLOAD_POOL_SIZE)]
                    j = 0
                    if spec.mode == "ops":
                        target = spec.ops
                        while succ < target:
                            observed = cell.read(tind)
                            if cell.cas(observed, pool[j & 127], tind):
                                succ += 1
                            else:
                                fail += 1
                            j += 1
                    else:
                        while not stop[0]:
                            observed = cell.read(tind)
                            if cell.cas(observed, pool[j & 127], tind):
                                succ += 1
                            else:
                                fail += 1
                            j += 1
                successes[slot] = succ
                failures[slot] = fail
            finally:
                registry.deregister()
        return body

    wall = _launch([worker(i) for i in range(n)], spec.duration_s, stop,
                   spec.mode)

    chain_length = None
    if spec.track_chain:
        chain_length = 0
        node = cell._get()  # quiescent: workers are joined
        while node.prev is not None:
            chain_length += 1
            node = node.prev

    return BenchResult(
        bench=spec.bench, policy=spec.policy, threads=n, seed=seed,
        per_thread_successes=successes, per_thread_failures=failures,
        per_thread_ops=[s + f for s, f in zip(successes, failures)],
        wall_time_s=wall, chain_length=chain_length,
    )


def _queue_pattern(seed: int, tind: int) -> list[bool]:
    """True means enqueue: the pattern integer at that position is even."""
    rng = random.Random(mix64(seed, tind))
    return [rng.randrange(1 << 31) % 2 == 0 for _ in range(PATTERN_LENGTH)]


def _stack_pattern(seed: int, tind: int) -> list[bool]:
    """True means push: the pattern bit at that position is set."""
    rng = random.Random(mix64(seed, tind))
    return [rng.getrandbits(1) == 1 for _ in range(PATTERN_LENGTH)]


def _run_struct_once(spec: WorkloadSpec, seed: int) -> BenchResult:
    registry = ThreadRegistry(spec.max_threads)
    struct_seed = mix64(seed, 0x5EED)
    if spec.bench is BenchKind.QUEUE:
        struct = MSQueue(registry, spec.policy, spec.params, seed=struct_seed,
                         wrap_next=spec.wrap_next)
        add, remove = struct.enqueue, struct.dequeue
        make_pattern = _queue_pattern
    else:
        struct = TreiberStack(registry, spec.policy, spec.params,
                              seed=struct_seed)
        add, remove = struct.push, struct.pop
        make_pattern = _stack_pattern

    prepop = spec.effective_prepopulate()
    with registry.registered():
        for i in range(prepop):
            add(("prepop", i))

    n = spec.threads
    ops_done = [0] * n
    stop = [False]
    op_logs = [[] for _ in range(n)] if spec.collect else None
    added = [[] for _ in range(n)] if spec.collect else None
    removed = [[] for _ in range(n)] if spec.collect else None

    def worker(slot: int):
        def body():
            # slot, not the registry index, keys the pattern and item
            # identity: registry slots can be reused within a run if one
            # worker finishes before another registers
            tind = registry.register()
            try:
                pattern = make_pattern(seed, slot)
                done = 0
                i = 0
                log = op_logs[slot] if spec.collect else None
                my_added = added[slot] if spec.collect else None
                my_removed = removed[slot] if spec.collect else None
                limit = spec.ops if spec.mode == "ops" else None
                while True:
                    if limit is not None:
                        if done >= limit:
                            break
                    elif stop[0]:
                        break
                    if pattern[i % PATTERN_LENGTH]:
                        item = (slot, i)
                        add(item, tind)
                        if my_added is not None:
                            my_added.append(item)
                        if log is not None:
                            log.append("+")
                    else:
                        got = remove(tind)
                        if my_removed is not None and got is not EMPTY:
                            my_removed.append(got)
                        if log is not None:
                            log.append("-")
                    done += 1
                    i += 1
                ops_done[slot] = done
            finally:
                registry.deregister()
        return body

    wall = _launch([worker(i) for i in range(n)], spec.duration_s, stop,
                   spec.mode)

    residual = struct.snapshot_items() if spec.collect else None
    return BenchResult(
        bench=spec.bench, policy=spec.policy, threads=n, seed=seed,
        per_thread_successes=list(ops_done), per_thread_failures=[0] * n,
        per_thread_ops=list(ops_done), wall_time_s=wall,
        op_logs=op_logs, added_items=added, removed_items=removed,
        residual_items=residual,
    )


def _run_once(spec: WorkloadSpec, seed: int) -> BenchResult:
    if spec.bench is BenchKind.CAS_MICRO:
        return _run_cas_once(spec, seed)
    return _run_struct_once(spec, seed)


def _warmup(spec: WorkloadSpec) -> None:
    warm = spec.effective_warmup()
    if warm <= 0:
        return
    import dataclasses
    throwaway = dataclasses.replace(
        spec, duration_s=warm, seeds=(mix64(spec.seeds[0], 0xCAFE),),
        warmup_s=0.0, collect=False)
    _run_once(throwaway, throwaway.seeds[0])


def run_workload(spec: WorkloadSpec) -> list[BenchResult]:
    """Execute the workload once per seed, after an optional warm-up."""
    _warmup(spec)
    return [_run_once(spec, seed) for seed in spec.seeds]


def run_cas_micro(spec: WorkloadSpec) -> list[BenchResult]:
    if spec.bench is not BenchKind.CAS_MICRO:
        raise ValueError("spec.bench must be CAS_MICRO")
    return run_workload(spec)


def run_queue_bench(spec: WorkloadSpec) -> list[BenchResult]:
    if spec.bench is not BenchKind.QUEUE:
        raise ValueError("spec.bench must be QUEUE")
    return run_workload(spec)


def run_stack_bench(spec: WorkloadSpec) -> list[BenchResult]:
    if spec.bench is not BenchKind.STACK:
        raise ValueError("spec.bench must be STACK")
    return run_workload(spec)


@dataclass(frozen=True)
class RunSummary:
    """Arithmetic means across a list of runs; fairness is computed per run
    and then averaged."""

    runs: int
    mean_successes: float
    mean_failures: float
    mean_ops: float
    mean_wall_time_s: float
    mean_throughput: float
    mean_jain: float
    mean_norm_stdev: float


def aggregate_runs(results: list[BenchResult]) -> RunSummary:
    if not results:
        raise ValueError("aggregate_runs needs at least one result")
    n = len(results)
    fairness = [r.fairness for r in results]
    return RunSummary(
        runs=n,
        mean_successes=sum(r.total_successes for r in results) / n,
        mean_failures=sum(r.total_failures for r in results) / n,
        mean_ops=sum(r.total_ops for r in results) / n,
        mean_wall_time_s=sum(r.wall_time_s for r in results) / n,
        mean_throughput=sum(r.throughput for r in results) / n,
        mean_jain=sum(f.jain for f in fairness) / n,
        mean_norm_stdev=sum(f.norm_stdev for f in fairness) / n,
    )


def tune_params(policy: Policy, concurrency_levels, search_grid, seeds,
                runner=None, duration_s: float = 0.2,
                max_threads: int = DEFAULT_MAX_THREADS) -> PolicyParams:
    """Pick the grid point with the highest mean cas-benchmark throughput
    across all concurrency levels (and seeds); ties go to the earliest
    grid point.

    runner(params, threads, seed) -> throughput may be injected; the default
    runs a short timed cas micro-benchmark.
    """
    levels = list(concurrency_levels)
    grid = list(search_grid)
    if not grid:
        raise ValueError("empty parameter grid")
    if not levels:
        raise ValueError("empty concurrency level list")
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("no seeds supplied")

    if runner is None:
        def runner(params, threads, seed):
            spec = WorkloadSpec(
                bench=BenchKind.CAS_MICRO, policy=policy, params=params,
                threads=threads, duration_s=duration_s, seeds=(seed,),
                warmup_s=0.0, max_threads=max_threads)
            (result,) = run_workload(spec)
            return result.total_successes / result.wall_time_s

    best_params = None
    best_score = None
    for params in grid:
        per_level = []
        for threads in levels:
            per_level.append(
                sum(runner(params, threads, seed) for seed in seeds) / len(seeds))
        score = sum(per_level) / len(per_level)
        if best_score is None or score > best_score:
            best_score = score
            best_params = params
    return best_params
