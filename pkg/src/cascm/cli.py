"""Command-line interface: benchmark sweeps, parameter tuning, and the
runtime verification suites.

Exit codes: 0 success, 1 runtime or invariant failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .bench import (BenchKind, WorkloadSpec, aggregate_runs, derive_seeds,
                    run_workload, tune_params)
from .params import (PRESET_NAMES, PolicyParams, Policy, default_preset_name,
                     preset_params)
from .stats import UndefinedMetricError
from .verify import SUITES, run_suites

#: Stable output schema; every row carries every column.
COLUMNS = (
    "bench", "policy", "threads", "run_index", "seed",
    "successes", "failures", "ops", "wall_time_s", "throughput",
    "jain", "norm_stdev",
    "waiting_time_ms", "exp_threshold", "c", "m", "conc", "slice",
    "contention_threshold", "num_ops", "max_wait_ms",
)

_PARAM_FLAGS = {
    "waiting_time_ms": float, "exp_threshold": int, "c": int, "m": int,
    "conc": int, "slice": int, "contention_threshold": int, "num_ops": int,
    "max_wait_ms": float,
}


def parse_thread_range(text: str) -> list[int]:
    """Parse 'n' or 'a..b' or 'a..b:step' into a concurrency level list."""
    step = 1
    if ":" in text:
        text, step_text = text.split(":", 1)
        step = int(step_text)
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
    else:
        lo = hi = int(text)
    if lo < 1 or hi < lo or step < 1:
        raise ValueError(f"bad thread range {text!r}")
    return list(range(lo, hi + 1, step))


def _resolve_seeds(args) -> tuple[int, ...]:
    if args.seeds:
        with open(args.seeds) as fh:
            seeds = tuple(int(line) for line in fh if line.strip())
        if not seeds:
            raise ValueError(f"seed file {args.seeds} is empty")
        return seeds
    return derive_seeds(args.seed, args.runs)


def _resolve_params(args, policy: Policy) -> PolicyParams:
    params = preset_params(args.preset, policy)
    overrides = {name: getattr(args, name) for name in _PARAM_FLAGS
                 if getattr(args, name) is not None}
    return params.replace(**overrides) if overrides else params


def _result_row(result, run_index: int, params: PolicyParams) -> dict:
    try:
        fairness = result.fairness
        jain, nstd = fairness.jain, fairness.norm_stdev
    except UndefinedMetricError:
        jain, nstd = 1.0, 0.0  # no work recorded anywhere: trivially even
    return {
        "bench": result.bench.value,
        "policy": result.policy.value,
        "threads": result.threads,
        "run_index": run_index,
        "seed": result.seed,
        "successes": result.total_successes,
        "failures": result.total_failures,
        "ops": result.total_ops,
        "wall_time_s": round(result.wall_time_s, 6),
        "throughput": round(result.throughput, 3),
        "jain": round(jain, 6),
        "norm_stdev": round(nstd, 6),
        "waiting_time_ms": params.waiting_time_ms,
        "exp_threshold": params.exp_threshold,
        "c": params.c,
        "m": params.m,
        "conc": params.conc,
        "slice": params.slice,
        "contention_threshold": params.contention_threshold,
        "num_ops": params.num_ops,
        "max_wait_ms": params.max_wait_ms,
    }


def _write_rows(rows: list[dict], fmt: str, out_path: str | None) -> None:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.DictWriter(buf, fieldnames=COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    else:
        for row in rows:
            buf.write(json.dumps(row) + "\n")
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", default=default_preset_name(),
                        choices=PRESET_NAMES,
                        help="named parameter preset (env CASCM_PRESET)")
    for name, kind in _PARAM_FLAGS.items():
        parser.add_argument("--" + name.replace("_", "-"), dest=name,
                            type=kind, default=None,
                            help=f"override preset {name}")
    parser.add_argument("--seed", type=int, default=1,
                        help="base seed; per-run seeds are derived from it")
    parser.add_argument("--seeds", metavar="FILE", default=None,
                        help="file with one seed per line (overrides --seed)")


def _policies(algo: str) -> list[Policy]:
    if algo == "all":
        return list(Policy)
    return [Policy(algo)]


def cmd_bench(args) -> int:
    if args.mode == "ops" and args.ops < 1:
        raise UsageError("--mode ops requires --ops N with N >= 1")
    if args.mode == "timed" and args.ops:
        raise UsageError("--ops only applies to --mode ops")
    try:
        levels = parse_thread_range(args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    seeds = _resolve_seeds(args)
    rows = []
    for policy in _policies(args.algo):
        params = _resolve_params(args, policy)
        for threads in levels:
            spec = WorkloadSpec(
                bench=BenchKind(args.bench), policy=policy, params=params,
                threads=threads, duration_s=args.duration, seeds=seeds,
                mode=args.mode, ops=args.ops)
            for run_index, result in enumerate(run_workload(spec)):
                rows.append(_result_row(result, run_index, params))
    _write_rows(rows, args.format, args.out)
    return 0


def cmd_tune(args) -> int:
    policy = Policy(args.algo)
    base = _resolve_params(args, policy)
    if args.grid:
        with open(args.grid) as fh:
            points = json.load(fh)
        if not isinstance(points, list) or not points:
            raise ValueError("grid file must hold a non-empty JSON array")
        grid = [base.replace(**point) for point in points]
    else:
        grid = [base]
    levels = parse_thread_range(args.levels)
    seeds = _resolve_seeds(args)

    measured = [0]

    def runner(params, threads, seed):
        spec = WorkloadSpec(
            bench=BenchKind.CAS_MICRO, policy=policy, params=params,
            threads=threads, duration_s=args.duration, seeds=(seed,),
            warmup_s=0.0)
        (result,) = run_workload(spec)
        measured[0] += 1
        print(f"tune: measured point {grid.index(params)} at "
              f"{threads} threads (seed {seed})", file=sys.stderr)
        return result.total_successes / result.wall_time_s

    best = tune_params(policy, levels, grid, seeds, runner=runner)
    block = {
        "preset": {
            "policy": policy.value,
            "params": {name: getattr(best, name) for name in _PARAM_FLAGS},
        },
        "measurements": measured[0],
    }
    print(json.dumps(block, indent=2))
    return 0


def cmd_verify(args) -> int:
    suites = args.suite.split(",") if args.suite else None
    policies = _policies(args.policy) if args.policy != "all" else None
    try:
        results = run_suites(suites, policies, quick=args.quick)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    failed = [r for r in results if not r.ok]
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    if failed:
        print(f"{len(failed)} invariant check(s) failed:", file=sys.stderr)
        for r in failed:
            print(f"  {r.name}: {r.detail}", file=sys.stderr)
        return 1
    return 0


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascm",
        description="Contention-managed CAS benchmarks and verification")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a benchmark sweep")
    bench.add_argument("--bench", required=True,
                       choices=[k.value for k in BenchKind])
    bench.add_argument("--algo", default="native",
                       choices=[p.value for p in Policy] + ["all"])
    bench.add_argument("--threads", default="1", metavar="RANGE",
                       help="concurrency levels, e.g. 4 or 1..8 or 2..16:2")
    bench.add_argument("--duration", type=float, default=5.0,
                       help="seconds per timed run")
    bench.add_argument("--mode", choices=["timed", "ops"], default="timed")
    bench.add_argument("--ops", type=int, default=0,
                       help="per-thread operation count in ops mode")
    bench.add_argument("--runs", type=int, default=10)
    bench.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    bench.add_argument("--out", default=None, metavar="PATH")
    _add_common_flags(bench)
    bench.set_defaults(func=cmd_bench)

    tune = sub.add_parser("tune", help="grid-search policy parameters")
    tune.add_argument("--algo", required=True,
                      choices=[p.value for p in Policy])
    tune.add_argument("--levels", default="1..2", metavar="RANGE")
    tune.add_argument("--grid", default=None, metavar="FILE",
                      help="JSON array of parameter-override objects")
    tune.add_argument("--duration", type=float, default=0.2)
    tune.add_argument("--runs", type=int, default=1)
    _add_common_flags(tune)
    tune.set_defaults(func=cmd_tune)

    verify = sub.add_parser("verify", help="run correctness suites")
    verify.add_argument("--quick", action="store_true",
                        help="reduced intensity, finishes in well under a minute")
    verify.add_argument("--policy", default="all",
                        choices=[p.value for p in Policy] + ["all"])
    verify.add_argument("--suite", default=None,
                        help="comma-separated subset of: " + ", ".join(SUITES))
    verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except (OSError, ValueError, KeyError) as exc:
        print(f"cascm: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
