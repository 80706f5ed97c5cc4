#!/usr/bin/env python3
"""Sweep every policy over a thread range and write one CSV of per-run rows.

This is the scripted form of `cascm bench --algo all`; it additionally
prints a per-(policy, threads) summary table of mean throughput and
fairness to stderr so a sweep can be eyeballed as it lands.

Example:
    python scripts/run_sweep.py --threads 1..8:1 --duration 2 --runs 5 \
        --out results.csv
"""

import argparse
import csv
import sys

from cascm.bench import WorkloadSpec, aggregate_runs, derive_seeds, run_workload
from cascm.cli import COLUMNS, _result_row, parse_thread_range
from cascm.params import Policy, default_preset_name, preset_params


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bench", default="cas",
                        choices=["cas", "queue", "stack"])
    parser.add_argument("--threads", default="1..4", metavar="RANGE")
    parser.add_argument("--duration", type=float, default=2.0)
    parser.add_argument("--mode", choices=["timed", "ops"], default="timed")
    parser.add_argument("--ops", type=int, default=0)
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--preset", default=default_preset_name())
    parser.add_argument("--out", default="results.csv")
    args = parser.parse_args()

    levels = parse_thread_range(args.threads)
    seeds = derive_seeds(args.seed, args.runs)
    rows = []
    print(f"{'policy':>8} {'threads':>7} {'ops/s':>12} {'jain':>7}",
          file=sys.stderr)
    for policy in Policy:
        params = preset_params(args.preset, policy)
        for threads in levels:
            spec = WorkloadSpec(
                bench=args.bench, policy=policy, params=params,
                threads=threads, duration_s=args.duration, seeds=seeds,
                mode=args.mode, ops=args.ops)
            results = run_workload(spec)
            for run_index, result in enumerate(results):
                rows.append(_result_row(result, run_index, params))
            summary = aggregate_runs(results)
            print(f"{policy.value:>8} {threads:>7} "
                  f"{summary.mean_throughput:>12.0f} {summary.mean_jain:>7.3f}",
                  file=sys.stderr)

    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
