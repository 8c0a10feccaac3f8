#!/usr/bin/env python3
"""Timing sweeps and reports.

Each (worker count x block size) cell runs four timed trials after one
recorded warm-up; every run is tagged with a hash of its solution, so
the report itself proves that parallel configuration never changes the
numbers. Solve-only scaling is probed with synthetic diagonally
dominant systems, where time depends on size alone.
"""

from tribem.bench import (
    BenchConfig,
    distinct_hashes,
    emit_report,
    realtime_verdict,
    run_sweep,
    summarize,
)
from tribem.problems import cube_problem

config = BenchConfig(
    problem=cube_problem(),
    trials=4,
    workers=(1, 4),
    block_sizes=(32, 1),
)
records = run_sweep(config)
summary = summarize(records)
print(emit_report(summary, "text-table"))

hashes = distinct_hashes(records)
print(f"distinct result hashes across all runs: {len(hashes)} "
      f"({'layout-invariant' if len(hashes) == 1 else 'BROKEN'})")

best = min(c.mean_seconds for c in summary.configs)
v = realtime_verdict(best)
print(f"best cell mean: {best:.3f} s -> {v.computations_per_second:.1f}/s, "
      f"graphics {'ok' if v.graphics_ok else 'NOT ok'}")
print()

# solve-only scaling on dummy systems
config = BenchConfig(mode="dummy-system", sizes=(500, 1000, 1500), trials=4)
summary = summarize(run_sweep(config))
print(emit_report(summary, "text-table"))
for c in summary.configs:
    v = realtime_verdict(c.mean_seconds)
    print(f"  {c.config_id}: {v.computations_per_second:7.1f} solves/s "
          f"(graphics {'ok' if v.graphics_ok else 'NOT ok'})")
