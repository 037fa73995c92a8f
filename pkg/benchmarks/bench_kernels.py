"""Time the hot kernels on both code paths.

The package compiles its inner loops with numba when available; setting
``VPADVISOR_NO_NUMBA=1`` switches to the pure-numpy fallbacks.  This
script runs the same workload under both settings (each in a fresh
interpreter, so the flag is honored at import time) and prints a small
table.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, os, time
import numpy as np
import vpadvisor as vp
from vpadvisor import kernels
from vpadvisor.workload import derive

out = {"using_numba": bool(kernels.USING_NUMBA)}

inst = vp.tpcc(site_count=3)
model = derive(inst)
rng = np.random.default_rng(0)

# folded_cost: price many random layouts on TPC-C.
layouts = []
for _ in range(200):
    x = rng.integers(0, inst.site_count, inst.transaction_count)
    y = np.zeros((inst.attribute_count, inst.site_count), dtype=np.bool_)
    y[np.arange(inst.attribute_count), rng.integers(0, inst.site_count, inst.attribute_count)] = True
    layouts.append((x, y))

def bench(label, fn, repeat):
    fn()  # compile / warm caches outside the timed region
    best = min(
        (lambda t0=time.perf_counter(): (fn(), time.perf_counter() - t0)[1])()
        for _ in range(repeat)
    )
    out[label] = best

repeat = int(os.environ["BENCH_REPEAT"])

def run_folded():
    for x, y in layouts:
        kernels.folded_cost(
            model.coloc_cost, model.replica_cost, model.coloc_load,
            model.replica_load, x, y, inst.cost_weight,
        )

def run_greedy():
    for x, _ in layouts[:50]:
        kernels.greedy_replicas(
            x, model.txn_reads, model.coloc_cost, model.replica_cost,
            model.coloc_load, model.replica_load, inst.cost_weight,
            inst.site_count,
        )

small = vp.generate(vp.GenParams(transaction_count=3, table_count=3,
                                 max_attributes_per_table=3, seed=1),
                    site_count=2)
small_model = derive(small)

def run_enumerate():
    kernels.enumerate_layouts(
        small_model.coloc_cost, small_model.replica_cost,
        small_model.coloc_load, small_model.replica_load,
        small_model.txn_reads, small.cost_weight, small.site_count, False,
    )

bench("folded_cost_200_layouts_s", run_folded, repeat)
bench("greedy_replicas_50_starts_s", run_greedy, repeat)
bench("enumerate_small_instance_s", run_enumerate, repeat)
print(json.dumps(out))
"""


def run_side(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env["VPADVISOR_NO_NUMBA"] = "1" if no_numba else ""
    env["BENCH_REPEAT"] = str(repeat)
    proc = subprocess.run(
        [sys.executable, "-c", _WORKER], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timed repetitions per kernel")
    args = parser.parse_args()

    numba_side = run_side(no_numba=False, repeat=args.repeat)
    numpy_side = run_side(no_numba=True, repeat=args.repeat)

    if not numba_side["using_numba"]:
        print("note: numba unavailable; both columns ran the numpy fallback")

    keys = [k for k in numba_side if k.endswith("_s")]
    width = max(len(k) for k in keys)
    print(f"{'kernel'.ljust(width)}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for key in keys:
        a, b = numba_side[key], numpy_side[key]
        print(f"{key.ljust(width)}  {a:>12.6f}  {b:>12.6f}  {b / a:>8.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
