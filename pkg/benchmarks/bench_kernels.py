"""Time the compiled kernels against the pure-Python ones.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--seed S]

Every kernel is run on the same inputs under both backends; the script
checks the outputs are identical and prints the median time of each.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from binpart import kernels
from binpart.configs import enumerate_configs
from binpart.cover import Demand
from binpart.generators import generate_h


def _time(fn, repeat):
    out = None
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), out


def cases(seed: int):
    rng = np.random.default_rng(seed)
    items = [int(x) for x in rng.integers(1, 101, size=20_000)]
    inst = generate_h(100, 4, seed)
    caps = list(inst.caps)
    sizes = list(inst.sizes_units)
    cfgs = enumerate_configs(inst, "0.1")
    demand = Demand.from_counts(inst.sizes, [min(n, 4) for n in inst.counts])
    vecs = cfgs.count_vectors()
    yield "next_fit (20k items)", lambda b: b.next_fit(items, 100)
    yield "first_fit (20k items)", lambda b: b.first_fit(items, 100)
    yield "best_fit (20k items)", lambda b: b.best_fit(items, 100)
    yield "reachable_fills (u=100)", lambda b: b.reachable_fills(sizes, caps, 100)
    yield (
        f"cover_search ({len(vecs)} configs)",
        lambda b: b.cover_search(list(demand.item_counts()), vecs, sizes, None, 200_000),
    )


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    py = kernels.python_backend
    cy = kernels.compiled_backend
    if cy is None:
        print("compiled extension not built; only the Python backend is available", file=sys.stderr)
        return 1
    print(f"{'kernel':32} {'python ms':>11} {'cython ms':>11} {'speedup':>8}  same")
    ok = True
    for name, call in cases(args.seed):
        tp, op = _time(lambda: call(py), args.repeat)
        tc, oc = _time(lambda: call(cy), args.repeat)
        same = op == oc
        ok &= same
        print(f"{name:32} {tp * 1e3:11.2f} {tc * 1e3:11.2f} {tp / tc:8.1f}  {'yes' if same else 'NO'}")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
