"""Compiled vs. pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat 3]

Two workloads per machine size: the estimator recursion over one long
trace, and the exhaustive decentralized-vs-monolithic comparison that the
exactness suites run.
"""

import argparse
import random
import time

from symest.chains import chain_decomposition
from symest.distributed import derive_distributed, exhaustive_agreement
from symest.estimator import prior_mask
from symest.kernels import NATIVE_AVAILABLE
from symest.verify import GenConfig, random_machine, sample_accepted


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_run(m, trace, backend, repeat):
    tables = m.kernel_tables(backend)
    syms = m.symbol_ids(trace.symbols)
    prior = prior_mask(m, 0)
    return best_of(lambda: tables.run(syms, prior), repeat)


def bench_exhaustive(f, depth, backend, repeat):
    return best_of(lambda: exhaustive_agreement(f, depth, backend=backend), repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trace-len", type=int, default=200_000)
    ap.add_argument("--depth", type=int, default=7)
    args = ap.parse_args()
    if not NATIVE_AVAILABLE:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")

    print(f"{'states':>6} {'workload':<22} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for n in (8, 16, 32, 64):
        c = GenConfig(seed=n, min_states=n, max_states=n, min_symbols=6, max_symbols=6,
                      density=0.15, chain_decomposable=True, non_blocking=True)
        m = random_machine(c)
        rng = random.Random(n)
        trace = sample_accepted(m, rng, args.trace_len, tau=1)
        if trace is not None:
            py = bench_run(m, trace, "python", args.repeat)
            cy = bench_run(m, trace, "cython", args.repeat)
            print(f"{n:>6} {'run ' + str(args.trace_len):<22} {py:>10.4f} {cy:>10.4f} {py / cy:>7.1f}x")
        f = derive_distributed(m, chain_decomposition(m, 2))
        checks, _ = exhaustive_agreement(f, args.depth)
        py = bench_exhaustive(f, args.depth, "python", 1)
        cy = bench_exhaustive(f, args.depth, "cython", args.repeat)
        label = f"exhaustive {checks} strings"
        print(f"{n:>6} {label:<22} {py:>10.4f} {cy:>10.4f} {py / cy:>7.1f}x")


if __name__ == "__main__":
    main()
