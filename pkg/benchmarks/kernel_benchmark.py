#!/usr/bin/env python3
"""Benchmark the compiled fixed-point kernel against the NumPy fallback.

Times kurtosis_sweeps on whitened 4xN BPSK mixtures across frame sizes,
plus one end-to-end trial per backend for context. The two kernels run on
identical inputs; iteration counts are checked to match.

Usage: python benchmarks/kernel_benchmark.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from fdbss import _ica_numpy
from fdbss.config import SystemConfig
from fdbss.fastica import center, whiten
from fdbss.harness import run_trial

try:
    from fdbss import _ica_core
except ImportError:
    _ica_core = None


def make_instance(frame_size, seed):
    rng = np.random.default_rng(seed)
    sources = rng.integers(0, 2, (4, frame_size)) * 2.0 - 1.0
    mixed = rng.standard_normal((4, 4)) @ sources + 0.1 * rng.standard_normal((4, frame_size))
    z = whiten(center(mixed)[0]).whitened
    w0 = _ica_numpy._sym_orth(rng.standard_normal((4, 4)))
    return np.ascontiguousarray(z), np.ascontiguousarray(w0)


def time_kernel(kernel, instances, repeats):
    # warm up on the first instance
    kernel.kurtosis_sweeps(*instances[0], 1e-6, 1000)
    total_sweeps = 0
    start = time.perf_counter()
    for r in range(repeats):
        z, w0 = instances[r % len(instances)]
        _, iters, _, _ = kernel.kurtosis_sweeps(z, w0, 1e-6, 1000)
        total_sweeps += iters
    elapsed = time.perf_counter() - start
    return elapsed / repeats, total_sweeps


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200,
                        help="kernel calls per (backend, frame size) point")
    args = parser.parse_args()

    if _ica_core is None:
        print("compiled kernel not available; showing NumPy fallback only\n")

    print(f"{'N':>6} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for frame_size in (50, 150, 350, 500, 1000):
        instances = [make_instance(frame_size, seed) for seed in range(10)]
        t_py, sweeps_py = time_kernel(_ica_numpy, instances, args.repeats)
        if _ica_core is not None:
            t_cy, sweeps_cy = time_kernel(_ica_core, instances, args.repeats)
            assert sweeps_py == sweeps_cy, "backends disagreed on sweep counts"
            print(f"{frame_size:>6} {t_py * 1e6:>10.1f}us {t_cy * 1e6:>10.1f}us "
                  f"{t_py / t_cy:>8.1f}x")
        else:
            print(f"{frame_size:>6} {t_py * 1e6:>10.1f}us {'-':>12} {'-':>9}")

    # end-to-end trial timing for context (full pipeline, not just the kernel)
    config = SystemConfig(master_seed=1)
    for name, kernel_mod in [("python", _ica_numpy), ("compiled", _ica_core)]:
        if kernel_mod is None:
            continue
        import fdbss.fastica as fastica
        saved = fastica._KERNEL
        fastica._KERNEL = kernel_mod
        try:
            run_trial(config, 350, 10.0, 0)  # warm up
            start = time.perf_counter()
            for t in range(100):
                run_trial(config, 350, 10.0, t)
            per_trial = (time.perf_counter() - start) / 100
        finally:
            fastica._KERNEL = saved
        print(f"full trial (N=350, 10 dB), {name:>8} kernel: {per_trial * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
