#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two K-means hot loops (nearest-centroid assignment and centroid
accumulation) on synthetic data and prints per-backend timings plus the
speedup.  Outputs of the two backends are also compared bit-for-bit.

Usage:
    python3 benchmarks/bench_kernels.py [--frames 200000] [--dims 64]
                                        [--clusters 512] [--repeat 3]
"""

import argparse
import time

import numpy as np

from modmi._kernels import accumulate_means, assign_labels, available_backends


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=200_000)
    parser.add_argument("--dims", type=int, default=64)
    parser.add_argument("--clusters", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.Generator(np.random.PCG64(args.seed))
    x = np.ascontiguousarray(rng.standard_normal((args.frames, args.dims)))
    centroids = np.ascontiguousarray(rng.standard_normal((args.clusters, args.dims)))

    backends = available_backends()
    print(f"frames={args.frames} dims={args.dims} clusters={args.clusters} repeat={args.repeat}")
    print(f"backends available: {', '.join(sorted(backends))}")
    print()
    print(f"{'backend':<10} {'assign [s]':>12} {'update [s]':>12}")

    results = {}
    timings = {}
    for name in sorted(backends):
        impl = backends[name]
        t_assign, (labels, dist2) = best_of(
            args.repeat, lambda impl=impl: assign_labels(x, centroids, backend=impl)
        )
        t_update, (sums, counts) = best_of(
            args.repeat,
            lambda impl=impl, labels=labels: accumulate_means(
                x, labels, args.clusters, backend=impl
            ),
        )
        results[name] = (labels, dist2, sums, counts)
        timings[name] = (t_assign, t_update)
        print(f"{name:<10} {t_assign:>12.4f} {t_update:>12.4f}")

    if len(backends) == 2:
        identical = all(
            np.array_equal(a, b) for a, b in zip(results["python"], results["compiled"])
        )
        print()
        print(f"outputs bit-identical across backends: {identical}")
        pa, pu = timings["python"]
        ca, cu = timings["compiled"]
        print(f"speedup (python/compiled): assign {pa / ca:.2f}x, update {pu / cu:.2f}x")
    else:
        print()
        print("compiled backend not built; run: python3 setup.py build_ext --inplace")


if __name__ == "__main__":
    main()
