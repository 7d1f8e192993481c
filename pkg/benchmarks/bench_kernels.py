#!/usr/bin/env python3
"""Benchmark the compiled slot-simulation kernel against the numpy fallback.

Runs the same seeded simulation through each available backend, checks the
outputs agree bit for bit, and reports slots/second. Example:

    python benchmarks/bench_kernels.py --horizon 2000000 --links 6
"""

import argparse
import time

import numpy as np

from agenet import Network, Policy, available_backends, bernoulli_draws, kernel_backend, simulate
from agenet._backend import get_backend


def ring_network(n: int) -> Network:
    if n == 1:
        return Network.from_pairs(gamma=[0.9])
    pairs = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(0, 1)]
    gammas = [0.5 + 0.5 * (i % 2) for i in range(n)]  # alternate 0.5 / 1.0
    return Network.from_pairs(gamma=gammas, pairs=pairs)


def bench(backend: str, net: Network, policy: Policy, horizon: int, seed: int, repeat: int):
    best = float("inf")
    stats = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        stats = simulate(net, policy, horizon, seed, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, stats


def bench_kernel_only(backend: str, net: Network, policy: Policy, blocks: int, repeat: int):
    """Time sim_block alone on pre-drawn slots (excludes the RNG draws)."""
    kern = get_backend(backend)
    block = 1 << 16
    u, s = bernoulli_draws(net, policy, block, seed=1)
    indptr, indices = net.neighbor_csr
    n = net.num_links
    best = float("inf")
    for _ in range(repeat):
        age = np.ones(n, dtype=np.int64)
        acc = [np.zeros(n, dtype=np.int64) for _ in range(4)]
        t0 = time.perf_counter()
        for _ in range(blocks):
            kern.sim_block(u, s, indptr, indices, age, *acc)
        best = min(best, time.perf_counter() - t0)
    return best, blocks * block


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=1_000_000)
    parser.add_argument("--links", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    net = ring_network(args.links)
    policy = Policy.uniform(args.links, 0.35)
    backends = available_backends()
    print(f"backends available: {', '.join(backends)} (default: {kernel_backend()})")
    if "compiled" not in backends:
        print("note: compiled kernel not built; benchmarking the fallback only")

    results = {}
    for backend in backends:
        elapsed, stats = bench(backend, net, policy, args.horizon, args.seed, args.repeat)
        results[backend] = (elapsed, stats)
        rate = args.horizon / elapsed
        print(
            f"{backend:>9}: {elapsed * 1e3:8.1f} ms for {args.horizon} slots "
            f"x {args.links} links  ({rate:,.0f} slots/s)"
        )

    if len(results) == 2:
        a, b = results["compiled"][1], results["numpy"][1]
        identical = np.array_equal(a.avg_age, b.avg_age) and np.array_equal(
            a.peak_age, b.peak_age, equal_nan=True
        )
        print(f"outputs bit-identical: {identical}")
        speedup = results["numpy"][0] / results["compiled"][0]
        print(f"compiled speedup over numpy (end to end, RNG included): {speedup:.2f}x")

    blocks = max(1, args.horizon >> 16)
    print(f"\nkernel-only (no RNG), {blocks} blocks of 65536 slots:")
    kernel_times = {}
    for backend in backends:
        elapsed, slots = bench_kernel_only(backend, net, policy, blocks, args.repeat)
        kernel_times[backend] = elapsed
        print(f"{backend:>9}: {elapsed * 1e3:8.1f} ms  ({slots / elapsed:,.0f} slots/s)")
    if len(kernel_times) == 2:
        print(f"compiled kernel speedup: {kernel_times['numpy'] / kernel_times['compiled']:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
