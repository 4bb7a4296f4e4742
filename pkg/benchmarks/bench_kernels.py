#!/usr/bin/env python3
"""Benchmark the pair-minimisation kernel: compiled extension vs pure twin.

The per-node work (64-point gamma scan plus golden-section refinements over
a scalar objective) is the one loop numpy cannot vectorise, which is why it
is compiled.  This script times both backends on identical Gram batches and
cross-checks that they return the same minima.

Usage: python3 benchmarks/bench_kernels.py [n_nodes]
"""

import sys
import time

import numpy as np

from qpathdist import _pairmin_py, kernels

try:
    from qpathdist import _pairmin

    BACKENDS = [("compiled", _pairmin), ("pure-python", _pairmin_py)]
except ImportError:
    print("compiled extension not built; benchmarking the pure twin only")
    BACKENDS = [("pure-python", _pairmin_py)]


def random_gram(rng, n):
    dim = 6
    psi1 = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    psi2 = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    psi1 /= np.linalg.norm(psi1, axis=1)[:, None]
    psi2 /= np.linalg.norm(psi2, axis=1)[:, None]
    u1 = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    u2 = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    dot = lambda a, b: np.einsum("ij,ij->i", a.conj(), b)
    return (dot(u1, u1).real, dot(u2, u2).real,
            dot(psi1, u1).real, dot(psi2, u2).real,
            dot(psi1, psi2), dot(u1, u2), dot(u1, psi2), dot(psi1, u2))


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    rng = np.random.default_rng(0)
    gram = random_gram(rng, n)

    results = {}
    for name, impl in BACKENDS:
        best = np.inf
        for _ in range(3):
            t0 = time.perf_counter()
            vals, *_ = kernels.pair_joint_minimize(*gram, impl=impl)
            best = min(best, time.perf_counter() - t0)
        results[name] = (best, vals)
        print(f"{name:>12}: {best * 1e3:8.2f} ms total, "
              f"{best / n * 1e6:7.2f} us/node")

    if len(results) == 2:
        dev = np.max(np.abs(results["compiled"][1]
                            - results["pure-python"][1]))
        speedup = results["pure-python"][0] / results["compiled"][0]
        print(f"{'':>12}  speedup x{speedup:.1f}, max value deviation {dev:.2e}")


if __name__ == "__main__":
    main()
