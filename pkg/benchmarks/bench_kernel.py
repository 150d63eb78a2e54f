"""Benchmark the ring-walk kernel: compiled extension vs NumPy fallback.

Usage: python benchmarks/bench_kernel.py [npoints]

Evaluates the unwinding map (forward and inverse) on the reference scene
(alpha=0.5, depth 3, 15 rings) with both backends and reports throughput.
"""

import sys
import time

import numpy as np

import mtx
from mtx import kernel


def bench(walk, z, arrays, t, inverse, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = walk(z, t, *arrays, 3, inverse)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 10**6
    tree = mtx.build_cells(mtx.IfsSpec(0.5), 3)
    rings = mtx.place_rings(tree, 0.25, 2.0)
    arrays = rings.arrays()
    rng = np.random.default_rng(7)
    z = 4.4 * (rng.random(n) - 0.5) + 4.4j * (rng.random(n) - 0.5)

    have_ext = kernel.backend_name() == "cython"
    rows = []
    for label, inverse in (("forward", False), ("inverse", True)):
        t_py, out_py = bench(kernel.python_ring_walk, z, arrays, 0.37, inverse)
        row = {"op": label, "python": t_py}
        if have_ext:
            t_cy, out_cy = bench(kernel.ring_walk, z, arrays, 0.37, inverse)
            err = float(np.abs(out_cy - out_py).max())
            row.update(cython=t_cy, err=err)
        rows.append(row)

    print(f"ring-walk kernel benchmark: {n} points, depth-3 scene "
          f"(active backend: {kernel.backend_name()})")
    header = f"{'op':>8} | {'numpy fallback':>16} | {'cython':>12} | {'speedup':>8} | {'max diff':>10}"
    print(header)
    print("-" * len(header))
    for row in rows:
        py = f"{row['python'] * 1e9 / n:8.1f} ns/pt"
        if have_ext:
            cy = f"{row['cython'] * 1e9 / n:6.1f} ns/pt"
            sp = f"{row['python'] / row['cython']:7.1f}x"
            err = f"{row['err']:10.2e}"
        else:
            cy, sp, err = "n/a", "n/a", "n/a"
        print(f"{row['op']:>8} | {py:>16} | {cy:>12} | {sp:>8} | {err:>10}")


if __name__ == "__main__":
    main()
