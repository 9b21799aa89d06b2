"""Timing comparison of the numba and numpy kernel backends.

Runs every kernel on matched inputs under both implementations, confirms the
outputs agree bit for bit, and prints a speedup table. Usage:

    python3 benchmarks/bench_kernels.py [--size N] [--repeats R]

The numba timings exclude compilation (a warmup call runs first).
"""

import argparse
import sys
import timeit

import numpy as np

from bipotkit import kernels


def time_call(fn, *args, repeats=5, number=3):
    best = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeats))
    return best / number


def equal(a, b):
    if isinstance(a, tuple):
        return all(equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def build_cases(size, rng):
    xs = rng.uniform(-1, 1, size=(size, 3))
    ys = rng.uniform(-1, 1, size=(size, 3))
    values = rng.uniform(-1, 1, size=size)
    pairings = kernels.pairing_matrix_np(xs, ys)
    x1 = np.sort(rng.uniform(-2, 2, size=size))
    y1 = np.sort(rng.uniform(-2, 2, size=size))
    m = min(size, 400)  # the sweeps are quadratic per iteration
    w = rng.uniform(-1, 1, size=(m, m))
    np.fill_diagonal(w, 0.0)
    nonpos = w - np.abs(w).max()
    nx2 = rng.uniform(0, 4, size=size)
    ny2 = rng.uniform(0, 4, size=size)
    lams = np.geomspace(1e-4, 1e4, 512)
    return [
        ("pairing_matrix", (xs, ys)),
        ("conjugate_bruteforce", (pairings, values)),
        ("conjugate_merge", (x1, values, y1)),
        ("bellman_ford", (w,)),
        ("longest_path", (nonpos, 0)),
        ("quadratic_grid_min", (nx2, ny2, lams)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=600,
                        help="points per kernel input (default 600)")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    if not kernels.HAS_NUMBA:
        print("numba is not installed; only the numpy backend is available")
        return 1

    rng = np.random.default_rng(99)
    cases = build_cases(args.size, rng)

    print(f"kernel benchmark, size={args.size}, best of {args.repeats}")
    print(f"{'kernel':<22} {'numpy':>10} {'numba':>10} {'speedup':>9}  parity")
    mismatched = False
    for name, inputs in cases:
        fn_np = getattr(kernels, name + "_np")
        fn_nb = getattr(kernels, name + "_nb")
        out_np = fn_np(*inputs)
        out_nb = fn_nb(*inputs)  # also triggers compilation before timing
        same = equal(out_np, out_nb)
        mismatched |= not same
        t_np = time_call(fn_np, *inputs, repeats=args.repeats)
        t_nb = time_call(fn_nb, *inputs, repeats=args.repeats)
        print(f"{name:<22} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms "
              f"{t_np / t_nb:>8.1f}x  {'bit-identical' if same else 'MISMATCH'}")
    if mismatched:
        print("backend outputs differ; the fallback path is broken")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
