"""Compare the compiled nearest-point kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--points N] [--repeat R]``.
"""

import argparse
import timeit

import numpy as np

from banachgap import _kernels_py as pure
from banachgap import kernels

try:
    from banachgap import _kernels as compiled
except ImportError:
    compiled = None


def cases(n: int, d: int, rng):
    a = np.ascontiguousarray(rng.standard_normal((n, d)))
    b = np.ascontiguousarray(rng.standard_normal((n, d)))
    return {
        "row_min_cheb": lambda m: m.row_min_cheb(a, b),
        "row_min_lp(p=1)": lambda m: m.row_min_lp(a, b, 1.0),
        "row_min_lp(p=1.5)": lambda m: m.row_min_lp(a, b, 1.5),
        "sup_min_cheb": lambda m: m.sup_min_cheb(a, b),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--points", type=int, default=2000, help="points per cloud")
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"selected backend: {kernels.BACKEND}; clouds {args.points} x {args.dim}")
    print(f"{'kernel':<20} {'python [s]':>12} {'compiled [s]':>13} {'speedup':>9}")
    for name, fn in cases(args.points, args.dim, rng).items():
        tp = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:<20} {tp:>12.4f} {'n/a':>13} {'':>9}")
            continue
        tc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        print(f"{name:<20} {tp:>12.4f} {tc:>13.4f} {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
