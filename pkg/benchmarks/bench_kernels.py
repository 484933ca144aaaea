"""Time real-root isolation and a full solve on both kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat 200]
"""

import argparse
import timeit

import numpy as np

from hslab import _kernels_py
from hslab.hpop import classical_operator, sandwich_operator
from hslab.realpoly import from_roots

try:
    from hslab import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def bench_roots(mod, degree, repeat):
    rng = np.random.default_rng(degree)
    c = np.ascontiguousarray(from_roots(np.sort(rng.uniform(-1, 1, degree))).coeffs, dtype=float)
    t = timeit.timeit(lambda: mod.real_roots(c, 1e-12), number=repeat)
    return t / repeat


def bench_solve(backend, repeat):
    import hslab.realpoly as rp
    from hslab.solver import solve_all

    saved = rp.kernels
    rp.kernels = backend
    try:
        S = sandwich_operator(from_roots([-2, -1, 0, 1]), 0, 2)
        L = classical_operator([-1, 1], [1, 1])
        t = timeit.timeit(lambda: (solve_all(S, 4), solve_all(L, 8)), number=repeat)
    finally:
        rp.kernels = saved
    return t / repeat


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.insert(0, ("cython", _kernels_c))
    else:
        print("compiled backend unavailable; timing the fallback only")
    print(f"{'kernel':<22}" + "".join(f"{name:>14}" for name, _ in backends))
    for degree in (4, 8, 12, 16):
        row = [bench_roots(mod, degree, args.repeat) for _, mod in backends]
        print(f"real_roots deg {degree:<7}" + "".join(f"{t * 1e6:>11.1f} us" for t in row))
    row = [bench_solve(mod, max(1, args.repeat // 100)) for _, mod in backends]
    print(f"{'solve_all sweep':<22}" + "".join(f"{t * 1e3:>11.1f} ms" for t in row))


if __name__ == "__main__":
    main()
