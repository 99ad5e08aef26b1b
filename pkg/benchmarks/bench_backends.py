"""Timing comparison of the compiled SVM kernels against the pure-Python
fallback.

Run from the repository root:

    python3 benchmarks/bench_backends.py [--sizes 200,500,1000] [--repeats 3]

Prints one table per routine (dual coordinate descent, SMO) with the best
wall time per backend and the speedup. Exits with a note instead of a table
when the compiled extension is unavailable.
"""

import argparse
import time

import numpy as np

from fairpca import _inner
from fairpca._inner import _svm_py


def _data(rng, n, p=12):
    X = rng.standard_normal((n, p))
    w = rng.standard_normal(p)
    y = np.where(X @ w + 0.3 * rng.standard_normal(n) > 0, 1.0, -1.0)
    Xb = np.ascontiguousarray(np.hstack([X, np.ones((n, 1))]))
    return Xb, y


def _best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_dcd(sizes, repeats):
    rows = []
    for n in sizes:
        rng = np.random.default_rng(n)
        Xb, y = _data(rng, n)
        cost = np.full(n, 1.0 / n)
        args = (Xb, y, cost, 300, 1e-6)
        t_c = _best_of(lambda: _inner.dcd_fit(*args), repeats)
        t_py = _best_of(lambda: _svm_py.dcd_fit(*args), repeats)
        rows.append((n, t_c, t_py))
    return rows


def bench_smo(sizes, repeats):
    rows = []
    for n in sizes:
        rng = np.random.default_rng(n + 1)
        Xb, y = _data(rng, n)
        K = np.ascontiguousarray(Xb @ Xb.T)
        cost = np.full(n, 1.0 / n)
        args = (K, y, cost, 1e-3, 20 * n)
        t_c = _best_of(lambda: _inner.smo_fit(*args), repeats)
        t_py = _best_of(lambda: _svm_py.smo_fit(*args), repeats)
        rows.append((n, t_c, t_py))
    return rows


def _print_table(title, rows):
    print(f"\n{title}")
    print(f"{'n':>6}  {'compiled':>10}  {'python':>10}  {'speedup':>8}")
    for n, t_c, t_py in rows:
        print(f"{n:>6}  {t_c:>9.4f}s  {t_py:>9.4f}s  {t_py / t_c:>7.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="200,500,1000")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s]

    if _inner.BACKEND != "compiled":
        print("compiled extension not built (backend is "
              f"{_inner.BACKEND!r}); nothing to compare")
        return

    print(f"backend: {_inner.BACKEND}; repeats: {args.repeats} (best shown)")
    _print_table("dual coordinate descent (linear SVM)",
                 bench_dcd(sizes, args.repeats))
    _print_table("SMO (kernel SVM)", bench_smo(sizes, args.repeats))


if __name__ == "__main__":
    main()
