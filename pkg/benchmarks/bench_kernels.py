"""Compiled vs pure-Python kernels.

Loads both backend modules directly, checks they agree, and prints the
best-of-N wall time for each kernel at a few sizes.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from distproofs.kernels import _pykernels

try:
    from distproofs.kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng: np.random.Generator):
    for q, rows, deg in ((257, 64, 16), (65537, 4, 32)):
        coeffs = rng.integers(0, q, size=(rows, deg), dtype=np.int64)
        yield f"poly_eval_table q={q} rows={rows} deg={deg}", "poly_eval_table", (coeffs, q)
    q = (1 << 31) - 1
    coeffs = rng.integers(0, q, size=256, dtype=np.int64)
    points = rng.integers(0, q, size=1 << 14, dtype=np.int64)
    yield "poly_eval_points deg=256 points=16384", "poly_eval_points", (coeffs, points, q)
    for rows, width in ((256, 64), (1024, 16)):
        a = rng.integers(0, 4, size=(rows, width), dtype=np.int64)
        yield f"agreement_matrix {rows}x{rows} width={width}", "agreement_matrix", (a, a)


def best_time(fn, args, repeat: int) -> float:
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':44s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for label, name, call in cases(rng):
        py_fn = getattr(_pykernels, name)
        t_py = best_time(py_fn, call, args.repeat)
        if _ckernels is None:
            print(f"{label:44s} {t_py * 1e3:10.2f} {'-':>10s} {'-':>8s}")
            continue
        c_fn = getattr(_ckernels, name)
        if not np.array_equal(np.asarray(py_fn(*call)), np.asarray(c_fn(*call))):
            raise SystemExit(f"backends disagree on {label}")
        t_c = best_time(c_fn, call, args.repeat)
        print(f"{label:44s} {t_py * 1e3:10.2f} {t_c * 1e3:10.2f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
