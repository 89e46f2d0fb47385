"""Pure-Python versions of the compiled kernels (same signatures and results)."""

import numpy as np


def poly_eval_table(coeffs, q):
    rows = [[int(c) for c in row] for row in coeffs]
    q = int(q)
    out = np.empty((len(rows), q), dtype=np.int64)
    for p, row in enumerate(rows):
        rev = row[::-1]
        vals = []
        for s in range(q):
            acc = 0
            for c in rev:
                acc = (acc * s + c) % q
            vals.append(acc)
        out[p] = vals
    return out


def poly_eval_points(coeffs, points, q):
    rev = [int(c) for c in coeffs][::-1]
    q = int(q)
    vals = []
    for s in points:
        s = int(s)
        acc = 0
        for c in rev:
            acc = (acc * s + c) % q
        vals.append(acc)
    return np.asarray(vals, dtype=np.int64)


def agreement_matrix(a, b):
    ra = [tuple(int(v) for v in row) for row in a]
    rb = [tuple(int(v) for v in row) for row in b]
    out = np.zeros((len(ra), len(rb)), dtype=np.int64)
    for i, x in enumerate(ra):
        out[i] = [sum(1 for u, v in zip(x, y) if u == v) for y in rb]
    return out
