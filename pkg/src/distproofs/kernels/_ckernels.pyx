# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular-arithmetic kernels.

Inputs are C-contiguous int64 arrays with entries already reduced mod q.
"""
import numpy as np


def poly_eval_table(const long long[:, ::1] coeffs, long long q):
    """Evaluate every row of ``coeffs`` at every point of F_q (Horner)."""
    cdef Py_ssize_t p_count = coeffs.shape[0], d = coeffs.shape[1]
    out = np.empty((p_count, q), dtype=np.int64)
    cdef long long[:, ::1] res = out
    cdef Py_ssize_t p, j
    cdef long long s, acc
    for p in range(p_count):
        for s in range(q):
            acc = 0
            for j in range(d - 1, -1, -1):
                acc = (acc * s + coeffs[p, j]) % q
            res[p, s] = acc
    return out


def poly_eval_points(const long long[::1] coeffs, const long long[::1] points, long long q):
    cdef Py_ssize_t b = points.shape[0], d = coeffs.shape[0]
    out = np.empty(b, dtype=np.int64)
    cdef long long[::1] res = out
    cdef Py_ssize_t i, j
    cdef long long s, acc
    for i in range(b):
        s = points[i]
        acc = 0
        for j in range(d - 1, -1, -1):
            acc = (acc * s + coeffs[j]) % q
        res[i] = acc
    return out


def agreement_matrix(const long long[:, ::1] a, const long long[:, ::1] b):
    """Entry (i, j) counts the positions where rows a[i] and b[j] agree."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], width = a.shape[1]
    out = np.zeros((na, nb), dtype=np.int64)
    cdef long long[:, ::1] res = out
    cdef Py_ssize_t i, j, k
    cdef long long c
    for i in range(na):
        for j in range(nb):
            c = 0
            for k in range(width):
                if a[i, k] == b[j, k]:
                    c += 1
            res[i, j] = c
    return out
