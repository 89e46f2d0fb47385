"""Hot numeric kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when importable; setting the environment
variable ``DISTPROOFS_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("DISTPROOFS_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

# products of two residues must fit in a signed 64-bit word
MAX_MODULUS = 1 << 31


def _check_q(q: int) -> int:
    q = int(q)
    if not 2 <= q < MAX_MODULUS:
        raise ValueError(f"modulus {q} outside supported range [2, 2^31)")
    return q


def poly_eval_table(coeffs, q: int) -> np.ndarray:
    """Values of each coefficient row at every point of F_q, shape (P, q)."""
    q = _check_q(q)
    arr = np.ascontiguousarray(np.atleast_2d(coeffs), dtype=np.int64) % q
    if arr.shape[1] == 0:
        return np.zeros((arr.shape[0], q), dtype=np.int64)
    return _impl.poly_eval_table(arr, q)


def poly_eval_points(coeffs, points, q: int) -> np.ndarray:
    q = _check_q(q)
    c = np.ascontiguousarray(coeffs, dtype=np.int64) % q
    pts = np.ascontiguousarray(points, dtype=np.int64).ravel()
    if c.size == 0:
        return np.zeros(pts.shape, dtype=np.int64)
    return _impl.poly_eval_points(c, pts, q)


def agreement_matrix(a, b=None) -> np.ndarray:
    """Count equal positions between every row of ``a`` and every row of ``b``."""
    a = np.ascontiguousarray(np.atleast_2d(a), dtype=np.int64)
    b = a if b is None else np.ascontiguousarray(np.atleast_2d(b), dtype=np.int64)
    if a.shape[1] != b.shape[1]:
        raise ValueError("row widths differ")
    return _impl.agreement_matrix(a, b)


__all__ = ["BACKEND", "poly_eval_table", "poly_eval_points", "agreement_matrix"]
