"""Prime fields and the polynomial fingerprints evaluated over them.

Two fingerprint families are used:

* ``id_poly``: coefficient ``i`` is bit ``i`` of an identifier, least
  significant first, so the constant term is the low bit.
* ``label_poly``: coefficient of ``z**i`` is the ``i``-th character of a
  bit string, counted from 1. There is no constant term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels

DEFAULT_C = 2


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def smallest_prime_in(lo: int, hi: int) -> int:
    """Least prime in the closed range [lo, hi]."""
    if lo < 2 or lo > hi:
        raise ValueError(f"invalid prime search range [{lo}, {hi}]")
    for p in range(lo, hi + 1):
        if is_prime(p):
            return p
    raise ValueError(f"no prime in [{lo}, {hi}]")


def bits_for(max_value: int) -> int:
    """Width needed to encode every integer in [0, max_value]."""
    return max(1, int(max_value).bit_length())


def ceil_log_power(n: int, e: int) -> int:
    """ceil(log2(n) ** e); exact when log2(n) is an integer."""
    if n < 1:
        raise ValueError("n must be positive")
    if n & (n - 1) == 0:
        return (n.bit_length() - 1) ** e
    val = math.log2(n) ** e
    near = round(val)
    if abs(val - near) < 1e-9:
        return near
    return math.ceil(val)


def amos_modulus(n: int, c: int = DEFAULT_C) -> int:
    """Modulus for the shared-coin AMOS fingerprint protocol.

    Searches [log^{c+2} n, 2 log^{c+2} n] with the lower end clamped to 2.
    """
    lo = max(2, ceil_log_power(n, c + 2))
    return smallest_prime_in(lo, 2 * lo)


def tce_modulus(n: int, c: int = DEFAULT_C) -> int:
    """Modulus for the shared-coin 2-coloring-with-equal-labels protocol."""
    if n < 1:
        raise ValueError("label length must be positive")
    lo = max(2, n ** (c + 2))
    return smallest_prime_in(lo, 2 * lo)


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"{self.q} is not prime")

    def check(self, s: int) -> int:
        if not 0 <= s < self.q:
            raise ValueError(f"field element {s} outside [0, {self.q})")
        return s


@dataclass(frozen=True)
class FingerprintPoly:
    coeffs: tuple[int, ...]
    q: int

    def __post_init__(self):
        if any(not 0 <= c < self.q for c in self.coeffs):
            raise ValueError("coefficients must be reduced mod q")

    @property
    def degree(self) -> int:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    def __call__(self, s: int) -> int:
        return eval_poly(self, s)


def id_poly(id_: int, q: int) -> FingerprintPoly:
    if id_ < 1:
        raise ValueError("identifiers are positive")
    bits = [(id_ >> i) & 1 for i in range(id_.bit_length())]
    return FingerprintPoly(tuple(b % q for b in bits), q)


def label_poly(label: str, q: int) -> FingerprintPoly:
    if any(ch not in "01" for ch in label):
        raise ValueError(f"label {label!r} is not a bit string")
    return FingerprintPoly((0,) + tuple(int(ch) % q for ch in label), q)


def eval_poly(p: FingerprintPoly, s: int) -> int:
    if not 0 <= s < p.q:
        raise ValueError(f"evaluation point {s} outside [0, {p.q})")
    acc = 0
    for c in reversed(p.coeffs):
        acc = (acc * s + c) % p.q
    return acc


def eval_many(p: FingerprintPoly, points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.int64)
    if pts.size and (pts.min() < 0 or pts.max() >= p.q):
        raise ValueError("evaluation point outside the field")
    return kernels.poly_eval_points(p.coeffs, pts, p.q).reshape(pts.shape)


def value_table(polys, q: int) -> np.ndarray:
    """Row i holds polys[i] evaluated at 0..q-1."""
    polys = list(polys)
    if not polys:
        return np.zeros((0, q), dtype=np.int64)
    width = max(len(p.coeffs) for p in polys)
    mat = np.zeros((len(polys), max(width, 1)), dtype=np.int64)
    for i, p in enumerate(polys):
        mat[i, : len(p.coeffs)] = p.coeffs
    return kernels.poly_eval_table(mat, q)


def agreement_count(p1: FingerprintPoly, p2: FingerprintPoly) -> int:
    """Number of points of F_q where the two polynomials coincide."""
    if p1.q != p2.q:
        raise ValueError("polynomials over different fields")
    t = value_table([p1, p2], p1.q)
    return int(np.count_nonzero(t[0] == t[1]))


@lru_cache(maxsize=4096)
def id_fingerprints(id_: int, q: int) -> np.ndarray:
    """Read-only table of id_poly(id_) over all of F_q."""
    row = value_table([id_poly(id_, q)], q)[0]
    row.flags.writeable = False
    return row


@lru_cache(maxsize=4096)
def label_fingerprints(label: str, q: int) -> np.ndarray:
    row = value_table([label_poly(label, q)], q)[0]
    row.flags.writeable = False
    return row
