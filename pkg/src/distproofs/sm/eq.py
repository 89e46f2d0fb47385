"""Equality protocols: full-input and Reed-Solomon row/column sampling."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .. import kernels
from ..field import bits_for, is_prime
from .core import SmProtocol


def _next_prime(m: int) -> int:
    p = max(2, m)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class ReedSolomonCode:
    """Codewords are evaluations at 0..m-1 of the message polynomial over F_q.

    An ``n``-bit input is zero-padded to ``k*b`` bits and cut into ``k``
    symbols of ``b`` bits (first character most significant), which become
    the coefficients. The ``m = side**2`` symbols are read row-major into a
    ``side x side`` matrix.
    """

    n: int
    k: int
    side: int
    q: int
    symbol_bits: int

    @property
    def m(self) -> int:
        return self.side * self.side

    @property
    def field_bits(self) -> int:
        return bits_for(self.q - 1)

    @property
    def index_bits(self) -> int:
        return bits_for(self.side - 1)

    @classmethod
    def for_bits(cls, n: int, rate=Fraction(1, 3)) -> "ReedSolomonCode":
        rate = Fraction(rate)
        if not 0 < rate < 1:
            raise ValueError("rate must lie in (0, 1)")
        if n < 1:
            raise ValueError("input length must be positive")
        side = 2
        while True:
            m = side * side
            k = int(rate * m)
            q = _next_prime(m)
            b = q.bit_length() - 1
            if k >= 1 and k * b >= n:
                return cls(n, k, side, q, b)
            side += 1

    def symbols(self, bits: str) -> list[int]:
        if len(bits) != self.n or any(ch not in "01" for ch in bits):
            raise ValueError(f"expected a {self.n}-bit string")
        padded = bits.ljust(self.k * self.symbol_bits, "0")
        b = self.symbol_bits
        return [int(padded[i * b:(i + 1) * b], 2) for i in range(self.k)]

    def encode(self, bits: str) -> np.ndarray:
        coeffs = np.asarray(self.symbols(bits), dtype=np.int64)
        return kernels.poly_eval_points(coeffs, np.arange(self.m, dtype=np.int64), self.q)

    def matrix(self, bits: str) -> np.ndarray:
        return _matrix(self, bits)

    def agreement(self, x: str, y: str) -> int:
        return int(kernels.agreement_matrix(self.encode(x)[None, :], self.encode(y)[None, :])[0, 0])


@lru_cache(maxsize=1 << 14)
def _matrix(code: ReedSolomonCode, bits: str) -> np.ndarray:
    mat = code.encode(bits).reshape(code.side, code.side)
    mat.flags.writeable = False
    return mat


def full_input_equality(n: int) -> SmProtocol:
    """Alice sends x, Bob sends y, the referee compares."""
    one = Fraction(1)
    return SmProtocol(
        name="eq-full",
        input_bits=n,
        alice=lambda x, m: [(x, one)],
        bob=lambda y, m: [(y, one)],
        referee=lambda a, b, m: Fraction(int(a == b)),
        message_bits=len,
        max_message_bits=n,
        error=Fraction(0),
    )


def eq_private(n: int, rate=Fraction(1, 3), reps: int = 1, proof_bits: int = 0) -> SmProtocol:
    """Private-coin equality: random row against random column, ``reps`` times.

    ``proof_bits`` adds a proof that every party ignores.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    code = ReedSolomonCode.for_bits(n, rate)
    side = code.side
    weight = Fraction(1, side**reps)
    per_rep = code.index_bits + side * code.field_bits

    @lru_cache(maxsize=None)
    def alice(x, m):
        mat = code.matrix(x)
        return tuple((tuple((r, tuple(int(v) for v in mat[r])) for r in rows), weight)
                     for rows in itertools.product(range(side), repeat=reps))

    @lru_cache(maxsize=None)
    def bob(y, m):
        mat = code.matrix(y)
        return tuple((tuple((c, tuple(int(v) for v in mat[:, c])) for c in cols), weight)
                     for cols in itertools.product(range(side), repeat=reps))

    def referee(omega, phi, m):
        return Fraction(int(all(row[j] == col[i] for (i, row), (j, col) in zip(omega, phi))))

    return SmProtocol(
        name="eq-private",
        input_bits=n,
        alice=alice,
        bob=bob,
        referee=referee,
        message_bits=lambda msg: len(msg) * per_rep,
        max_message_bits=reps * per_rep,
        error=Fraction(code.k - 1, code.m) ** reps,
        proofs=tuple(range(1 << proof_bits)),
        honest_proof=lambda x, y: 0,
        meta={"code": code, "reps": reps},
    )
