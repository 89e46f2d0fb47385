"""Simultaneous-messages execution with exact rational distributions.

A protocol maps an input and a proof to a finite message distribution for
each party. Weights are ``Fraction`` objects summing to one. The referee
returns its acceptance probability as a ``Fraction``; a deterministic
referee returns 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Any, Callable, Sequence

import numpy as np

Dist = Sequence[tuple[Any, Fraction]]

DEFAULT_PROOF_CAP = 1 << 16


class MessageTooLong(RuntimeError):
    pass


def equality(x: str, y: str) -> bool:
    return x == y


@dataclass(frozen=True, eq=False)
class SmProtocol:
    name: str
    input_bits: int
    alice: Callable[[str, Any], Dist]
    bob: Callable[[str, Any], Dist]
    referee: Callable[[Any, Any, Any], Fraction]
    message_bits: Callable[[Any], int]
    max_message_bits: int
    error: Fraction
    proofs: tuple = (None,)
    honest_proof: Callable[[str, str], Any] = lambda x, y: None
    deterministic_referee: bool = True
    func: Callable[[str, str], bool] = equality
    meta: dict = field(default_factory=dict)

    def inputs(self) -> list[str]:
        return [format(i, f"0{self.input_bits}b") for i in range(1 << self.input_bits)]


@dataclass(frozen=True)
class SmInstance:
    protocol: SmProtocol
    x: str
    y: str

    @property
    def answer(self) -> bool:
        return self.protocol.func(self.x, self.y)


def _check_len(protocol: SmProtocol, msg) -> None:
    bits = protocol.message_bits(msg)
    if bits > protocol.max_message_bits:
        raise MessageTooLong(f"message of {bits} bits exceeds {protocol.max_message_bits}")


def _sample(dist: Dist, rng: np.random.Generator):
    den = lcm(*(w.denominator for _, w in dist))
    cum = np.cumsum([w.numerator * (den // w.denominator) for _, w in dist])
    u = int(rng.integers(0, den))
    return dist[int(np.searchsorted(cum, u, side="right"))][0]


def _bernoulli(p: Fraction, rng: np.random.Generator) -> bool:
    if p.denominator == 1:
        return bool(p.numerator)
    return int(rng.integers(0, p.denominator)) < p.numerator


def ma_sym_run(instance: SmInstance, proof, rng_seed: int) -> bool:
    """One execution: sample both messages, then the referee's coin."""
    p = instance.protocol
    rng = np.random.default_rng(rng_seed)
    omega = _sample(p.alice(instance.x, proof), rng)
    phi = _sample(p.bob(instance.y, proof), rng)
    _check_len(p, omega)
    _check_len(p, phi)
    return _bernoulli(p.referee(omega, phi, proof), rng)


def sm_run(instance: SmInstance, rng_seed: int) -> bool:
    """Plain SM execution with the protocol's honest (or only) proof."""
    return ma_sym_run(instance, instance.protocol.honest_proof(instance.x, instance.y), rng_seed)


def acceptance(protocol: SmProtocol, x: str, y: str, proof) -> Fraction:
    total = Fraction(0)
    for omega, wa in protocol.alice(x, proof):
        _check_len(protocol, omega)
        for phi, wb in protocol.bob(y, proof):
            r = protocol.referee(omega, phi, proof)
            if r:
                total += wa * wb * r
    return total


@dataclass(frozen=True)
class BestProof:
    value: Fraction
    proof: Any
    vacuous: bool = False


def ma_sym_best_proof(protocol: SmProtocol, x: str, y: str, cap: int = DEFAULT_PROOF_CAP) -> BestProof:
    """Maximum acceptance over the proof space.

    An empty proof space yields a vacuous result with value 0, which is a
    completeness failure whenever the function value is 1.
    """
    if len(protocol.proofs) > cap:
        raise ValueError(f"proof space of size {len(protocol.proofs)} exceeds cap {cap}")
    if not protocol.proofs:
        return BestProof(Fraction(0), None, vacuous=True)
    best = None
    for m in protocol.proofs:
        val = acceptance(protocol, x, y, m)
        if best is None or val > best.value:
            best = BestProof(val, m)
    return best


def acceptance_table(protocol: SmProtocol, x: str, y: str, proof):
    """Supports and referee probabilities as arrays for vectorized sampling."""
    da = list(protocol.alice(x, proof))
    db = list(protocol.bob(y, proof))
    den_a = lcm(*(w.denominator for _, w in da))
    den_b = lcm(*(w.denominator for _, w in db))
    wa = np.array([w.numerator * (den_a // w.denominator) for _, w in da], dtype=np.int64)
    wb = np.array([w.numerator * (den_b // w.denominator) for _, w in db], dtype=np.int64)
    rho = [[protocol.referee(o, p, proof) for p, _ in db] for o, _ in da]
    den_r = lcm(*(r.denominator for row in rho for r in row))
    rnum = np.array([[r.numerator * (den_r // r.denominator) for r in row] for row in rho], dtype=np.int64)
    return wa, wb, rnum, den_r


def monte_carlo(protocol: SmProtocol, x: str, y: str, proof, trials: int, rng_seed: int) -> tuple[int, int]:
    """Accepted count over ``trials`` independent executions (vectorized)."""
    wa, wb, rnum, den_r = acceptance_table(protocol, x, y, proof)
    rng = np.random.default_rng(rng_seed)
    ia = np.searchsorted(np.cumsum(wa), rng.integers(0, wa.sum(), size=trials), side="right")
    ib = np.searchsorted(np.cumsum(wb), rng.integers(0, wb.sum(), size=trials), side="right")
    u = rng.integers(0, den_r, size=trials)
    return int(np.count_nonzero(u < rnum[ia, ib])), trials
