"""Replacing Alice's and Bob's coins by small audited multisets.

For each input and proof, Alice's randomized message is replaced by a
multiset of t samples whose empirical strength against every possible Bob
message is within delta of the true strength; symmetrically for Bob. The
referee then averages its (determinized) decision over the t x t grid and
thresholds at 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .core import SmProtocol


class GapCollapsed(ValueError):
    """eps + 2 delta >= 1 - eps - 2 delta: the threshold cannot separate."""


class AuditExhausted(RuntimeError):
    pass


def _exact(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def table_size(other_space: int, delta) -> int:
    """t = ceil((2 / delta^2) ln(4 |other space|))."""
    delta = _exact(delta)
    return math.ceil(2 / float(delta) ** 2 * math.log(4 * other_space))


@dataclass(frozen=True, eq=False)
class StrengthTable:
    """Multiset of ``t`` message indices for one (party, input, proof)."""

    party: str
    input: str
    proof: object
    counts: np.ndarray  # multiplicity of each message index
    worst: Fraction  # max over opposing messages of |empirical - true strength|

    @property
    def t(self) -> int:
        return int(self.counts.sum())

    def multiset(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.repeat(np.arange(self.counts.size), self.counts))


@dataclass(frozen=True, eq=False)
class _Space:
    """Messages of both parties under one proof, with the 0/1 referee matrix."""

    omega: list
    phi: list
    rho: np.ndarray  # int64 (|Omega|, |Phi|)
    alice: dict  # x -> (numerators over omega, denominator)
    bob: dict


def _weights(dist, index: dict, size: int) -> tuple[np.ndarray, int]:
    den = lcm(*(w.denominator for _, w in dist))
    out = np.zeros(size, dtype=np.int64)
    for msg, w in dist:
        out[index[msg]] += w.numerator * (den // w.denominator)
    return out, den


def _space(protocol: SmProtocol, proof) -> _Space:
    inputs = protocol.inputs()
    da = {x: list(protocol.alice(x, proof)) for x in inputs}
    db = {y: list(protocol.bob(y, proof)) for y in inputs}
    omega = list(dict.fromkeys(msg for d in da.values() for msg, _ in d))
    phi = list(dict.fromkeys(msg for d in db.values() for msg, _ in d))
    io = {m: i for i, m in enumerate(omega)}
    ip = {m: i for i, m in enumerate(phi)}
    half = Fraction(1, 2)
    # most probable answer; a tie counts as accept
    rho = np.array([[int(protocol.referee(o, p, proof) >= half) for p in phi] for o in omega],
                   dtype=np.int64)
    return _Space(omega, phi, rho,
                  {x: _weights(d, io, len(omega)) for x, d in da.items()},
                  {y: _weights(d, ip, len(phi)) for y, d in db.items()})


def _sample_counts(weights: np.ndarray, den: int, t: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.integers(0, den, size=t)
    idx = np.searchsorted(np.cumsum(weights), u, side="right")
    return np.bincount(idx, minlength=weights.size).astype(np.int64)


def _deviation(counts: np.ndarray, weights: np.ndarray, den: int, rho: np.ndarray) -> Fraction:
    """max_j |counts.rho[:, j] / t - weights.rho[:, j] / den|."""
    t = int(counts.sum())
    emp = counts @ rho
    true = weights @ rho
    return Fraction(int(np.abs(emp * den - true * t).max()), t * den)


@dataclass(frozen=True, eq=False)
class MaSymDerandomization:
    protocol: SmProtocol  # deterministic: multisets as messages
    eps: Fraction  # error of the determinized source
    delta: Fraction
    t_alice: int
    t_bob: int
    alice_tables: dict  # (x, proof) -> StrengthTable
    bob_tables: dict
    spaces: dict  # proof -> _Space

    def grid_average(self, x: str, y: str, proof) -> Fraction:
        rho = self.spaces[proof].rho
        a = self.alice_tables[(x, proof)].counts
        b = self.bob_tables[(y, proof)].counts
        return Fraction(int(a @ rho @ b), self.t_alice * self.t_bob)

    def strength(self, x: str, y: str, proof) -> Fraction:
        """F(x, y, m) under the determinized referee."""
        sp = self.spaces[proof]
        wa, da = sp.alice[x]
        wb, db = sp.bob[y]
        return Fraction(int(wa @ sp.rho @ wb), da * db)

    def decide(self, x: str, y: str, proof) -> bool:
        return 2 * self.grid_average(x, y, proof) >= 1

    def decide_best(self, x: str, y: str) -> bool:
        """Accept iff some proof makes the referee accept."""
        return any(self.decide(x, y, m) for m in self.spaces)


def derandomize_ma_sym(protocol: SmProtocol, delta, rng_seed: int, retries: int = 3) -> MaSymDerandomization:
    """Build and audit strength tables for every input and proof.

    Every table is checked against every opposing message exactly; a table
    failing the delta bound is resampled up to ``retries`` times.
    """
    delta = _exact(delta)
    eps = protocol.error if protocol.deterministic_referee else 2 * protocol.error
    if not 0 < delta:
        raise ValueError("delta must be positive")
    if eps + 2 * delta >= 1 - eps - 2 * delta:
        raise GapCollapsed(f"eps + 2 delta = {eps + 2 * delta} leaves no gap")
    if not protocol.proofs:
        raise ValueError("empty proof space")
    spaces = {m: _space(protocol, m) for m in protocol.proofs}
    t_a = table_size(max(len(sp.phi) for sp in spaces.values()), delta)
    t_b = table_size(max(len(sp.omega) for sp in spaces.values()), delta)
    tables = {"alice": {}, "bob": {}}
    for mi, (m, sp) in enumerate(spaces.items()):
        for party, dists, rho, t in (("alice", sp.alice, sp.rho, t_a), ("bob", sp.bob, sp.rho.T, t_b)):
            for xi, (x, (w, den)) in enumerate(dists.items()):
                for attempt in range(retries + 1):
                    ss = np.random.SeedSequence([rng_seed, party == "bob", mi, xi, attempt])
                    counts = _sample_counts(w, den, t, np.random.default_rng(ss))
                    worst = _deviation(counts, w, den, rho)
                    if worst <= delta:
                        break
                else:
                    raise AuditExhausted(f"{party} table for input {x} failed after {retries + 1} attempts")
                tables[party][(x, m)] = StrengthTable(party, x, m, counts, worst)
    out = MaSymDerandomization(None, eps, delta, t_a, t_b, tables["alice"], tables["bob"], spaces)
    one = Fraction(1)

    def referee(ta, tb, m):
        rho = spaces[m].rho
        a = np.bincount(ta, minlength=rho.shape[0])
        b = np.bincount(tb, minlength=rho.shape[1])
        return Fraction(int(2 * int(a @ rho @ b) >= t_a * t_b))

    per_msg = protocol.max_message_bits
    det = SmProtocol(
        name=f"derandomized-{protocol.name}",
        input_bits=protocol.input_bits,
        alice=lambda x, m: [(tables["alice"][(x, m)].multiset(), one)],
        bob=lambda y, m: [(tables["bob"][(y, m)].multiset(), one)],
        referee=referee,
        message_bits=lambda msg: len(msg) * per_msg,
        max_message_bits=max(t_a, t_b) * per_msg,
        error=Fraction(0),
        proofs=protocol.proofs,
        honest_proof=protocol.honest_proof,
        func=protocol.func,
        meta={"source": protocol.name, "t_alice": t_a, "t_bob": t_b},
    )
    object.__setattr__(out, "protocol", det)
    return out
