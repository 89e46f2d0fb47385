"""From a private-coin dMA protocol for two-coloring-with-equal-labels to an
MA^sym protocol for equality, on the (2n+1)-node path.

Alice owns v_1..v_n (labels built from x), Bob owns v_{n+2}..v_{2n+1} (from
y) and the referee plays the middle node v_{n+1}. The proof gives the
certificates of v_n, v_{n+1}, v_{n+2}. Each party exhausts the certificates
of the rest of its segment to decide its flag, then sends the flag, its
boundary node's message under a fresh coin, and the middle certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod

import numpy as np

from ..engine import DEFAULT_CAP, Packet, Player, Protocol, Randomness, subset_acceptance
from ..netconfig import LanguageId, equality_path
from .core import SmProtocol, equality


@dataclass(frozen=True)
class PathRoles:
    """0-based node indices on the (2n+1)-path."""

    n: int

    @property
    def alice(self) -> range:
        return range(0, self.n)

    @property
    def bob(self) -> range:
        return range(self.n + 1, 2 * self.n + 1)

    @property
    def middle(self) -> int:
        return self.n

    @property
    def boundary(self) -> tuple[int, int, int]:
        return (self.n - 1, self.n, self.n + 1)


def _check_source(source: Protocol) -> None:
    spec = source.spec
    if spec.randomness is not Randomness.PRIVATE:
        raise ValueError("source must use private coins")
    if spec.schedule != (Player.MERLIN, Player.ARTHUR):
        raise ValueError("source must be a one-certificate dMA protocol")
    if source.language not in (None, LanguageId.TCE):
        raise ValueError("source must decide two-coloring with equal labels")
    if source.certificate_space is None:
        raise ValueError("source declares no certificate space")


def reduce_tce_to_eq(source: Protocol, n: int, eps=None, cap: int = DEFAULT_CAP) -> SmProtocol:
    """MA^sym protocol for n-bit equality built from ``source``.

    ``eps`` is the source error used in the flags (default: its declared
    budget). A flag is 1 iff some certificates for the party's free nodes
    make all of its nodes accept with probability at least 1 - eps.
    """
    _check_source(source)
    if n < 2 or n % 2:
        raise ValueError("the path reduction needs an even n >= 2")
    eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps if eps is not None
                                                                        else source.spec.error_budget)
    roles = PathRoles(n)
    probe = equality_path("0" * n, "0" * n)
    space = source.certificate_space(probe)
    domains = space.domains
    lo, mid, hi = roles.boundary
    coins = source.spec.seed_tuple_count
    coin_w = Fraction(1, coins)
    cert_bits = max(c.bits for d in domains for c in d)

    @lru_cache(maxsize=None)
    def flag(side: str, bits: str, c_edge: int, c_mid: int) -> bool:
        cfg = equality_path(bits, bits)
        nodes = roles.alice if side == "A" else roles.bob
        edge = lo if side == "A" else hi
        free = [v for v in nodes if v != edge]
        for choice in itertools.product(*(range(len(domains[v])) for v in free)):
            idx = [0] * cfg.n
            for v, ci in zip(free, choice):
                idx[v] = ci
            idx[edge], idx[mid] = c_edge, c_mid
            certs = [domains[v][idx[v]] for v in range(cfg.n)]
            if subset_acceptance(cfg, source, certs, nodes, cap) >= 1 - eps:
                return True
        return False

    @lru_cache(maxsize=None)
    def boundary_messages(side: str, bits: str, c_edge: int) -> tuple:
        cfg = equality_path(bits, bits)
        v = lo if side == "A" else hi
        # every coin of the boundary node at once
        msg = source.verifier.message(cfg.views[v], [domains[v][c_edge], np.arange(coins, dtype=np.int64)])
        cols = [np.broadcast_to(val, (coins,)) for val in msg.values]
        return tuple(tuple(int(col[r]) for col in cols) for r in range(coins)), msg.widths

    def party(side: str):
        @lru_cache(maxsize=None)
        def dist(bits, proof):
            c_lo, c_mid, c_hi = proof
            c_edge = c_lo if side == "A" else c_hi
            acc = flag(side, bits, c_edge, c_mid)
            values, widths = boundary_messages(side, bits, c_edge)
            out: dict = {}
            for vals in values:
                key = (int(acc), vals, widths, c_mid)
                out[key] = out.get(key, Fraction(0)) + coin_w
            return tuple(out.items())
        return dist

    middle_view = probe.views[mid]

    def referee(omega, phi, proof):
        acc_a, s_lo, w_lo, m_a = omega
        acc_b, s_hi, w_hi, m_b = phi
        if not (acc_a and acc_b) or m_a != m_b:
            return Fraction(0)
        inbox = [Packet(s_lo, w_lo), Packet(s_hi, w_hi)]  # ports of the middle node, in id order
        own = np.arange(coins, dtype=np.int64)
        verdict = source.verifier.decide(middle_view, [domains[mid][m_a], own], inbox)
        wins = int(np.count_nonzero(np.broadcast_to(verdict, (coins,))))
        return Fraction(wins, coins)

    def message_bits(msg):
        return 1 + sum(msg[2]) + cert_bits

    sizes = (len(domains[lo]), len(domains[mid]), len(domains[hi]))
    proofs = tuple(itertools.product(*(range(s) for s in sizes)))
    honest = source.prover(probe, 0, [])
    honest_idx = tuple(next(i for i, c in enumerate(domains[v]) if c.values == honest[v].values)
                       for v in roles.boundary)
    return SmProtocol(
        name=f"path-reduction-{source.name}",
        input_bits=n,
        alice=party("A"),
        bob=party("B"),
        referee=referee,
        message_bits=message_bits,
        max_message_bits=1 + source.spec.bandwidth_bits + cert_bits,
        error=3 * eps,
        proofs=proofs,
        honest_proof=lambda x, y: honest_idx,
        deterministic_referee=False,
        func=equality,
        meta={"source": source.name, "eps": eps, "roles": roles},
    )


def _poisson_binomial_majority(ps: list[Fraction]) -> Fraction:
    """Probability that more than half of independent events occur."""
    dist = [Fraction(1)]
    for p in ps:
        nxt = [Fraction(0)] * (len(dist) + 1)
        for k, w in enumerate(dist):
            nxt[k] += w * (1 - p)
            nxt[k + 1] += w * p
        dist = nxt
    return sum(dist[len(ps) // 2 + 1:], Fraction(0))


def amplify_majority(protocol: SmProtocol, reps: int) -> SmProtocol:
    """Independent repetitions; the referee accepts on a strict majority."""
    if reps < 1 or reps % 2 == 0:
        raise ValueError("reps must be a positive odd number")

    def power(dist_fn):
        @lru_cache(maxsize=None)
        def dist(x, m):
            base = list(dist_fn(x, m))
            return tuple((tuple(msg for msg, _ in combo), prod((w for _, w in combo), start=Fraction(1)))
                         for combo in itertools.product(base, repeat=reps))
        return dist

    def referee(omega, phi, m):
        return _poisson_binomial_majority([protocol.referee(o, p, m) for o, p in zip(omega, phi)])

    return SmProtocol(
        name=f"majority{reps}-{protocol.name}",
        input_bits=protocol.input_bits,
        alice=power(protocol.alice),
        bob=power(protocol.bob),
        referee=referee,
        message_bits=lambda msg: sum(protocol.message_bits(x) for x in msg),
        max_message_bits=reps * protocol.max_message_bits,
        error=protocol.error,  # a bound, not the amplified value
        proofs=protocol.proofs,
        honest_proof=protocol.honest_proof,
        deterministic_referee=False,
        func=protocol.func,
        meta=dict(protocol.meta, reps=reps),
    )
