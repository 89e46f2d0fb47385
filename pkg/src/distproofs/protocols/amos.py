"""AMOS ("at most one selected") protocols with shared and private coins."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..engine import (CertificateSpace, Packet, Player, Protocol, ProtocolSpec, Randomness,
                      Verifier)
from ..field import DEFAULT_C, amos_modulus, bits_for, id_fingerprints
from ..netconfig import LanguageId, NetworkConfig


def _selected(cfg: NetworkConfig) -> list[int]:
    return [v for v in range(cfg.n) if cfg.labels[v] == "1"]


def _cross_check(value, inbox) -> np.ndarray | bool:
    ok = True
    for msg in inbox:
        other = msg[0]
        if other is not value:  # a shared object is trivially equal
            ok = ok & (other == value)
    return ok


class AmosSharedVerifier(Verifier):
    """Transcript: (s, cert). Everyone rebroadcasts the claimed fingerprint."""

    def __init__(self, q: int, width: int):
        self.q = q
        self.width = width

    def message(self, view, transcript):
        return transcript[1]

    def decide(self, view, transcript, inbox):
        s, cert = transcript
        pbar = cert[0]
        if view.label not in ("0", "1"):
            return False
        ok = _cross_check(pbar, inbox)
        if view.label == "1":
            ok = ok & (id_fingerprints(view.id, self.q)[s] == pbar)
        return ok


class AmosSharedProver:
    def __init__(self, q: int, width: int):
        self.q = q
        self.width = width

    def __call__(self, cfg, round_index, history):
        s = history[0][0]
        sel = _selected(cfg)
        if sel:
            v0 = min(sel, key=lambda v: cfg.ids[v])
            pbar = id_fingerprints(cfg.ids[v0], self.q)[s]
        else:
            pbar = np.zeros_like(s)
        cert = Packet((pbar,), (self.width,))
        return [cert] * cfg.n


def _value_space(size: int, width: int, uniform: bool):
    dom = tuple(Packet((a,), (width,)) for a in range(size))

    def space(cfg: NetworkConfig) -> CertificateSpace:
        return CertificateSpace((dom,) * cfg.n, uniform=uniform)

    return space


def amos_shared(n_hint: int, c: int = DEFAULT_C) -> Protocol:
    """Shared s in F_q; Merlin claims the selected node's id fingerprint at s.

    On a connected graph the neighbor cross-check forces every accepting
    certificate assignment to be constant, so the uniform space (one common
    value) loses nothing for the adversary.
    """
    if n_hint < 1:
        raise ValueError("n_hint must be positive")
    q = amos_modulus(n_hint, c)
    width = bits_for(q - 1)
    deg = (max(n_hint, 2) ** c).bit_length() - 1
    eps = Fraction(deg, q)
    spec = ProtocolSpec(2, Player.MERLIN, Randomness.SHARED, width, (q,),
                        eps if eps < Fraction(1, 2) else None, "amos-shared")
    return Protocol(spec, AmosSharedVerifier(q, width), AmosSharedProver(q, width),
                    certificate_space=_value_space(q, width, False),
                    reduced_space=_value_space(q, width, True),
                    language=LanguageId.AMOS, params={"n_hint": n_hint, "c": c, "q": q})


class AmosPrivateVerifier(Verifier):
    """Transcript: (r_v, cert)."""

    def message(self, view, transcript):
        return transcript[1]

    def decide(self, view, transcript, inbox):
        r, cert = transcript
        if view.label not in ("0", "1"):
            return False
        ok = _cross_check(cert[0], inbox)
        if view.label == "1":
            ok = ok & (r == cert[0])
        return ok


class AmosPrivateProver:
    def __init__(self, width: int):
        self.width = width

    def __call__(self, cfg, round_index, history):
        seeds = history[0]
        sel = _selected(cfg)
        if sel:
            val = seeds[min(sel, key=lambda v: cfg.ids[v])]
        else:
            val = np.zeros_like(seeds[0])
        cert = Packet((val,), (self.width,))
        return [cert] * cfg.n


def coin_bits(eps) -> int:
    """Least b with 2**-b <= eps."""
    eps = Fraction(eps)
    b = 0
    while Fraction(1, 1 << b) > eps:
        b += 1
    return b


def amos_private(eps=Fraction(1, 4)) -> Protocol:
    """Private coins: Merlin must echo the selected node's own random string."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    b = coin_bits(eps)
    spec = ProtocolSpec(2, Player.MERLIN, Randomness.PRIVATE, b, (1 << b,), Fraction(1, 1 << b),
                        "amos-private")
    return Protocol(spec, AmosPrivateVerifier(), AmosPrivateProver(b),
                    certificate_space=_value_space(1 << b, b, False),
                    reduced_space=_value_space(1 << b, b, True),
                    language=LanguageId.AMOS, params={"eps": eps})


def degree_bound(id_a: int, id_b: int) -> int:
    """Degree of id_poly(a) - id_poly(b): at most floor(log2 max(a, b))."""
    return max(id_a, id_b).bit_length() - 1


__all__ = ["amos_shared", "amos_private", "coin_bits", "degree_bound"]
