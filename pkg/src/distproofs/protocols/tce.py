"""Two-coloring with equal labels per side: shared and private-coin protocols."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from ..engine import CertificateSpace, Packet, Player, Protocol, ProtocolSpec, Randomness, Verifier
from ..field import DEFAULT_C, bits_for, label_fingerprints, tce_modulus
from ..netconfig import LanguageId, NetworkConfig, two_coloring
from ..sm.eq import ReedSolomonCode

COLOR_SPACE = (Packet((0,), (1,)), Packet((1,), (1,)))


def _color_space(cfg: NetworkConfig) -> CertificateSpace:
    return CertificateSpace((COLOR_SPACE,) * cfg.n)


def honest_coloring(cfg: NetworkConfig) -> list[int]:
    """BFS parity coloring from the lowest-id node (proper when bipartite)."""
    root = min(range(cfg.n), key=lambda v: cfg.ids[v])
    dist = cfg.bfs_distances(root)
    return [d % 2 for d in dist]


class ColorProver:
    def __call__(self, cfg, round_index, history):
        return [Packet((c,), (1,)) for c in honest_coloring(cfg)]


def _colors_opposite(color, inbox):
    ok = True
    for msg in inbox:
        ok = ok & (msg[0] != color)
    return ok


class TceSharedVerifier(Verifier):
    """Transcript: (color cert, s)."""

    def __init__(self, n: int, q: int, width: int):
        self.n, self.q, self.width = n, q, width

    def message(self, view, transcript):
        cert, s = transcript
        if len(view.label) == self.n:
            fp = label_fingerprints(view.label, self.q)[s]
        else:
            fp = np.zeros_like(s)
        return Packet((cert[0], fp), (1, self.width))

    def decide(self, view, transcript, inbox):
        if len(view.label) != self.n:
            return False
        ok = _colors_opposite(transcript[0][0], inbox)
        if len(inbox) > 1:
            first = inbox[0][1]
            for msg in inbox[1:]:
                ok = ok & (msg[1] == first)
        return ok


def tce_shared(n: int, c: int = DEFAULT_C) -> Protocol:
    """Color bits from Merlin, then a shared point s; neighbors' label
    fingerprints at s must coincide at every node."""
    q = tce_modulus(n, c)
    width = bits_for(q - 1)
    eps = Fraction(n, q)
    spec = ProtocolSpec(2, Player.ARTHUR, Randomness.SHARED, 1 + width, (q,),
                        eps if eps < Fraction(1, 2) else None, "tce-shared")
    return Protocol(spec, TceSharedVerifier(n, q, width), ColorProver(),
                    certificate_space=_color_space, language=LanguageId.TCE,
                    params={"n": n, "c": c, "q": q})


class TcePrivateVerifier(Verifier):
    """Transcript: (color cert, private seed).

    The seed of a node encodes, for every repetition, a row index and a
    column index of its label's codeword matrix. The node broadcasts that
    row and that column. As referee for each pair of neighbors (lower id in
    the row role) it compares the crossing cell.
    """

    def __init__(self, code: ReedSolomonCode, reps: int):
        self.code = code
        self.reps = reps
        side = code.side
        self.digits = (side,) * (2 * reps)
        self.rep_widths = ((code.index_bits,) + (code.field_bits,) * side) * 2

    def unpack_seed(self, seed):
        return np.unravel_index(seed, self.digits)

    def message(self, view, transcript):
        cert, seed = transcript
        side = self.code.side
        digits = self.unpack_seed(seed)
        valid = len(view.label) == self.code.n
        mat = self.code.matrix(view.label) if valid else np.zeros((side, side), dtype=np.int64)
        values = [cert[0]]
        for r in range(self.reps):
            row_idx, col_idx = digits[2 * r], digits[2 * r + 1]
            rows = mat[row_idx]
            cols = mat[:, col_idx].T
            values.append(row_idx)
            values.extend(rows[..., j] for j in range(side))
            values.append(col_idx)
            values.extend(cols[..., j] for j in range(side))
        return Packet(tuple(values), (1,) + self.rep_widths * self.reps)

    def decide(self, view, transcript, inbox):
        if len(view.label) != self.code.n:
            return False
        ok = _colors_opposite(transcript[0][0], inbox)
        side = self.code.side
        stride = 2 * (side + 1)
        for a, b in itertools.combinations(range(len(inbox)), 2):
            ma, mb = inbox[a], inbox[b]
            for r in range(self.reps):
                base = 1 + r * stride
                row_idx = ma[base]
                row = np.stack(np.broadcast_arrays(*ma.values[base + 1: base + 1 + side]), axis=-1)
                col_idx = mb[base + side + 1]
                col = np.stack(np.broadcast_arrays(*mb.values[base + side + 2: base + stride]), axis=-1)
                cell_a = np.take_along_axis(row, np.asarray(col_idx)[..., None], axis=-1)[..., 0]
                cell_b = np.take_along_axis(col, np.asarray(row_idx)[..., None], axis=-1)[..., 0]
                ok = ok & (cell_a == cell_b)
        return ok


def tce_private(n: int, reps: int = 1, rate=Fraction(1, 3)) -> Protocol:
    code = ReedSolomonCode.for_bits(n, rate)
    verifier = TcePrivateVerifier(code, reps)
    bandwidth = 1 + sum(verifier.rep_widths) * reps
    per_rep = Fraction(code.k - 1, code.m)
    eps = per_rep**reps
    spec = ProtocolSpec(2, Player.ARTHUR, Randomness.PRIVATE, bandwidth, (code.side ** (2 * reps),),
                        eps if eps < Fraction(1, 2) else None, "tce-private")
    return Protocol(spec, verifier, ColorProver(), certificate_space=_color_space,
                    language=LanguageId.TCE, params={"n": n, "reps": reps, "rate": Fraction(rate),
                                                     "code": code})


__all__ = ["tce_shared", "tce_private", "honest_coloring", "two_coloring"]
