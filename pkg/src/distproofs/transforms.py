"""Protocol compilers: removing interaction and fixing private coins.

``derandomize_am_to_m`` and ``derandomize_whp`` turn a shared-coin protocol
into a one-round certificate scheme. The certificate tabulates the node's
whole transcript for every seed tuple, so each node can replay the source
verification for all seeds at once. ``fix_coins_ma`` replaces private coins
by a short shared index into a sampled, audited table of coin tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .engine import (DEFAULT_CAP, AdversaryReport, BandwidthError, Packet, Player, Protocol,
                     ProtocolSpec, Randomness, Verifier, _check_cap, acceptance_matrix,
                     best_adversary_exact, default_adaptivity, domain_columns, evaluate,
                     exact_acceptance, seed_block)
from .field import DEFAULT_C, bits_for
from .netconfig import Membership, NetworkConfig, decide_membership
from .protocols.spanning_tree import canonical_tree, implicit_parent


def as_fraction(x) -> Fraction:
    """Exact value of a parameter; floats are read through their decimal text."""
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def seed_tuples(spec: ProtocolSpec) -> list[np.ndarray]:
    """The canonical enumeration R: one (|R|,) array per Arthur round."""
    return [s[0] for s in seed_block(spec, 1, 0, spec.seed_tuple_count)]


def acceptance_threshold(size: int) -> int:
    """ceil(2 * size / 3)."""
    return -(-2 * size // 3)


# transcript tables

@dataclass(frozen=True)
class TableLayout:
    schedule: tuple[Player, ...]
    size: int  # |R|
    f: int

    @property
    def bits(self) -> int:
        return self.size * len(self.schedule) * self.f


def _fits(values, width: int, size: int) -> bool:
    arr = np.asarray(values)
    if arr.ndim > 1 or (arr.ndim == 1 and arr.shape != (size,)):
        return False
    return not arr.size or (arr.min() >= 0 and not arr.max() >> width)


@dataclass(frozen=True, eq=False)
class TranscriptTable:
    """Entry j holds round j for every seed tuple: an int array for Arthur
    rounds, a packet whose fields are scalars or (|R|,) arrays for Merlin."""

    entries: tuple
    layout: TableLayout

    def __post_init__(self):
        lay = self.layout
        if len(self.entries) != len(lay.schedule):
            raise ValueError("one table entry per round")
        for player, entry in zip(lay.schedule, self.entries):
            if player is Player.ARTHUR:
                if not _fits(entry, lay.f, lay.size) or np.ndim(entry) != 1:
                    raise BandwidthError(f"Arthur entry does not fit {lay.size} x {lay.f} bits")
            else:
                if entry.bits > lay.f:
                    raise BandwidthError(f"certificate entry of {entry.bits} bits exceeds f = {lay.f}")
                for val, w in zip(entry.values, entry.widths):
                    if not _fits(val, w, lay.size):
                        raise BandwidthError(f"certificate field does not fit its {w} bits")

    @property
    def bits(self) -> int:
        return self.layout.bits


@dataclass(frozen=True, eq=False)
class DerandomizedCert:
    root: int
    dist: int
    table: TranscriptTable
    acc: np.ndarray  # bool (|R|,)
    w_id: int
    w_d: int

    def __post_init__(self):
        if not 0 <= self.root < 1 << self.w_id or not 0 <= self.dist < 1 << self.w_d:
            raise BandwidthError("root or distance does not fit its field")
        acc = np.asarray(self.acc)
        if acc.dtype != bool or acc.shape != (self.table.layout.size,):
            raise ValueError("acceptance vector needs one bit per seed tuple")

    @property
    def bits(self) -> int:
        return self.table.bits + self.table.layout.size + self.w_id + self.w_d


@dataclass(frozen=True, eq=False)
class TableMessage:
    """What a node broadcasts: its tree fields, vector and source messages."""

    id: int | None
    root: int | None
    dist: int | None
    acc: np.ndarray | None
    inner: object
    bits: int


def _normalize(entry, size: int):
    if isinstance(entry, Packet):
        return Packet(tuple(np.asarray(v, dtype=np.int64) if np.ndim(v) == 0
                            else np.ascontiguousarray(np.broadcast_to(v, (size,)), dtype=np.int64)
                            for v in entry.values), entry.widths)
    return np.ascontiguousarray(np.broadcast_to(entry, (size,)), dtype=np.int64)


def _source_run(cfg: NetworkConfig, source: Protocol, size: int):
    seeds = seed_block(source.spec, cfg.n, 0, size)
    return evaluate(cfg, source, seeds, size, per_node=True)


class _TableReplay(Verifier):
    """Shared replay logic: Arthur entries must equal R, then the source decides."""

    def __init__(self, source: Protocol, layout: TableLayout):
        self.source = source
        self.layout = layout
        self.arthur = seed_tuples(source.spec)

    def inner_message(self, view, table: TranscriptTable):
        msg = self.source.verifier.message(view, list(table.entries))
        if msg.bits > self.source.spec.bandwidth_bits:
            raise BandwidthError(f"source message of {msg.bits} bits exceeds its bound")
        if isinstance(msg, Packet):
            msg.check_range()
        return msg

    def consistent(self, table: TranscriptTable) -> bool:
        seeds = iter(self.arthur)
        for player, entry in zip(self.layout.schedule, table.entries):
            if player is Player.ARTHUR and not np.array_equal(entry, next(seeds)):
                return False
        return True

    def replay(self, view, table: TranscriptTable, inbox) -> np.ndarray:
        d = self.source.verifier.decide(view, list(table.entries), [m.inner for m in inbox])
        return np.broadcast_to(np.asarray(d, dtype=bool), (self.layout.size,))


# derandomization with a spanning tree

class DerandomizedVerifier(_TableReplay):
    def __init__(self, source: Protocol, layout: TableLayout, w_id: int, w_d: int):
        super().__init__(source, layout)
        self.w_id, self.w_d = w_id, w_d
        # own id, root, distance, vector and one source message per seed
        self.message_bits = 2 * w_id + w_d + layout.size * (1 + source.spec.bandwidth_bits)

    def message(self, view, transcript):
        cert = transcript[0]
        return TableMessage(view.id, cert.root, cert.dist, cert.acc,
                            self.inner_message(view, cert.table), self.message_bits)

    def decide(self, view, transcript, inbox):
        cert = transcript[0]
        parent = implicit_parent(view.id, cert.root, cert.dist, [(m.id, m.root, m.dist) for m in inbox])
        if parent is None or not self.consistent(cert.table):
            return False
        a = self.replay(view, cert.table, inbox)
        acc = cert.acc
        if (acc & ~a).any():
            return False
        if parent != view.id:
            up = next(m.acc for m in inbox if m.id == parent)
            return not (up & ~acc).any()
        return int(acc.sum()) >= acceptance_threshold(self.layout.size)


class DerandomizedProver:
    def __init__(self, source: Protocol, layout: TableLayout, w_id: int, w_d: int):
        self.source = source
        self.layout = layout
        self.w_id, self.w_d = w_id, w_d

    def __call__(self, cfg, round_index, history):
        size = self.layout.size
        ev = _source_run(cfg, self.source, size)
        root, parent, dist = canonical_tree(cfg)
        acc = ev.verdicts.copy()
        for v in sorted(range(cfg.n), key=lambda u: -dist[u]):
            if v != root:
                acc[parent[v]] &= acc[v]
        return [DerandomizedCert(cfg.ids[root], dist[v],
                                 TranscriptTable(tuple(_normalize(e, size) for e in ev.transcripts[v]),
                                                 self.layout),
                                 acc[v], self.w_id, self.w_d)
                for v in range(cfg.n)]


def _shared_source(source: Protocol, cap: int) -> TableLayout:
    spec = source.spec
    if spec.randomness is not Randomness.SHARED:
        raise ValueError("derandomization needs a shared-randomness source")
    _check_cap(spec.seed_tuple_count, cap, "seed tuple set R")
    return TableLayout(spec.schedule, spec.seed_tuple_count, spec.bandwidth_bits)


def derandomize_am_to_m(source: Protocol, n_hint: int = 64, c: int = DEFAULT_C,
                        cap: int = DEFAULT_CAP) -> Protocol:
    """One Merlin round: tree fields, transcript table and acceptance vector.

    A node checks the tree, that the table's coins are exactly R, replays
    the source on all of R, that its vector is contained in its own verdicts
    and contains its parent's. The root accepts iff its vector has at least
    ceil(2|R|/3) ones.
    """
    layout = _shared_source(source, cap)
    w_id = bits_for(n_hint**c)
    w_d = bits_for(max(n_hint - 1, 1))
    verifier = DerandomizedVerifier(source, layout, w_id, w_d)
    cert_bits = layout.bits + layout.size + w_id + w_d
    eps = source.spec.error_budget
    spec = ProtocolSpec(1, Player.MERLIN, Randomness.SHARED, max(cert_bits, verifier.message_bits), (),
                        Fraction(0) if eps is not None and eps < Fraction(1, 3) else None,
                        f"derandomized-{source.name}")
    return Protocol(spec, verifier, DerandomizedProver(source, layout, w_id, w_d),
                    language=source.language,
                    params={"source": source.name, "R": layout.size, "n_hint": n_hint, "c": c,
                            "certificate_bits": cert_bits})


@dataclass(frozen=True)
class SeedwiseReport:
    """Seeds on which some certificate assignment makes every node accept."""

    winning: int
    total: int
    won: np.ndarray

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.winning, self.total)

    @property
    def threshold(self) -> int:
        return acceptance_threshold(self.total)

    @property
    def certified(self) -> bool:
        """True when no derandomized certificate can make the root accept."""
        return self.winning < self.threshold


def seedwise_decomposition(cfg: NetworkConfig, source: Protocol, cap: int = DEFAULT_CAP,
                           report: AdversaryReport | None = None) -> SeedwiseReport:
    """Per-seed maximization over the source's certificate space.

    Any accepting derandomized certificate yields, for each seed in the
    root's vector, one source assignment accepted everywhere on that seed;
    so the root's count never exceeds ``winning``.
    """
    if report is None:
        report = best_adversary_exact(cfg, source, cap=cap, adaptive=True)
    if not report.adaptive:
        raise ValueError("seed-wise decomposition needs the adaptive maximum")
    return SeedwiseReport(report.winning, report.total, report.won)


def seedwise_certificates(cfg: NetworkConfig, protocol: Protocol, report: AdversaryReport) -> list:
    """The strongest derandomized certificate built from a per-seed witness.

    Every winning seed carries its winning assignment and is claimed in all
    vectors; losing seeds carry candidate 0 and are not claimed.
    """
    verifier = protocol.verifier
    if not isinstance(verifier, DerandomizedVerifier):
        raise TypeError("expected a protocol built by derandomize_am_to_m")
    source = verifier.source
    layout = verifier.layout
    space = source.adversary_space(cfg)
    witness = np.where(report.witness >= 0, report.witness, 0)
    root, _, dist = canonical_tree(cfg)
    out = []
    for v in range(cfg.n):
        dom = space.domains[v]
        cols = domain_columns(dom)
        merlin = Packet(tuple(col[witness[:, v]] for col in cols), dom[0].widths)
        entries = []
        seeds = iter(verifier.arthur)
        for player in layout.schedule:
            entries.append(next(seeds) if player is Player.ARTHUR else merlin)
        table = TranscriptTable(tuple(entries), layout)
        out.append(DerandomizedCert(cfg.ids[root], dist[v], table, report.won.copy(),
                                    verifier.w_id, verifier.w_d))
    return out


# derandomization with high-probability sources

class WhpVerifier(_TableReplay):
    def __init__(self, source: Protocol, layout: TableLayout, m: int):
        super().__init__(source, layout)
        self.m = m
        self.message_bits = layout.size * source.spec.bandwidth_bits

    def message(self, view, transcript):
        table = transcript[0]
        return TableMessage(None, None, None, None, self.inner_message(view, table), self.message_bits)

    def decide(self, view, transcript, inbox):
        table = transcript[0]
        if not self.consistent(table):
            return False
        return whp_accepts(int(self.replay(view, table, inbox).sum()), self.layout.size, self.m)


class WhpProver:
    def __init__(self, source: Protocol, layout: TableLayout):
        self.source = source
        self.layout = layout

    def __call__(self, cfg, round_index, history):
        size = self.layout.size
        ev = _source_run(cfg, self.source, size)
        return [TranscriptTable(tuple(_normalize(e, size) for e in ev.transcripts[v]), self.layout)
                for v in range(cfg.n)]


def whp_accepts(accepted: int, size: int, m: int) -> bool:
    """accepted / size >= 1 - 1/m, in integers."""
    return accepted * m >= (m - 1) * size


def union_bound_holds(n: int, size: int, m: int) -> bool:
    """If every node rejects at most size/m seeds, fewer than (1 - 1/m)*size
    seeds are rejected anywhere: n*size/m < (1 - 1/m)*size."""
    return Fraction(n * size, m) < (1 - Fraction(1, m)) * size


def derandomize_whp(source: Protocol, m: int, cap: int = DEFAULT_CAP) -> Protocol:
    """Transcript tables only; each node accepts iff it accepts at least a
    (1 - 1/m) fraction of the seed tuples. Needs m > n + 1."""
    if m < 2:
        raise ValueError("m must be at least 2")
    layout = _shared_source(source, cap)
    verifier = WhpVerifier(source, layout, m)
    spec = ProtocolSpec(1, Player.MERLIN, Randomness.SHARED, max(layout.bits, verifier.message_bits), (),
                        None, f"whp-{source.name}")
    return Protocol(spec, verifier, WhpProver(source, layout), language=source.language,
                    params={"source": source.name, "R": layout.size, "m": m})


@dataclass(frozen=True)
class PreconditionReport:
    worst: Fraction  # largest error over the family
    worst_instance: int
    holds: bool  # error < 1/(n+1) on every member


def check_whp_precondition(source: Protocol, family: Iterable[NetworkConfig],
                           cap: int = DEFAULT_CAP) -> PreconditionReport:
    """Exact error of the source on each member against 1/(n+1)."""
    if source.language is None:
        raise ValueError("source protocol declares no language")
    worst, worst_i, holds = Fraction(0), -1, True
    for i, cfg in enumerate(family):
        member = decide_membership(cfg, source.language)
        if member is Membership.YES:
            err = 1 - exact_acceptance(cfg, source, cap=cap).probability
        else:
            err = best_adversary_exact(cfg, source, cap=cap).value
        if err >= Fraction(1, cfg.n + 1):
            holds = False
        if err > worst or worst_i < 0:
            worst, worst_i = err, i
    return PreconditionReport(worst, worst_i, holds)


# idle coins

class IdleCoinVerifier(Verifier):
    def __init__(self, inner: Verifier):
        self.inner = inner

    def message(self, view, transcript):
        return self.inner.message(view, transcript[1:])

    def decide(self, view, transcript, inbox):
        return self.inner.decide(view, transcript[1:], inbox)


class IdleCoinProver:
    def __init__(self, inner):
        self.inner = inner

    def __call__(self, cfg, round_index, history):
        return self.inner(cfg, round_index, history[1:])


def with_idle_coin(source: Protocol, domain: int = 2) -> Protocol:
    """Prepend a shared coin that nobody reads; completeness and soundness
    are unchanged."""
    spec = source.spec
    if spec.schedule[0] is not Player.MERLIN:
        raise ValueError("source must start with a Merlin round")
    width = max(spec.bandwidth_bits, bits_for(domain - 1))
    out = ProtocolSpec(spec.rounds + 1, spec.last_player, Randomness.SHARED, width,
                       (domain,) + spec.seed_domains, spec.error_budget, f"idle-{spec.name}")
    return Protocol(out, IdleCoinVerifier(source.verifier), IdleCoinProver(source.prover),
                    certificate_space=source.certificate_space, reduced_space=source.reduced_space,
                    language=source.language, params=dict(source.params, idle_domain=domain))


# coin fixing

class AuditFailure(RuntimeError):
    def __init__(self, message: str, worst: Fraction):
        self.worst = worst
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class CoinCollection:
    """Row i holds one private coin per identifier: ``seeds[i, id - 1]``."""

    seeds: np.ndarray
    delta: Fraction

    @property
    def t(self) -> int:
        return self.seeds.shape[0]

    def for_config(self, cfg: NetworkConfig) -> np.ndarray:
        """(n, t) coins of the nodes of ``cfg``."""
        idx = np.asarray(cfg.ids, dtype=np.int64) - 1
        if idx.max() >= self.seeds.shape[1]:
            raise ValueError("identifier outside the fixed collection")
        return self.seeds[:, idx].T


@dataclass(frozen=True)
class AuditReport:
    worst: Fraction  # largest |empirical - true| over all audited events
    events: int
    instances: int
    attempts: int
    rng_seed: int  # seed of the accepted attempt

    def passed(self, delta) -> bool:
        return self.worst <= as_fraction(delta)


@dataclass(frozen=True)
class CoinFixing:
    protocol: Protocol
    collection: CoinCollection
    audit: AuditReport


def coin_count(family_size: int, certificate_space_size: int, delta) -> int:
    """t = ceil(ln(2 |family| |certificates|) / (2 delta^2))."""
    delta = as_fraction(delta)
    return math.ceil(math.log(2 * family_size * certificate_space_size) / (2 * float(delta) ** 2))


class FixedCoinVerifier(Verifier):
    """The shared index i selects the stored coin of each node."""

    def __init__(self, inner: Verifier, seeds: np.ndarray, position: int):
        self.inner = inner
        self.seeds = seeds
        self.position = position

    def _map(self, view, transcript):
        out = list(transcript)
        out[self.position] = self.seeds[transcript[self.position], view.id - 1]
        return out

    def message(self, view, transcript):
        return self.inner.message(view, self._map(view, transcript))

    def decide(self, view, transcript, inbox):
        return self.inner.decide(view, self._map(view, transcript), inbox)


class FixedCoinProver:
    def __init__(self, inner, seeds: np.ndarray):
        self.inner = inner
        self.seeds = seeds

    def __call__(self, cfg, round_index, history):
        idx = np.asarray(cfg.ids, dtype=np.int64) - 1
        mapped = [self.seeds[h, idx[:, None]] for h in history]
        return self.inner(cfg, round_index, mapped)


def _audit_instance(cfg: NetworkConfig, source: Protocol, coins: np.ndarray, cap: int):
    """Numerators |emp * T - true * t| over the instance's events, and T * t."""
    spec = source.spec
    total = spec.seed_space_size(cfg.n)
    _check_cap(total, cap, "private seed space")
    full = seed_block(spec, cfg.n, 0, total)
    t = coins.shape[1]
    fixed = [coins]
    space = source.certificate_space(cfg)
    true_m = acceptance_matrix(cfg, source, full, total, space, cap)
    emp_m = acceptance_matrix(cfg, source, fixed, t, space, cap)
    if default_adaptivity(spec):
        # the prover sees the coins: one event, "some certificate wins"
        true_c = true_m.any(axis=0).sum(keepdims=True)
        emp_c = emp_m.any(axis=0).sum(keepdims=True)
    else:
        true_c = true_m.sum(axis=1)
        emp_c = emp_m.sum(axis=1)
    honest_true = evaluate(cfg, source, full, total).accepts.sum()
    honest_emp = evaluate(cfg, source, fixed, t).accepts.sum()
    true_c = np.append(true_c, honest_true).astype(np.int64)
    emp_c = np.append(emp_c, honest_emp).astype(np.int64)
    return np.abs(emp_c * total - true_c * t), total * t


def fix_coins_ma(source: Protocol, family: Sequence[NetworkConfig], delta, rng_seed: int,
                 retries: int = 3, cap: int = DEFAULT_CAP) -> CoinFixing:
    """Sample t private coin tuples, audit them exactly, and share an index.

    The audit compares, for every family member, every certificate
    assignment (or the best one per coin when the prover sees the coins)
    and the honest prover, the acceptance frequency over the stored tuples
    with the true probability; all deviations must be at most delta.
    """
    spec = source.spec
    delta = as_fraction(delta)
    eps = spec.error_budget
    if spec.randomness is not Randomness.PRIVATE:
        raise ValueError("coin fixing needs a private-coin source")
    if spec.arthur_rounds != 1 or spec.merlin_rounds != 1:
        raise ValueError("coin fixing supports one Arthur and one Merlin round")
    if eps is None or not 0 < delta or eps + delta >= Fraction(1, 2):
        raise ValueError("need 0 < delta and eps + delta < 1/2")
    if source.certificate_space is None:
        raise ValueError("source declares no certificate space")
    family = list(family)
    if not family:
        raise ValueError("empty instance family")
    space_size = max(source.certificate_space(cfg).size for cfg in family)
    t = coin_count(len(family), space_size, delta)
    id_bound = max(max(cfg.ids) for cfg in family)
    domain = spec.seed_domains[0]
    worst_seen = None
    for attempt in range(retries + 1):
        seed = int(np.random.SeedSequence([rng_seed, attempt]).generate_state(1)[0])
        rng = np.random.default_rng(seed)
        seeds = rng.integers(0, domain, size=(t, id_bound), dtype=np.int64)
        seeds.flags.writeable = False
        collection = CoinCollection(seeds, delta)
        worst = Fraction(0)
        events = 0
        for cfg in family:
            nums, den = _audit_instance(cfg, source, collection.for_config(cfg), cap)
            events += nums.size
            worst = max(worst, Fraction(int(nums.max()), den))
        if worst <= delta:
            break
        worst_seen = worst if worst_seen is None else min(worst_seen, worst)
    else:
        raise AuditFailure(f"audit failed after {retries + 1} attempts", worst_seen)
    audit = AuditReport(worst, events, len(family), attempt + 1, seed)
    f_out = spec.bandwidth_bits + (t - 1).bit_length()
    out = ProtocolSpec(spec.rounds, spec.last_player, Randomness.SHARED, f_out, (t,), eps + delta,
                       f"fixed-{spec.name}")
    position = spec.schedule.index(Player.ARTHUR)
    protocol = Protocol(out, FixedCoinVerifier(source.verifier, collection.seeds, position),
                        FixedCoinProver(source.prover, collection.seeds),
                        certificate_space=source.certificate_space, reduced_space=source.reduced_space,
                        language=source.language,
                        params={"source": source.name, "t": t, "delta": delta, "rng_seed": rng_seed})
    return CoinFixing(protocol, collection, audit)
