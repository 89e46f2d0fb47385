"""Round-based Arthur/Merlin interaction, acceptance evaluation and adversaries.

Evaluation is batched: every Arthur entry of a transcript is an int64 array
with one column per seed tuple under consideration. Verifiers are written
against that convention and return boolean arrays (or plain bools, which are
broadcast). Seeds for a batch of size B are a list with one ``(n, B)`` array
per Arthur round; under shared randomness all rows are equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Callable, Sequence

import numpy as np

from .netconfig import LanguageId, NetworkConfig, NodeView

DEFAULT_CAP = 10**7
BLOCK = 1 << 16
HOEFFDING_CONFIDENCE = 0.95


class Player(str, Enum):
    ARTHUR = "A"
    MERLIN = "M"


class Randomness(str, Enum):
    SHARED = "shared"
    PRIVATE = "private"


class BandwidthError(RuntimeError):
    """A prover or verifier emitted more bits than the protocol allows."""


class CapExceeded(RuntimeError):
    """Enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class ProtocolSpec:
    rounds: int
    last_player: Player
    randomness: Randomness
    bandwidth_bits: int
    seed_domains: tuple[int, ...] = ()
    error_budget: Fraction | None = None
    name: str = ""

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("a protocol has at least one round")
        if len(self.seed_domains) != self.schedule.count(Player.ARTHUR):
            raise ValueError("need one seed domain per Arthur round")
        for d in self.seed_domains:
            if d < 1 or d > 1 << self.bandwidth_bits:
                raise ValueError(f"seed domain of size {d} does not fit in {self.bandwidth_bits} bits")
        if self.error_budget is not None and not 0 <= self.error_budget < Fraction(1, 2):
            raise ValueError("error budget must lie in [0, 1/2)")

    @cached_property
    def schedule(self) -> tuple[Player, ...]:
        out = [self.last_player]
        for _ in range(self.rounds - 1):
            out.append(Player.ARTHUR if out[-1] is Player.MERLIN else Player.MERLIN)
        return tuple(reversed(out))

    @property
    def arthur_rounds(self) -> int:
        return len(self.seed_domains)

    @property
    def merlin_rounds(self) -> int:
        return self.rounds - self.arthur_rounds

    @property
    def seed_tuple_count(self) -> int:
        return math.prod(self.seed_domains)

    def seed_space_size(self, n: int) -> int:
        per_node = self.seed_tuple_count
        return per_node**n if self.randomness is Randomness.PRIVATE else per_node

    @property
    def class_name(self) -> str:
        tag = "".join(p.value for p in self.schedule)
        mode = "s" if self.randomness is Randomness.SHARED else "p"
        return f"d{tag}^{mode}[{self.rounds}, {self.bandwidth_bits}]"


@dataclass(frozen=True, eq=False)
class Packet:
    """Fixed-width fields; a value is an int or an int array over the batch."""

    values: tuple
    widths: tuple[int, ...]
    checked: bool = field(default=False, compare=False, repr=False)

    @property
    def bits(self) -> int:
        return sum(self.widths)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def check_range(self) -> None:
        if self.checked:
            return
        for val, w in zip(self.values, self.widths):
            arr = np.asarray(val)
            if arr.size and (arr.min() < 0 or arr.max() >> w):
                raise BandwidthError(f"value does not fit in its {w}-bit field")
        object.__setattr__(self, "checked", True)

    def scalars(self) -> tuple:
        return tuple(int(v) for v in self.values)


class Verifier:
    """Per-node verification: one broadcast message, then a decision."""

    def message(self, view: NodeView, transcript: Sequence) -> Any:
        raise NotImplementedError

    def decide(self, view: NodeView, transcript: Sequence, inbox: Sequence) -> Any:
        raise NotImplementedError


Prover = Callable[[NetworkConfig, int, list], list]


@dataclass(frozen=True)
class CertificateSpace:
    """Per-node candidate certificates; ``uniform`` restricts to equal choices."""

    domains: tuple[tuple, ...]
    uniform: bool = False

    def __post_init__(self):
        if self.uniform and len({len(d) for d in self.domains}) > 1:
            raise ValueError("uniform space needs equal domain sizes")

    @property
    def size(self) -> int:
        if not self.domains:
            return 1
        if self.uniform:
            return len(self.domains[0])
        return math.prod(len(d) for d in self.domains)

    @property
    def empty(self) -> bool:
        return any(len(d) == 0 for d in self.domains)

    def assignment(self, index: int) -> tuple[int, ...]:
        if self.uniform:
            return (index,) * len(self.domains)
        sizes = [len(d) for d in self.domains]
        return tuple(int(i) for i in np.unravel_index(index, sizes)) if sizes else ()

    def certificates(self, assignment: Sequence[int]) -> list:
        return [self.domains[v][i] for v, i in enumerate(assignment)]


@dataclass(frozen=True)
class Protocol:
    spec: ProtocolSpec
    verifier: Verifier
    prover: Prover
    certificate_space: Callable[[NetworkConfig], CertificateSpace] | None = None
    # space shown to dominate the full one (same maximum); used when present
    reduced_space: Callable[[NetworkConfig], CertificateSpace] | None = None
    language: LanguageId | None = None
    params: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.spec.name

    def adversary_space(self, cfg: NetworkConfig) -> CertificateSpace:
        if self.reduced_space is not None:
            return self.reduced_space(cfg)
        if self.certificate_space is None:
            raise ValueError(f"protocol {self.name} declares no certificate space")
        return self.certificate_space(cfg)


def views(cfg: NetworkConfig) -> tuple[NodeView, ...]:
    return cfg.views


# seed enumeration

def _shared_block(spec: ProtocolSpec, n: int, idx: np.ndarray) -> list[np.ndarray]:
    if not spec.seed_domains:
        return []
    digits = np.unravel_index(idx, spec.seed_domains)
    return [np.broadcast_to(d.astype(np.int64), (n, idx.size)) for d in digits]


def _private_block(spec: ProtocolSpec, n: int, idx: np.ndarray) -> list[np.ndarray]:
    per = spec.seed_tuple_count
    node_idx = np.unravel_index(idx, (per,) * n)
    rounds = [np.empty((n, idx.size), dtype=np.int64) for _ in spec.seed_domains]
    for v in range(n):
        digits = np.unravel_index(node_idx[v], spec.seed_domains)
        for r, d in enumerate(digits):
            rounds[r][v] = d
    return rounds


def seed_block(spec: ProtocolSpec, n: int, start: int, stop: int) -> list[np.ndarray]:
    """Seeds for tuple indices [start, stop) of the canonical enumeration."""
    return list(_seed_block(spec.randomness, spec.seed_domains, n, start, stop))


@lru_cache(maxsize=64)
def _seed_block(randomness, domains, n, start, stop) -> tuple[np.ndarray, ...]:
    spec = ProtocolSpec(2 * len(domains) + 1, Player.MERLIN, randomness, 64, domains)
    idx = np.arange(start, stop, dtype=np.int64)
    if randomness is Randomness.SHARED:
        out = _shared_block(spec, n, idx)
    else:
        out = _private_block(spec, n, idx)
    for a in out:
        a.flags.writeable = False
    return tuple(out)


@lru_cache(maxsize=64)
def _tiled_shared(domains, n, total, k) -> tuple[np.ndarray, ...]:
    """Shared seeds for ``k`` consecutive copies of the full enumeration."""
    out = []
    for s in _seed_block(Randomness.SHARED, domains, n, 0, total):
        row = np.tile(s[0], k)
        row.flags.writeable = False
        out.append(np.broadcast_to(row, (n, k * total)))
    return tuple(out)


def _sample_block(spec: ProtocolSpec, n: int, size: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for d in spec.seed_domains:
        if spec.randomness is Randomness.SHARED:
            out.append(np.broadcast_to(rng.integers(0, d, size=size, dtype=np.int64), (n, size)))
        else:
            out.append(rng.integers(0, d, size=(n, size), dtype=np.int64))
    return out


# core evaluation

@dataclass
class Evaluation:
    accepts: np.ndarray  # (B,) conjunction over the decided nodes
    decided: tuple[int, ...]
    transcripts: list
    messages: dict
    verdicts: np.ndarray | None = None  # (len(decided), B) when requested


def _check_cert(cert, spec: ProtocolSpec) -> None:
    bits = cert.bits
    if bits > spec.bandwidth_bits:
        raise BandwidthError(f"certificate of {bits} bits exceeds f = {spec.bandwidth_bits}")
    if isinstance(cert, Packet):
        cert.check_range()


def evaluate(cfg: NetworkConfig, protocol: Protocol, seeds: list[np.ndarray], batch: int,
             certs: list[list] | None = None, prover: Prover | None = None,
             decide_nodes: Sequence[int] | None = None, per_node: bool = False) -> Evaluation:
    """Run the interaction on a batch; ``certs[j][v]`` overrides Merlin round j."""
    spec = protocol.spec
    verifier = protocol.verifier
    f = spec.bandwidth_bits
    n = cfg.n
    vs = cfg.views
    ports = cfg.ports
    if decide_nodes is None:
        decided = range(n)
        needed = decided
    else:
        decided = tuple(decide_nodes)
        needed = sorted(set(decided).union(*(ports[v] for v in decided)))
    entries: list[list] = [[] for _ in range(n)]
    a_i = m_i = 0
    for player in spec.schedule:
        if player is Player.ARTHUR:
            s = seeds[a_i]
            for v in range(n):
                entries[v].append(s[v])
            a_i += 1
        else:
            round_certs = certs[m_i] if certs is not None else (prover or protocol.prover)(cfg, m_i, seeds[:a_i])
            checked = set()
            for v in needed:
                c = round_certs[v]
                if id(c) not in checked:
                    _check_cert(c, spec)
                    checked.add(id(c))
            for v in range(n):
                entries[v].append(round_certs[v])
            m_i += 1
    msgs: list = [None] * n
    for v in needed:
        msg = verifier.message(vs[v], entries[v])
        if msg.bits > f:
            raise BandwidthError(f"node {v} emitted {msg.bits} bits, f = {f}")
        if isinstance(msg, Packet):
            msg.check_range()
        msgs[v] = msg
    table = np.empty((len(decided), batch), dtype=bool) if per_node else None
    acc = np.ones(batch, dtype=bool)
    for k, v in enumerate(decided):
        d = verifier.decide(vs[v], entries[v], [msgs[u] for u in ports[v]])
        if table is not None:
            table[k] = d
        if d is True:
            continue
        if d is False:
            acc[:] = False
        else:
            acc &= d
    return Evaluation(acc, tuple(decided), entries, msgs, table)


@dataclass(frozen=True)
class RunResult:
    verdicts: tuple[bool, ...]
    accepted: bool
    transcript: tuple[tuple, ...]


def _scalarize(entry):
    if isinstance(entry, Packet):
        return tuple(int(np.asarray(v).ravel()[0]) for v in entry.values)
    arr = np.asarray(entry)
    if arr.dtype != object and arr.size == 1:
        return int(arr.ravel()[0])
    return entry


def run_once(cfg: NetworkConfig, protocol: Protocol, seeds: Sequence, prover: Prover | None = None,
             certs: list[list] | None = None) -> RunResult:
    """Replay one interaction. ``seeds[j]`` is an int (shared) or per-node ints."""
    spec = protocol.spec
    if len(seeds) != spec.arthur_rounds:
        raise ValueError(f"expected {spec.arthur_rounds} seeds, got {len(seeds)}")
    arrays = []
    for j, s in enumerate(seeds):
        d = spec.seed_domains[j]
        if spec.randomness is Randomness.SHARED:
            if not np.isscalar(s):
                vals = set(int(x) for x in s)
                if len(vals) != 1:
                    raise ValueError("shared seeds must agree across nodes")
                s = vals.pop()
            row = np.full((cfg.n, 1), int(s), dtype=np.int64)
        else:
            if np.isscalar(s) or len(s) != cfg.n:
                raise ValueError("private mode needs one seed per node")
            row = np.asarray(s, dtype=np.int64).reshape(cfg.n, 1)
        if row.min() < 0 or row.max() >= d:
            raise ValueError(f"seed outside domain of size {d}")
        arrays.append(row)
    ev = evaluate(cfg, protocol, arrays, 1, certs=certs, prover=prover, per_node=True)
    verdicts = tuple(bool(x) for x in ev.verdicts[:, 0])
    transcript = tuple(tuple(_scalarize(e) for e in ev.transcripts[v]) for v in range(cfg.n))
    return RunResult(verdicts, all(verdicts), transcript)


@dataclass(frozen=True)
class AcceptanceReport:
    mode: str  # "exact" or "monte_carlo"
    accepted: int
    total: int
    probability: Fraction | None = None
    estimate: float | None = None
    halfwidth: float | None = None
    rng_seed: int | None = None
    verdicts: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def value(self):
        return self.probability if self.mode == "exact" else self.estimate


def _check_cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise CapExceeded(f"{what} has {size} elements, above the cap {cap}; use Monte Carlo")


def exact_acceptance(cfg: NetworkConfig, protocol: Protocol, prover: Prover | None = None,
                     cap: int = DEFAULT_CAP, keep_verdicts: bool = False,
                     certs: list[list] | None = None) -> AcceptanceReport:
    spec = protocol.spec
    total = spec.seed_space_size(cfg.n)
    _check_cap(total, cap, "seed space")
    accepted = 0
    table = np.empty((cfg.n, total), dtype=bool) if keep_verdicts else None
    for start in range(0, total, BLOCK):
        stop = min(total, start + BLOCK)
        seeds = seed_block(spec, cfg.n, start, stop)
        ev = evaluate(cfg, protocol, seeds, stop - start, certs=certs, prover=prover,
                      per_node=keep_verdicts)
        accepted += int(np.count_nonzero(ev.accepts))
        if table is not None:
            table[:, start:stop] = ev.verdicts
    return AcceptanceReport("exact", accepted, total, probability=Fraction(accepted, total), verdicts=table)


def hoeffding_halfwidth(trials: int, confidence: float = HOEFFDING_CONFIDENCE) -> float:
    return math.sqrt(math.log(2 / (1 - confidence)) / (2 * trials))


def monte_carlo_acceptance(cfg: NetworkConfig, protocol: Protocol, trials: int, rng_seed: int,
                           prover: Prover | None = None, certs: list[list] | None = None,
                           block: int = BLOCK) -> AcceptanceReport:
    if trials < 1:
        raise ValueError("trials must be positive")
    children = np.random.SeedSequence(rng_seed).spawn(-(-trials // block))
    accepted = 0
    done = 0
    for child in children:
        size = min(block, trials - done)
        seeds = _sample_block(protocol.spec, cfg.n, size, np.random.default_rng(child))
        ev = evaluate(cfg, protocol, seeds, size, certs=certs, prover=prover)
        accepted += int(ev.accepts.sum())
        done += size
    return AcceptanceReport("monte_carlo", accepted, trials, estimate=accepted / trials,
                            halfwidth=hoeffding_halfwidth(trials), rng_seed=rng_seed)


# adversaries

@dataclass(frozen=True)
class AdversaryReport:
    value: Fraction
    winning: int
    total: int
    adaptive: bool
    method: str
    # dMA: one assignment (candidate index per node); dAM: (total, n) array, -1 rows lose
    witness: Any = field(repr=False, compare=False)
    won: np.ndarray | None = field(default=None, repr=False, compare=False)


def merlin_position(spec: ProtocolSpec) -> int:
    if spec.merlin_rounds != 1:
        raise ValueError("adversary evaluation supports protocols with exactly one Merlin round")
    return spec.schedule.index(Player.MERLIN)


def default_adaptivity(spec: ProtocolSpec) -> bool:
    pos = merlin_position(spec)
    before = spec.schedule[:pos].count(Player.ARTHUR)
    after = spec.schedule[pos + 1:].count(Player.ARTHUR)
    if before and after:
        raise ValueError("Arthur rounds on both sides of Merlin: pass adaptive explicitly")
    return bool(before)


_COLUMN_CACHE: dict[int, tuple] = {}


def domain_columns(domain: Sequence[Packet]) -> tuple[np.ndarray, ...]:
    """Field-wise int64 columns of a candidate list, validated once."""
    hit = _COLUMN_CACHE.get(id(domain))
    if hit is not None and hit[0] is domain:
        return hit[1]
    first = domain[0]
    if not isinstance(first, Packet) or any(c.widths != first.widths for c in domain):
        raise TypeError("enumerated certificates must be packets with a common layout")
    cols = []
    for j, w in enumerate(first.widths):
        col = np.fromiter((c.values[j] for c in domain), dtype=np.int64, count=len(domain))
        if col.size and (col.min() < 0 or col.max() >> w):
            raise BandwidthError(f"candidate value does not fit in its {w}-bit field")
        cols.append(col)
    if len(_COLUMN_CACHE) > 1024:
        _COLUMN_CACHE.clear()
    _COLUMN_CACHE[id(domain)] = (domain, tuple(cols))
    return tuple(cols)


def _stack(domain: Sequence[Packet], choice: np.ndarray, repeat: int) -> Packet:
    cols = domain_columns(domain)
    return Packet(tuple(np.repeat(col[choice], repeat) for col in cols), domain[0].widths, checked=True)


def _check_space(space: CertificateSpace, cfg: NetworkConfig) -> None:
    if len(space.domains) != cfg.n:
        raise ValueError("certificate space must list a domain per node")
    if space.empty:
        raise ValueError("certificate space is empty")


def best_adversary_exact(cfg: NetworkConfig, protocol: Protocol, space: CertificateSpace | None = None,
                         cap: int = DEFAULT_CAP, adaptive: bool | None = None) -> AdversaryReport:
    """Exact maximum acceptance over the certificate space.

    With ``adaptive`` the prover answers each seed tuple separately (the
    per-seed maximum); otherwise one assignment is fixed before the coins.
    """
    spec = protocol.spec
    merlin_position(spec)
    if adaptive is None:
        adaptive = default_adaptivity(spec)
    space = protocol.adversary_space(cfg) if space is None else space
    _check_space(space, cfg)
    total = spec.seed_space_size(cfg.n)
    _check_cap(total, cap, "seed space")
    if total * space.size <= cap:
        return _enumerate_adversary(cfg, protocol, space, total, adaptive)
    if space.uniform:
        raise CapExceeded("uniform certificate space too large to enumerate")
    return _branch_and_bound(cfg, protocol, space, total, adaptive, cap)


def _enumerate_adversary(cfg, protocol, space, total, adaptive) -> AdversaryReport:
    spec = protocol.spec
    n = cfg.n
    seeds = seed_block(spec, n, 0, total)
    count = space.size
    chunk = max(1, BLOCK // total)
    sizes = [len(d) for d in space.domains]
    won = np.zeros(total, dtype=bool)
    witness = np.full((total, n), -1, dtype=np.int64) if adaptive else None
    best, best_assign = -1, None
    for c0 in range(0, count, chunk):
        idx = np.arange(c0, min(count, c0 + chunk), dtype=np.int64)
        k = idx.size
        if space.uniform:
            choice = [idx] * n
        else:
            choice = list(np.unravel_index(idx, sizes))
        if space.uniform and all(d is space.domains[0] for d in space.domains):
            certs = [_stack(space.domains[0], idx, total)] * n
        else:
            certs = [_stack(space.domains[v], choice[v], total) for v in range(n)]
        if spec.randomness is Randomness.SHARED:
            batch_seeds = list(_tiled_shared(spec.seed_domains, n, total, k))
        else:
            batch_seeds = [np.tile(s, (1, k)) for s in seeds]
        ev = evaluate(cfg, protocol, batch_seeds, k * total, certs=[certs])
        acc = ev.accepts.reshape(k, total)
        if adaptive:
            new = acc.any(axis=0) & ~won
            if new.any():
                first = acc[:, new].argmax(axis=0)
                if space.uniform:
                    witness[new] = idx[first][:, None]
                else:
                    witness[new] = np.stack([choice[v][first] for v in range(n)], axis=1)
                won |= new
        else:
            counts = acc.sum(axis=1)
            j = int(counts.argmax())
            if counts[j] > best:
                best = int(counts[j])
                best_assign = tuple(int(choice[v][j]) for v in range(n))
                won = acc[j].copy()
    if adaptive:
        wins = int(won.sum())
        return AdversaryReport(Fraction(wins, total), wins, total, True, "enumeration", witness, won)
    return AdversaryReport(Fraction(best, total), best, total, False, "enumeration", best_assign, won)


def _branch_and_bound(cfg, protocol, space, total, adaptive, cap) -> AdversaryReport:
    spec = protocol.spec
    n = cfg.n
    seeds = seed_block(spec, n, 0, total)
    vs = views(cfg)
    order = []
    seen = {0}
    queue = [0]
    while queue:
        u = queue.pop(0)
        order.append(u)
        for w in cfg.ports[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    pos = {v: i for i, v in enumerate(order)}
    completes: list[list[int]] = [[] for _ in range(n)]
    for w in range(n):
        completes[max(pos[u] for u in (w,) + cfg.ports[w])].append(w)
    pos_m = merlin_position(spec)
    arthur_before = spec.schedule[:pos_m].count(Player.ARTHUR)

    def transcript(v, cert):
        out = [s[v] for s in seeds[:arthur_before]]
        out.append(cert)
        out.extend(s[v] for s in seeds[arthur_before:])
        return out

    msg_cache: dict = {}

    def message(v, ci):
        key = (v, ci)
        if key not in msg_cache:
            cert = space.domains[v][ci]
            _check_cert(cert, spec)
            msg = protocol.verifier.message(vs[v], transcript(v, cert))
            if msg.bits > spec.bandwidth_bits:
                raise BandwidthError(f"node {v} emitted {msg.bits} bits")
            msg_cache[key] = msg
        return msg_cache[key]

    assign = [0] * n
    state = {"best": -1, "best_assign": None, "explored": 0,
             "won": np.zeros(total, dtype=bool), "best_mask": None}
    witness = np.full((total, n), -1, dtype=np.int64) if adaptive else None
    budget = max(1, cap // max(total, 1))
    zeros = np.zeros(total, dtype=bool)

    def dfs(i, mask):
        if i == n:
            if adaptive:
                new = mask & ~state["won"]
                witness[new] = assign
                state["won"] |= mask
            else:
                cnt = int(np.count_nonzero(mask))
                if cnt > state["best"]:
                    state["best"] = cnt
                    state["best_assign"] = tuple(assign)
                    state["best_mask"] = mask.copy()
            return
        v = order[i]
        for ci in range(len(space.domains[v])):
            state["explored"] += 1
            if state["explored"] > budget:
                raise CapExceeded("branch-and-bound exceeded the enumeration cap")
            assign[v] = ci
            m = mask
            for w in completes[i]:
                inbox = [message(u, assign[u]) for u in cfg.ports[w]]
                d = protocol.verifier.decide(vs[w], transcript(w, space.domains[w][assign[w]]), inbox)
                if d is True or d is np.True_:
                    continue
                m = m & d if not (d is False or d is np.False_) else zeros
                if not m.any():
                    break
            if adaptive:
                if not (m & ~state["won"]).any():
                    continue
            elif np.count_nonzero(m) <= state["best"]:
                continue
            dfs(i + 1, m)

    dfs(0, np.ones(total, dtype=bool))
    if adaptive:
        won = state["won"]
        wins = int(won.sum())
        return AdversaryReport(Fraction(wins, total), wins, total, True, "branch-and-bound", witness, won)
    best = max(state["best"], 0)
    mask = state["best_mask"] if state["best_mask"] is not None else np.zeros(total, dtype=bool)
    return AdversaryReport(Fraction(best, total), best, total, False, "branch-and-bound",
                           state["best_assign"], mask)


@dataclass(frozen=True)
class SearchReport:
    value: Fraction | float
    exact: bool
    evaluations: int
    witness: tuple[int, ...]


def best_adversary_search(cfg: NetworkConfig, protocol: Protocol, budget: int, rng_seed: int,
                          space: CertificateSpace | None = None, cap: int = DEFAULT_CAP,
                          trials: int = 4096, patience: int = 8) -> SearchReport:
    """Restarted greedy hill climbing over single certificate assignments.

    The value is a lower bound on the best acceptance. Acceptance is exact
    when the seed space fits under ``cap``; otherwise it is estimated on one
    fixed sample of ``trials`` seed tuples shared by all evaluations.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    spec = protocol.spec
    space = protocol.adversary_space(cfg) if space is None else space
    _check_space(space, cfg)
    n = cfg.n
    total = spec.seed_space_size(n)
    exact = total <= cap
    if exact:
        seeds = seed_block(spec, n, 0, total) if total <= BLOCK else None
        size = total
    else:
        seeds = _sample_block(spec, n, trials, np.random.default_rng(np.random.SeedSequence([rng_seed, 1])))
        size = trials

    def score(assignment) -> int:
        certs = [space.certificates(assignment)]
        if seeds is not None:
            return int(evaluate(cfg, protocol, seeds, size, certs=certs).accepts.sum())
        return exact_acceptance(cfg, protocol, cap=cap, certs=certs).accepted

    rng = np.random.default_rng(rng_seed)
    sizes = [len(d) for d in space.domains]

    def random_assignment():
        if space.uniform:
            return (int(rng.integers(sizes[0])),) * n
        return tuple(int(rng.integers(s)) for s in sizes)

    evals = 0
    best_val, best_assign = -1, None
    while evals < budget:
        cur = random_assignment()
        val = score(cur)
        evals += 1
        if val > best_val:
            best_val, best_assign = val, cur
        stall = 0
        while evals < budget and stall < patience:
            if space.uniform:
                cand = random_assignment()
            else:
                v = int(rng.integers(n))
                lst = list(cur)
                lst[v] = int(rng.integers(sizes[v]))
                cand = tuple(lst)
            cv = score(cand)
            evals += 1
            if cv > val:
                cur, val, stall = cand, cv, 0
                if cv > best_val:
                    best_val, best_assign = cv, cand
            else:
                stall += 1
    value = Fraction(best_val, size) if exact else best_val / size
    return SearchReport(value, exact, evals, best_assign)


def subset_acceptance(cfg: NetworkConfig, protocol: Protocol, certs: list, nodes: Sequence[int],
                      cap: int = DEFAULT_CAP) -> Fraction:
    """Exact probability that every node in ``nodes`` accepts.

    Under private coins only the coins of the closed neighborhood of
    ``nodes`` matter; the others are pinned to zero.
    """
    spec = protocol.spec
    nodes = tuple(nodes)
    if spec.randomness is Randomness.SHARED:
        total = spec.seed_tuple_count
        _check_cap(total, cap, "seed space")
        seeds = seed_block(spec, cfg.n, 0, total)
    else:
        rel = sorted(set(nodes).union(*(cfg.ports[v] for v in nodes)))
        per = spec.seed_tuple_count
        total = per ** len(rel)
        _check_cap(total, cap, "seed space")
        idx = np.unravel_index(np.arange(total, dtype=np.int64), (per,) * len(rel))
        seeds = [np.zeros((cfg.n, total), dtype=np.int64) for _ in spec.seed_domains]
        for k, v in enumerate(rel):
            digits = np.unravel_index(idx[k], spec.seed_domains)
            for r, d in enumerate(digits):
                seeds[r][v] = d
    ev = evaluate(cfg, protocol, seeds, total, certs=[certs], decide_nodes=nodes)
    return Fraction(int(ev.accepts.sum()), total)


def acceptance_matrix(cfg: NetworkConfig, protocol: Protocol, seeds: list[np.ndarray], batch: int,
                      space: CertificateSpace, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Conjunctive acceptance of every assignment (rows) on every seed column."""
    merlin_position(protocol.spec)
    _check_space(space, cfg)
    count = space.size
    _check_cap(count * batch, cap, "assignment-by-seed grid")
    n = cfg.n
    sizes = [len(d) for d in space.domains]
    out = np.empty((count, batch), dtype=bool)
    chunk = max(1, BLOCK // batch)
    for c0 in range(0, count, chunk):
        idx = np.arange(c0, min(count, c0 + chunk), dtype=np.int64)
        k = idx.size
        choice = [idx] * n if space.uniform else list(np.unravel_index(idx, sizes))
        certs = [_stack(space.domains[v], choice[v], batch) for v in range(n)]
        tiled = [np.tile(s, (1, k)) for s in seeds]
        out[c0:c0 + k] = evaluate(cfg, protocol, tiled, k * batch, certs=[certs]).accepts.reshape(k, batch)
    return out
