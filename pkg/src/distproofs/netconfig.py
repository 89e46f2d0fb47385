"""Network configurations, language deciders and the canonical text format.

A configuration is a connected simple graph on nodes ``0..n-1`` together
with distinct positive identifiers and a bit-string label per node. Labels
are ``str`` objects over ``'0'``/``'1'``; character 0 is bit 1 of the label.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .field import DEFAULT_C


class LanguageId(str, Enum):
    AMOS = "AMOS"
    TCE = "TCE"
    SPANNING_TREE = "SPANNING_TREE"


class Membership(Enum):
    YES = "yes"
    NO = "no"
    MALFORMED = "malformed"

    def __bool__(self) -> bool:
        return self is Membership.YES


class ConfigError(ValueError):
    """Structurally invalid configuration (disconnected, duplicate ids, ...)."""


class ParseError(ValueError):
    """Canonical text could not be parsed; ``location`` names the field."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class NodeView(NamedTuple):
    """What a node knows about itself before any interaction."""

    node: int
    id: int
    label: str
    degree: int


@dataclass(frozen=True)
class NetworkConfig:
    n: int
    edges: frozenset
    ids: tuple[int, ...]
    labels: tuple[str, ...]
    c: int = DEFAULT_C

    def __post_init__(self):
        edges = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise ConfigError(f"self loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ConfigError(f"edge ({u}, {v}) references a missing node")
            edges.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(edges))
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.n < 1:
            raise ConfigError("a configuration needs at least one node")
        if len(self.ids) != self.n or len(self.labels) != self.n:
            raise ConfigError("ids and labels must cover every node")
        if len(set(self.ids)) != self.n:
            raise ConfigError("ids must be pairwise distinct")
        bound = self.n ** self.c
        for v, i in enumerate(self.ids):
            if not 1 <= i <= max(bound, 1):
                raise ConfigError(f"id {i} of node {v} outside [1, n^c = {bound}]")
        for v, lab in enumerate(self.labels):
            if not isinstance(lab, str) or lab.strip("01"):
                raise ConfigError(f"label of node {v} is not a bit string")
        if not self._connected():
            raise ConfigError("graph is not connected")

    def _connected(self) -> bool:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        todo = [0]
        while todo:
            u = todo.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n

    @cached_property
    def ports(self) -> tuple[tuple[int, ...], ...]:
        """Neighbors of each node, sorted by identifier."""
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a, key=lambda w: self.ids[w])) for a in adj)

    @cached_property
    def views(self) -> tuple[NodeView, ...]:
        ports = self.ports
        return tuple(map(NodeView, range(self.n), self.ids, self.labels, map(len, ports)))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.ports[v]

    def degree(self, v: int) -> int:
        return len(self.ports[v])

    @cached_property
    def index_of_id(self) -> dict[int, int]:
        return {i: v for v, i in enumerate(self.ids)}

    def with_labels(self, labels: Sequence[str]) -> "NetworkConfig":
        """Same graph and ids with new labels; structure is not re-validated."""
        labels = tuple(labels)
        if len(labels) != self.n:
            raise ConfigError("ids and labels must cover every node")
        for v, lab in enumerate(labels):
            if not isinstance(lab, str) or lab.strip("01"):
                raise ConfigError(f"label of node {v} is not a bit string")
        out = object.__new__(NetworkConfig)
        for name in ("n", "edges", "ids", "c"):
            object.__setattr__(out, name, getattr(self, name))
        object.__setattr__(out, "labels", labels)
        out.__dict__["ports"] = self.ports
        out.__dict__["index_of_id"] = self.index_of_id
        return out

    def bfs_distances(self, root: int) -> list[int]:
        dist = [-1] * self.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in self.ports[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist


def two_coloring(cfg: NetworkConfig) -> list[int] | None:
    """Proper 2-coloring with node 0 colored 0, or None if not bipartite."""
    color = [-1] * cfg.n
    color[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in cfg.ports[u]:
            if color[w] < 0:
                color[w] = 1 - color[u]
                queue.append(w)
            elif color[w] == color[u]:
                return None
    return color


def designated_edges(cfg: NetworkConfig) -> set[tuple[int, int]] | None:
    """Edges marked by both endpoints; None when the marking is malformed.

    The label of ``v`` has one bit per port (neighbors in id order).
    """
    marked: dict[tuple[int, int], int] = {}
    for v in range(cfg.n):
        lab = cfg.labels[v]
        if len(lab) != cfg.degree(v):
            return None
        for j, w in enumerate(cfg.ports[v]):
            key = (min(v, w), max(v, w))
            bit = int(lab[j])
            if key in marked and marked[key] != bit:
                return None
            marked[key] = bit
    return {e for e, b in marked.items() if b}


def decide_membership(cfg: NetworkConfig, lang: LanguageId) -> Membership:
    lang = LanguageId(lang)
    if lang is LanguageId.AMOS:
        if any(lab not in ("0", "1") for lab in cfg.labels):
            return Membership.MALFORMED
        return Membership.YES if cfg.labels.count("1") <= 1 else Membership.NO
    if lang is LanguageId.TCE:
        if len({len(lab) for lab in cfg.labels}) != 1:
            return Membership.MALFORMED
        color = two_coloring(cfg)
        if color is None:
            return Membership.NO
        sides = ({cfg.labels[v] for v in range(cfg.n) if color[v] == k} for k in (0, 1))
        return Membership.YES if all(len(s) <= 1 for s in sides) else Membership.NO
    edges = designated_edges(cfg)
    if edges is None:
        return Membership.MALFORMED
    if len(edges) != cfg.n - 1:
        return Membership.NO
    parent = list(range(cfg.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return Membership.NO
        parent[ru] = rv
    return Membership.YES


def build_path(length: int, labels: Sequence[str], c: int = DEFAULT_C) -> NetworkConfig:
    """Path v_1 - ... - v_length stored as nodes 0..length-1 with id(v_i) = i."""
    if length < 1:
        raise ConfigError("path length must be positive")
    if len(labels) != length:
        raise ConfigError(f"expected {length} labels, got {len(labels)}")
    edges = frozenset((i, i + 1) for i in range(length - 1))
    return NetworkConfig(length, edges, tuple(range(1, length + 1)), tuple(labels), c)


def equality_path_labels(x: str, y: str) -> list[str]:
    """Labels of the (2n+1)-path: odd positions 0^n, even positions x then y."""
    if len(x) != len(y):
        raise ValueError("x and y must have equal length")
    n = len(x)
    out = []
    for i in range(1, 2 * n + 2):
        if i % 2:
            out.append("0" * n)
        else:
            out.append(x if i <= n else y)
    return out


def equality_path(x: str, y: str, c: int = DEFAULT_C) -> NetworkConfig:
    """The path on which 2-coloring-with-equal-labels encodes x == y."""
    return build_path(2 * len(x) + 1, equality_path_labels(x, y), c)


def graph_config(n: int, edges: Iterable, ids: Sequence[int], labels: Sequence[str],
                 c: int = DEFAULT_C) -> NetworkConfig:
    return NetworkConfig(n, frozenset(tuple(e) for e in edges), tuple(ids), tuple(labels), c)


# canonical text form

def label_to_hex(label: str) -> str:
    if not label:
        return ""
    width = (len(label) + 3) // 4
    return format(int(label, 2), f"0{width}x")


def hex_to_label(text: str, bits: int | None) -> str:
    if text == "":
        if bits:
            raise ValueError("empty hex for a non-empty label")
        return ""
    value = int(text, 16)
    if bits is None:
        bits = 4 * len(text)
    if value >= 1 << bits:
        raise ValueError(f"hex {text!r} does not fit in {bits} bits")
    return format(value, f"0{bits}b")


def serialize(cfg: NetworkConfig) -> str:
    """Canonical JSON text. ``label_bits`` records exact label lengths."""
    obj = {
        "n": cfg.n,
        "edges": [list(e) for e in sorted(cfg.edges)],
        "ids": list(cfg.ids),
        "labels": [label_to_hex(lab) for lab in cfg.labels],
        "label_bits": [len(lab) for lab in cfg.labels],
    }
    if cfg.c != DEFAULT_C:
        obj["c"] = cfg.c
    return json.dumps(obj, separators=(",", ":")) + "\n"


def _require(obj: dict, key: str, kind):
    if key not in obj:
        raise ParseError(f"missing key {key!r}", key)
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise ParseError(f"expected {getattr(kind, '__name__', kind)}", key)
    return val


def deserialize(text: str) -> NetworkConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    n = _require(obj, "n", int)
    edges_raw = _require(obj, "edges", list)
    ids = _require(obj, "ids", list)
    labels_hex = _require(obj, "labels", list)
    bits = obj.get("label_bits")
    c = obj.get("c", DEFAULT_C)
    if bits is not None and (not isinstance(bits, list) or len(bits) != len(labels_hex)):
        raise ParseError("must list one length per label", "label_bits")
    edges = []
    for i, e in enumerate(edges_raw):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise ParseError("edge must be a pair of node indices", f"edges[{i}]")
        edges.append(tuple(e))
    for i, v in enumerate(ids):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ParseError("id must be an integer", f"ids[{i}]")
    labels = []
    for i, h in enumerate(labels_hex):
        if not isinstance(h, str):
            raise ParseError("label must be a hex string", f"labels[{i}]")
        try:
            labels.append(hex_to_label(h, None if bits is None else bits[i]))
        except (ValueError, TypeError) as exc:
            raise ParseError(str(exc), f"labels[{i}]") from None
    return graph_config(n, edges, ids, labels, c)


def load(path) -> NetworkConfig:
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def dump(cfg: NetworkConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(cfg))
