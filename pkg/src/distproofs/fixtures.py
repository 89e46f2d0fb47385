"""Instance families used by tests, benchmarks and the CLI."""

from __future__ import annotations

import itertools
from functools import lru_cache
from importlib import resources
from typing import Iterator

import networkx as nx
import numpy as np

from .field import DEFAULT_C
from .netconfig import NetworkConfig, equality_path, graph_config

# non-isomorphic connected graphs on n nodes, n = 1..8
CONNECTED_COUNTS = (1, 1, 2, 6, 21, 112, 853, 11117)
_DATA_FILE = "connected8.g6"


def extend_by_vertex(graphs: list[nx.Graph]) -> list[nx.Graph]:
    """All connected graphs with one more vertex, up to isomorphism.

    Every connected graph has a vertex whose removal keeps it connected, so
    attaching a new vertex to each nonempty subset of each input graph
    reaches every class.
    """
    buckets: dict[str, list[nx.Graph]] = {}
    out = []
    for g in graphs:
        n = g.number_of_nodes()
        for r in range(1, n + 1):
            for nbrs in itertools.combinations(range(n), r):
                h = g.copy()
                h.add_edges_from((n, u) for u in nbrs)
                key = nx.weisfeiler_lehman_graph_hash(h, iterations=3)
                key = f"{key}:{sorted(d for _, d in h.degree())}"
                bucket = buckets.setdefault(key, [])
                if any(nx.is_isomorphic(h, k) for k in bucket):
                    continue
                bucket.append(h)
                out.append(h)
    return out


@lru_cache(maxsize=None)
def _atlas_connected(n: int) -> tuple:
    return tuple(nx.convert_node_labels_to_integers(g) for g in nx.graph_atlas_g()
                 if g.number_of_nodes() == n and (n == 0 or nx.is_connected(g)))


@lru_cache(maxsize=None)
def connected_graphs(n: int) -> tuple:
    """Representatives of all connected graphs on n <= 8 nodes."""
    if not 1 <= n <= 8:
        raise ValueError("catalogue covers 1 <= n <= 8")
    if n <= 7:
        return _atlas_connected(n)
    text = resources.files("distproofs.data").joinpath(_DATA_FILE).read_bytes()
    return tuple(nx.from_graph6_bytes(line) for line in text.split(b"\n") if line)


def write_catalogue(path) -> int:
    graphs = extend_by_vertex(list(_atlas_connected(7)))
    with open(path, "wb") as fh:
        for g in graphs:
            fh.write(nx.to_graph6_bytes(g, header=False))
    return len(graphs)


def sample_ids(n: int, seed: int, c: int = DEFAULT_C) -> tuple[int, ...]:
    """Distinct ids from [1, n^c], reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    return tuple(int(i) + 1 for i in rng.choice(n**c, size=n, replace=False))


def amos_family(max_n: int, seed: int = 0, c: int = DEFAULT_C) -> Iterator[tuple[str, NetworkConfig]]:
    """Every connected graph with n <= max_n, selecting <= 1 node or exactly 2.

    Ids are drawn once per graph. Yields (instance id, configuration).
    """
    for n in range(1, max_n + 1):
        for gi, g in enumerate(connected_graphs(n)):
            ids = sample_ids(n, seed * 1_000_003 + 7919 * n + gi, c)
            base = graph_config(n, list(g.edges()), ids, ["0"] * n, c)
            selections = [()] + [(v,) for v in range(n)] + list(itertools.combinations(range(n), 2))
            for sel in selections:
                labels = ["1" if v in sel else "0" for v in range(n)]
                tag = "-".join(map(str, sel)) or "none"
                yield f"amos-n{n}-g{gi:05d}-s{tag}", base.with_labels(labels)


def amos_small_family(n: int = 3, max_id: int = 9, c: int = DEFAULT_C) -> list[NetworkConfig]:
    """All AMOS configurations on n labeled nodes with ids from [1, max_id].

    Node i carries the i-th smallest id; every connected labeled graph and
    every labeling is included.
    """
    pairs = list(itertools.combinations(range(n), 2))
    graphs = []
    for r in range(n - 1, len(pairs) + 1):
        for es in itertools.combinations(pairs, r):
            g = nx.Graph(es)
            g.add_nodes_from(range(n))
            if nx.is_connected(g):
                graphs.append(es)
    out = []
    for ids in itertools.combinations(range(1, max_id + 1), n):
        for es in graphs:
            for bits in itertools.product("01", repeat=n):
                out.append(graph_config(n, es, ids, bits, c))
    return out


def equality_paths(bits: int) -> Iterator[tuple[str, str, NetworkConfig]]:
    for x, y in itertools.product(range(1 << bits), repeat=2):
        xs, ys = format(x, f"0{bits}b"), format(y, f"0{bits}b")
        yield xs, ys, equality_path(xs, ys)


def triangle(ids, selected=None, c: int = DEFAULT_C) -> NetworkConfig:
    labels = ["1" if v == selected else "0" for v in range(3)]
    return graph_config(3, [(0, 1), (1, 2), (0, 2)], ids, labels, c)


def port_labels(cfg: NetworkConfig, marked) -> list[str]:
    """One bit per port: 1 iff the edge to that neighbor is in ``marked``."""
    marked = {(min(u, v), max(u, v)) for u, v in marked}
    return ["".join("1" if (min(v, w), max(v, w)) in marked else "0" for w in cfg.ports[v])
            for v in range(cfg.n)]


def spanning_tree_family(max_n: int, seed: int = 0, c: int = DEFAULT_C) -> Iterator[tuple[str, NetworkConfig]]:
    """Each connected graph on 2..max_n nodes with a random marked spanning
    tree (yes), and with one tree edge unmarked (no)."""
    for n in range(2, max_n + 1):
        for gi, g in enumerate(connected_graphs(n)):
            s = seed * 1_000_003 + 7919 * n + gi
            ids = sample_ids(n, s, c)
            base = graph_config(n, list(g.edges()), ids, [""] * n, c)
            weights = np.random.default_rng(s).random(g.number_of_edges())
            h = nx.Graph()
            h.add_weighted_edges_from((u, v, w) for (u, v), w in zip(g.edges(), weights))
            tree = sorted(tuple(sorted(e)) for e in nx.minimum_spanning_tree(h).edges())
            yield f"st-n{n}-g{gi:05d}-tree", base.with_labels(port_labels(base, tree))
            yield f"st-n{n}-g{gi:05d}-cut", base.with_labels(port_labels(base, tree[1:]))
