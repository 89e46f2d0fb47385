"""Bridge gadgets gluing AMOS fixtures so that local views stay yes-like.

A *pair* joins a graph ``Fa`` (one selected node) and a graph ``Fb`` (no
selected node) through four fresh nodes ``x_A, y_A, x_B, y_B``. A *square*
glues two A-graphs and two B-graphs through eight fresh nodes arranged in a
cycle ``y_A1 x_A1 y_B1 x_B1 y_A2 x_A2 y_B2 x_B2``; each bridge node sees
exactly what the corresponding node of some pair sees.

The integer ranges A, B, C of :class:`GadgetParams` are used as identifier
pools: ``Fa`` draws ids from A, ``Fb`` from B and bridge nodes from C.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .netconfig import ConfigError, NetworkConfig

PAIR_BRIDGE = ("x_A", "y_A", "x_B", "y_B")
SQUARE_BRIDGE = ("x_A1", "y_A1", "x_B1", "y_B1", "x_A2", "y_A2", "x_B2", "y_B2")


@dataclass(frozen=True)
class GadgetParams:
    n: int
    a: range
    b: range
    c: range

    def __post_init__(self):
        n2 = self.n * self.n
        bounds = {"A": (self.a, 1, n2), "B": (self.b, n2 + 1, 2 * n2), "C": (self.c, 2 * n2 + 1, 3 * n2)}
        for name, (r, lo, hi) in bounds.items():
            if len(r) and (min(r) < lo or max(r) > hi):
                raise ConfigError(f"range {name} must lie in [{lo}, {hi}]")
        for r1, r2 in ((self.a, self.b), (self.a, self.c), (self.b, self.c)):
            if set(r1) & set(r2):
                raise ConfigError("label ranges overlap")

    @classmethod
    def standard(cls, n: int) -> "GadgetParams":
        n2 = n * n
        return cls(n, range(1, n2 + 1), range(n2 + 1, 2 * n2 + 1), range(2 * n2 + 1, 3 * n2 + 1))


def _check_side(f: NetworkConfig, pool: range, selected: int, name: str) -> None:
    if not set(f.ids) <= set(pool):
        raise ConfigError(f"{name} ids must come from its range")
    if f.labels.count("1") != selected or any(lab not in ("0", "1") for lab in f.labels):
        raise ConfigError(f"{name} must have exactly {selected} selected node(s)")


def _selected(f: NetworkConfig) -> int:
    return f.labels.index("1")


def default_attachment(f: NetworkConfig) -> int:
    """Lowest-id non-selected node."""
    cands = [v for v in range(f.n) if f.labels[v] != "1"]
    if not cands:
        raise ConfigError("no non-selected node to attach the bridge to")
    return min(cands, key=lambda v: f.ids[v])


def _check_a(fa: NetworkConfig, params: GadgetParams, va: int) -> None:
    _check_side(fa, params.a, 1, "Fa")
    sel = _selected(fa)
    if fa.ids[sel] != min(fa.ids):
        raise ConfigError("the selected node of Fa must carry the smallest id")
    if va == sel:
        raise ConfigError("bridge attachment v_a must differ from the selected node")


def _bridge_ids(params: GadgetParams, count: int) -> list[int]:
    pool = list(params.c)
    if len(pool) < count:
        raise ConfigError("range C too small for the bridge nodes")
    return pool[:count]


def build_bridge_pair(fa: NetworkConfig, fb: NetworkConfig, params: GadgetParams,
                      va: int | None = None, vb: int | None = None) -> NetworkConfig:
    """Node order: Fa, Fb, then x_A, y_A, x_B, y_B."""
    va = default_attachment(fa) if va is None else va
    vb = default_attachment(fb) if vb is None else vb
    _check_a(fa, params, va)
    _check_side(fb, params.b, 0, "Fb")
    na, nb = fa.n, fb.n
    base = na + nb
    xa, ya, xb, yb = range(base, base + 4)
    edges = {(u, v) for u, v in fa.edges}
    edges |= {(u + na, v + na) for u, v in fb.edges}
    edges |= {(xa, ya), (xa, yb), (xb, ya), (xb, yb), (ya, va), (yb, vb + na)}
    ids = fa.ids + fb.ids + tuple(_bridge_ids(params, 4))
    labels = fa.labels + fb.labels + ("0",) * 4
    return NetworkConfig(base + 4, frozenset(edges), ids, labels, fa.c)


def _square_parts(fa1, fb1, fa2, fb2):
    offs = {}
    total = 0
    for key, f in (("a1", fa1), ("b1", fb1), ("a2", fa2), ("b2", fb2)):
        offs[key] = total
        total += f.n
    return offs, total


def build_bridge_square(fa1: NetworkConfig, fb1: NetworkConfig, fa2: NetworkConfig,
                        fb2: NetworkConfig, params: GadgetParams) -> NetworkConfig:
    """Node order: Fa1, Fb1, Fa2, Fb2, then the eight bridge nodes of SQUARE_BRIDGE."""
    att = {}
    for key, f, pool, sel in (("a1", fa1, params.a, 1), ("b1", fb1, params.b, 0),
                              ("a2", fa2, params.a, 1), ("b2", fb2, params.b, 0)):
        att[key] = default_attachment(f)
        if sel:
            _check_a(f, params, att[key])
        else:
            _check_side(f, pool, 0, "Fb")
    if set(fa1.ids) & set(fa2.ids) or set(fb1.ids) & set(fb2.ids):
        raise ConfigError("glued graphs must use disjoint ids")
    offs, base = _square_parts(fa1, fb1, fa2, fb2)
    b = {name: base + i for i, name in enumerate(SQUARE_BRIDGE)}
    edges = set()
    for key, f in (("a1", fa1), ("b1", fb1), ("a2", fa2), ("b2", fb2)):
        edges |= {(u + offs[key], v + offs[key]) for u, v in f.edges}
    ring = ["y_A1", "x_A1", "y_B1", "x_B1", "y_A2", "x_A2", "y_B2", "x_B2"]
    for i, name in enumerate(ring):
        edges.add((b[name], b[ring[(i + 1) % 8]]))
    for key, name in (("a1", "y_A1"), ("b1", "y_B1"), ("a2", "y_A2"), ("b2", "y_B2")):
        edges.add((b[name], att[key] + offs[key]))
    ids = fa1.ids + fb1.ids + fa2.ids + fb2.ids + tuple(_bridge_ids(params, 8))
    labels = fa1.labels + fb1.labels + fa2.labels + fb2.labels + ("0",) * 8
    return NetworkConfig(base + 8, frozenset(edges), ids, labels, fa1.c)


# which pair (i, j) = (A-graph index, B-graph index) each square bridge node copies
SQUARE_PROVENANCE = {
    "x_A1": ((1, 1), "x_A"), "y_A1": ((1, 1), "y_A"), "y_B1": ((1, 1), "y_B"),
    "x_B1": ((2, 1), "x_B"), "y_A2": ((2, 2), "y_A"), "x_A2": ((2, 2), "x_A"),
    "y_B2": ((2, 2), "y_B"), "x_B2": ((1, 2), "x_B"),
}


def square_provenance(fa1, fb1, fa2, fb2) -> dict[int, tuple[tuple[int, int], int]]:
    """Map each square node to (pair key, node index in that pair).

    Pair (i, j) is ``build_bridge_pair(Fa_i, Fb_j)``. Graph nodes map into
    the pair that keeps their own bridge attachment.
    """
    fas = {1: fa1, 2: fa2}
    fbs = {1: fb1, 2: fb2}
    offs, base = _square_parts(fa1, fb1, fa2, fb2)
    out = {}
    for key, f, pair in (("a1", fa1, (1, 1)), ("b1", fb1, (1, 1)), ("a2", fa2, (2, 2)), ("b2", fb2, (2, 2))):
        shift = 0 if key[0] == "a" else fas[pair[0]].n
        for v in range(f.n):
            out[v + offs[key]] = (pair, v + shift)
    for k, name in enumerate(SQUARE_BRIDGE):
        pair, role = SQUARE_PROVENANCE[name]
        pair_base = fas[pair[0]].n + fbs[pair[1]].n
        out[base + k] = (pair, pair_base + PAIR_BRIDGE.index(role))
    return out


def closed_neighborhood_graph(cfg: NetworkConfig, v: int) -> nx.Graph:
    nodes = (v,) + cfg.ports[v]
    g = nx.Graph()
    for u in nodes:
        g.add_node(u, selected=cfg.labels[u] == "1", center=u == v)
    for u in nodes:
        for w in cfg.ports[u]:
            if w in g and u < w:
                g.add_edge(u, w)
    return g


def same_local_view(cfg1: NetworkConfig, v1: int, cfg2: NetworkConfig, v2: int) -> bool:
    """Closed neighborhoods isomorphic with centers and selections matched."""
    match = lambda a, b: a["selected"] == b["selected"] and a["center"] == b["center"]  # noqa: E731
    return nx.is_isomorphic(closed_neighborhood_graph(cfg1, v1), closed_neighborhood_graph(cfg2, v2),
                            node_match=match)
