"""Deterministic spanning-tree certificates (root, parent, distance)."""

from __future__ import annotations

from fractions import Fraction

from ..engine import Packet, Player, Protocol, ProtocolSpec, Randomness, Verifier
from ..field import DEFAULT_C, bits_for
from ..netconfig import LanguageId, NetworkConfig, designated_edges


def canonical_tree(cfg: NetworkConfig, edges=None) -> tuple[int, list[int], list[int]]:
    """BFS tree rooted at the lowest-id node over ``edges`` (default: all).

    Returns (root node, parent node per node, distance per node). Each
    parent is the lowest-id neighbor one level closer to the root.
    """
    root = min(range(cfg.n), key=lambda v: cfg.ids[v])
    if edges is None:
        adj = cfg.ports
    else:
        adj = [[] for _ in range(cfg.n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
    dist = [-1] * cfg.n
    dist[root] = 0
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    parent = [root] * cfg.n
    for v in range(cfg.n):
        if v != root:
            cands = [u for u in adj[v] if dist[u] == dist[v] - 1]
            parent[v] = min(cands, key=lambda u: cfg.ids[u])
    return root, parent, dist


def implicit_parent(own_id: int, root: int, dist: int, nbrs) -> int | None:
    """Check the (root, distance) part against ``nbrs`` = [(id, root, dist)].

    Returns the parent id (own id at the root) or None if inconsistent. The
    parent is the lowest-id neighbor at distance ``dist - 1``.
    """
    if any(r != root for _, r, _ in nbrs):
        return None
    if own_id == root:
        return own_id if dist == 0 else None
    if dist < 1:
        return None
    ups = [i for i, _, d in nbrs if d == dist - 1]
    return min(ups) if ups else None


class SpanningTreeVerifier(Verifier):
    def __init__(self, w_id: int, w_d: int, check_labels: bool):
        self.w_id, self.w_d = w_id, w_d
        self.check_labels = check_labels

    def message(self, view, transcript):
        root, parent, dist = transcript[0].scalars()
        return Packet((view.id, root, parent, dist), (self.w_id,) * 3 + (self.w_d,))

    def decide(self, view, transcript, inbox):
        root, parent, dist = transcript[0].scalars()
        nb = [m.scalars() for m in inbox]
        if any(m[1] != root for m in nb):
            return False
        if view.id == root:
            if dist != 0 or parent != root:
                return False
        else:
            if dist < 1 or not any(m[0] == parent and m[3] == dist - 1 for m in nb):
                return False
        if self.check_labels:
            if len(view.label) != view.degree:
                return False
            tree = {j for j, m in enumerate(nb) if m[0] == parent and view.id != root}
            tree |= {j for j, m in enumerate(nb) if m[2] == view.id and m[0] != root}
            marked = {j for j, ch in enumerate(view.label) if ch == "1"}
            if marked != tree:
                return False
        return True


class SpanningTreeProver:
    def __init__(self, w_id: int, w_d: int, check_labels: bool):
        self.w_id, self.w_d = w_id, w_d
        self.check_labels = check_labels

    def __call__(self, cfg, round_index, history):
        edges = None
        if self.check_labels:
            marked = designated_edges(cfg)
            if marked is not None and len(marked) == cfg.n - 1:
                edges = marked
        root, parent, dist = canonical_tree(cfg, edges)
        if min(dist) < 0:
            root, parent, dist = canonical_tree(cfg)
        return [Packet((cfg.ids[root], cfg.ids[parent[v]], dist[v]), (self.w_id, self.w_id, self.w_d))
                for v in range(cfg.n)]


def spanning_tree_pls(n_hint: int = 64, c: int = DEFAULT_C, check_labels: bool = False) -> Protocol:
    """One Merlin round, no coins. With ``check_labels`` the tree must be the
    edge set marked in the labels (one bit per port)."""
    w_id = bits_for(n_hint**c)
    w_d = bits_for(max(n_hint - 1, 1))
    spec = ProtocolSpec(1, Player.MERLIN, Randomness.SHARED, 3 * w_id + w_d, (), Fraction(0),
                        "spanning-tree")
    return Protocol(spec, SpanningTreeVerifier(w_id, w_d, check_labels),
                    SpanningTreeProver(w_id, w_d, check_labels),
                    language=LanguageId.SPANNING_TREE if check_labels else None,
                    params={"n_hint": n_hint, "c": c, "check_labels": check_labels})
