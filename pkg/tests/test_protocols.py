import itertools
from fractions import Fraction

import numpy as np
import pytest

from distproofs.engine import Packet, best_adversary_exact, evaluate, exact_acceptance, run_once, seed_block
from distproofs.fixtures import connected_graphs, port_labels, sample_ids, spanning_tree_family
from distproofs.netconfig import LanguageId, Membership, build_path, decide_membership, equality_path, graph_config
from distproofs.protocols import (amos_private, amos_shared, canonical_tree, coin_bits, degree_bound,
                                  honest_coloring, implicit_parent, spanning_tree_pls, tce_private, tce_shared)


def fp(id_, s, q):
    return sum(((id_ >> i) & 1) * pow(s, i, q) for i in range(id_.bit_length())) % q


# AMOS, shared coins

def test_amos_shared_parameters():
    p = amos_shared(8)
    assert p.params["q"] == 83
    assert p.spec.bandwidth_bits == 7
    assert p.spec.error_budget == Fraction(6, 83)
    assert p.spec.class_name == "dAM^s[2, 7]"
    with pytest.raises(ValueError):
        amos_shared(0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_amos_shared_completeness(n):
    p = amos_shared(max(n, 2))
    for g in connected_graphs(n):
        ids = sample_ids(n, 17 * n)
        for sel in [None] + list(range(n)):
            labels = ["1" if v == sel else "0" for v in range(n)]
            cfg = graph_config(n, list(g.edges()), ids, labels)
            assert exact_acceptance(cfg, p).probability == 1


def test_amos_shared_id_pairs_root_bound():
    # triangle with two selected nodes: every id pair up to 64 under q = 83
    p = amos_shared(8)
    q = 83
    s = np.arange(q)
    for a, b in itertools.combinations(range(1, 65), 2):
        cfg = graph_config(3, [(0, 1), (1, 2), (0, 2)], [a, b, 65], ["1", "1", "0"], c=4)
        value = best_adversary_exact(cfg, p).value
        roots = sum(fp(a, int(t), q) == fp(b, int(t), q) for t in s)
        assert value == Fraction(roots, q)
        assert value <= Fraction(degree_bound(a, b), q)


def test_amos_shared_malformed_label_rejects():
    p = amos_shared(3, c=3)
    cfg = build_path(2, ["0", "01"], c=3)
    assert exact_acceptance(cfg, p).probability == 0


# AMOS, private coins

def test_coin_bits():
    assert [coin_bits(Fraction(1, 2**k)) for k in range(5)] == [0, 1, 2, 3, 4]
    assert coin_bits(Fraction(1, 5)) == 3


def test_amos_private_examples():
    p = amos_private(Fraction(1, 4))
    assert p.spec.bandwidth_bits == 2 and p.spec.seed_domains == (4,)
    assert exact_acceptance(build_path(3, ["0", "1", "0"]), p).probability == 1
    two = build_path(2, ["1", "1"])
    rep = best_adversary_exact(two, p)
    assert rep.value == Fraction(1, 4) and rep.adaptive
    # by hand: Merlin sees both strings, wins exactly when they coincide
    wins = sum(r1 == r2 for r1, r2 in itertools.product(range(4), repeat=2))
    assert Fraction(wins, 16) == rep.value
    with pytest.raises(ValueError):
        amos_private(Fraction(1, 2))
    with pytest.raises(ValueError):
        amos_private(0)


# two-coloring with equal labels

def test_tce_shared_examples():
    p = tce_shared(4)
    for x in ("0000", "1011"):
        assert exact_acceptance(build_path(4, ["0000", x, "0000", x]), p).probability == 1
    q = p.params["q"]
    assert q == 257
    cfg = equality_path("0110", "0111")
    roots = sum(sum(int(b) * pow(s, i + 1, q) for i, b in enumerate("0110")) % q
                == sum(int(b) * pow(s, i + 1, q) for i, b in enumerate("0111")) % q for s in range(q))
    rep = best_adversary_exact(cfg, p)
    assert rep.value == Fraction(roots, q) <= Fraction(4, q)


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_tce_odd_cycle_rejects_everything(n):
    p = tce_shared(1)
    cfg = graph_config(n, [(i, (i + 1) % n) for i in range(n)], range(1, n + 1), ["1"] * n)
    assert decide_membership(cfg, LanguageId.TCE) is Membership.NO
    assert best_adversary_exact(cfg, p, adaptive=False).value == 0


def test_tce_shared_bipartite_no_instances():
    p = tce_shared(2)
    q = p.params["q"]
    for g in connected_graphs(4):
        for labels in itertools.product(["00", "01", "10", "11"], repeat=4):
            cfg = graph_config(4, list(g.edges()), [1, 2, 3, 4], labels)
            if decide_membership(cfg, LanguageId.TCE) is Membership.NO:
                assert best_adversary_exact(cfg, p).value <= Fraction(2, q)


def test_honest_coloring_is_proper():
    cfg = equality_path("01", "01")
    col = honest_coloring(cfg)
    assert all(col[u] != col[v] for u, v in cfg.edges)
    assert col[cfg.ids.index(1)] == 0


def rs_cells(x, y, code):
    b, k, q = code.symbol_bits, code.k, code.q

    def word(bits):
        padded = bits.ljust(k * b, "0")
        co = [int(padded[i * b:(i + 1) * b], 2) for i in range(k)]
        return [sum(c * pow(s, i, q) for i, c in enumerate(co)) % q for s in range(code.m)]

    return sum(a == c for a, c in zip(word(x), word(y)))


def middle_acceptance(cfg, p, reps):
    """Exact acceptance of the middle node alone under honest colors."""
    mid = cfg.n // 2
    certs = [[Packet((c,), (1,)) for c in honest_coloring(cfg)]]
    dom = p.spec.seed_domains[0]
    seeds = np.zeros((cfg.n, dom**3), dtype=np.int64)
    grid = np.array(list(itertools.product(range(dom), repeat=3))).T
    seeds[mid - 1:mid + 2] = grid
    ev = evaluate(cfg, p, [seeds], dom**3, certs=certs, decide_nodes=[mid])
    return Fraction(int(ev.accepts.sum()), dom**3)


def test_tce_private_middle_node_cell_count():
    p1, p2 = tce_private(4, 1), tce_private(4, 2)
    code = p1.params["code"]
    for x, y in [("0110", "0111"), ("0000", "1111"), ("1010", "1011"), ("1000", "0001")]:
        cfg = equality_path(x, y)
        a1 = middle_acceptance(cfg, p1, 1)
        assert a1 == Fraction(rs_cells(x, y, code), code.m) <= Fraction(1, 3)
        assert middle_acceptance(cfg, p2, 2) == a1 * a1


def test_tce_private_completeness_and_bandwidth():
    p = tce_private(4, 2)
    cfg = equality_path("1001", "1001")
    rng = np.random.default_rng(0)
    for _ in range(20):
        seeds = [int(v) for v in rng.integers(0, p.spec.seed_domains[0], size=cfg.n)]
        assert run_once(cfg, p, [seeds]).accepted


# spanning tree certificates

def test_spanning_tree_honest():
    for iid, cfg in spanning_tree_family(5):
        p = spanning_tree_pls(cfg.n, check_labels=True)
        expect = decide_membership(cfg, LanguageId.SPANNING_TREE) is Membership.YES
        ok = exact_acceptance(cfg, p).probability == 1
        if expect:
            assert ok, iid
        plain = spanning_tree_pls(cfg.n)
        assert exact_acceptance(cfg, plain).probability == 1


def four_cycle():
    return graph_config(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [1, 2, 3, 4], ["0"] * 4)


def test_spanning_tree_two_roots_rejected():
    cfg = four_cycle()
    p = spanning_tree_pls(4)
    honest = p.prover(cfg, 0, [])
    w = honest[0].widths
    forged = [Packet((1, 1, 0), w), Packet((1, 1, 1), w), Packet((3, 3, 0), w), Packet((3, 3, 1), w)]
    res = run_once(cfg, p, [], certs=[forged])
    assert not res.accepted
    assert honest[0].scalars() == (1, 1, 0)


def test_spanning_tree_distance_mismatch():
    cfg = four_cycle()
    p = spanning_tree_pls(4)
    certs = list(p.prover(cfg, 0, []))
    root, parent, dist = certs[1].scalars()
    certs[1] = Packet((root, parent, dist + 1), certs[1].widths)
    res = run_once(cfg, p, [], certs=[certs])
    assert not res.verdicts[1]


def test_canonical_tree_and_implicit_parent():
    cfg = four_cycle()
    root, parent, dist = canonical_tree(cfg)
    assert root == 0 and dist == [0, 1, 2, 1]
    assert parent[2] == 1  # lower id of the two candidates 1 and 3
    nbrs = [(2, 1, 1), (4, 1, 1)]
    assert implicit_parent(3, 1, 2, nbrs) == 2
    assert implicit_parent(3, 1, 1, nbrs) is None
    assert implicit_parent(1, 1, 0, nbrs) == 1
    assert implicit_parent(3, 2, 2, nbrs) is None


def test_spanning_tree_labels_must_match_tree():
    g = connected_graphs(4)[5]
    base = graph_config(4, list(g.edges()), [1, 2, 3, 4], [""] * 4)
    path_tree = base.with_labels(port_labels(base, [(0, 1), (1, 2), (2, 3)]))
    p = spanning_tree_pls(4, check_labels=True)
    assert exact_acceptance(path_tree, p).probability == 1
    star_certs = spanning_tree_pls(4, check_labels=True).prover(base.with_labels(
        port_labels(base, [(0, 1), (0, 2), (0, 3)])), 0, [])
    assert not run_once(path_tree, p, [], certs=[star_certs]).accepted


def test_bandwidth_never_exceeded():
    cases = [(amos_shared(4), build_path(4, ["0", "1", "0", "0"])),
             (amos_private(Fraction(1, 8)), build_path(3, ["1", "0", "0"])),
             (tce_shared(2), equality_path("01", "01")),
             (tce_private(4), equality_path("0101", "0101"))]
    for p, cfg in cases:
        spec = p.spec
        seeds = [np.atleast_2d(s)[:, :64] for s in seed_block(spec, cfg.n, 0, min(64, spec.seed_space_size(cfg.n)))]
        batch = seeds[0].shape[1]
        ev = evaluate(cfg, p, seeds, batch)
        assert all(m.bits <= spec.bandwidth_bits for m in ev.messages if m is not None)
