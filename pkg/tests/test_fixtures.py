import networkx as nx
import pytest

from distproofs.fixtures import (CONNECTED_COUNTS, amos_family, amos_small_family, connected_graphs,
                                 equality_paths, extend_by_vertex, sample_ids, spanning_tree_family)
from distproofs.netconfig import LanguageId, Membership, decide_membership


@pytest.mark.parametrize("n", range(1, 9))
def test_catalogue_counts(n):
    graphs = connected_graphs(n)
    assert len(graphs) == CONNECTED_COUNTS[n - 1]
    assert all(g.number_of_nodes() == n and nx.is_connected(g) for g in graphs[:200])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_extension_reproduces_catalogue(n):
    grown = extend_by_vertex(list(connected_graphs(n - 1)))
    assert len(grown) == CONNECTED_COUNTS[n - 1]


def test_sample_ids():
    ids = sample_ids(5, 42)
    assert len(set(ids)) == 5 and all(1 <= i <= 25 for i in ids)
    assert ids == sample_ids(5, 42)


def test_amos_family_shape():
    items = list(amos_family(4))
    sizes = sum(CONNECTED_COUNTS[n - 1] * (1 + n + n * (n - 1) // 2) for n in range(1, 5))
    assert len(items) == sizes and len({iid for iid, _ in items}) == sizes
    for iid, cfg in items:
        yes = decide_membership(cfg, LanguageId.AMOS) is Membership.YES
        assert yes == (cfg.labels.count("1") <= 1), iid


def test_amos_small_family_size():
    # 84 id triples, 4 connected labeled graphs, 8 labelings
    assert len(amos_small_family()) == 84 * 4 * 8


def test_equality_paths():
    items = list(equality_paths(2))
    assert len(items) == 16
    x, y, cfg = items[1]
    assert (x, y, cfg.n) == ("00", "01", 5)


def test_spanning_tree_family_membership():
    seen = 0
    for iid, cfg in spanning_tree_family(5):
        expect = Membership.YES if iid.endswith("tree") else Membership.NO
        assert decide_membership(cfg, LanguageId.SPANNING_TREE) is expect, iid
        seen += 1
    assert seen == 2 * sum(CONNECTED_COUNTS[1:5])
