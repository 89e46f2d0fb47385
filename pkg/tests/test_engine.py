from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from distproofs.engine import (DEFAULT_CAP, BandwidthError, CapExceeded, CertificateSpace, Packet, Player,
                               Protocol, ProtocolSpec, Randomness, Verifier, _branch_and_bound,
                               acceptance_matrix, best_adversary_exact, best_adversary_search, evaluate,
                               exact_acceptance, hoeffding_halfwidth, monte_carlo_acceptance, run_once,
                               seed_block)
from distproofs.netconfig import build_path, graph_config
from distproofs.protocols import amos_private, amos_shared, tce_shared


def triangle(ids, labels, c=3):
    return graph_config(3, [(0, 1), (1, 2), (0, 2)], ids, labels, c)


@pytest.fixture(scope="module")
def q11():
    p = amos_shared(3, c=3)
    assert p.params["q"] == 11
    return p


NO_56 = triangle([5, 6, 7], ["1", "1", "0"])


def test_spec_schedule_and_sizes():
    spec = ProtocolSpec(3, Player.ARTHUR, Randomness.PRIVATE, 4, (4, 16))
    assert spec.schedule == (Player.ARTHUR, Player.MERLIN, Player.ARTHUR)
    assert spec.seed_tuple_count == 64 and spec.seed_space_size(3) == 64**3
    assert spec.class_name == "dAMA^p[3, 4]"
    assert ProtocolSpec(2, Player.MERLIN, Randomness.SHARED, 4, (16,)).seed_space_size(9) == 16


@pytest.mark.parametrize("kwargs", [
    dict(rounds=0, last_player=Player.MERLIN, randomness=Randomness.SHARED, bandwidth_bits=1),
    dict(rounds=2, last_player=Player.MERLIN, randomness=Randomness.SHARED, bandwidth_bits=1),
    dict(rounds=2, last_player=Player.MERLIN, randomness=Randomness.SHARED, bandwidth_bits=1, seed_domains=(3,)),
    dict(rounds=1, last_player=Player.MERLIN, randomness=Randomness.SHARED, bandwidth_bits=1,
         error_budget=Fraction(1, 2)),
])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        ProtocolSpec(**kwargs)


def test_yes_path_accepts(q11):
    cfg = build_path(4, ["0"] * 4, c=3)
    assert exact_acceptance(cfg, q11).probability == 1
    assert exact_acceptance(build_path(4, ["0", "0", "1", "0"], c=3), q11).probability == 1


def test_run_once_honest_and_flipped(q11):
    cfg = build_path(4, ["0", "1", "0", "0"], c=3)
    for s in range(11):
        assert run_once(cfg, q11, [s]).accepted
    honest = q11.prover(cfg, 0, [np.full((4, 1), 3)])
    flipped = list(honest)
    val = int(np.asarray(honest[2][0]).ravel()[0])
    flipped[2] = Packet((val ^ 1,), honest[2].widths)
    res = run_once(cfg, q11, [3], certs=[flipped])
    assert not res.accepted
    assert res.verdicts.count(False) >= 1


def test_run_once_replay_is_pure(q11):
    cfg = build_path(4, ["0", "1", "0", "0"], c=3)
    a, b = run_once(cfg, q11, [7]), run_once(cfg, q11, [7])
    assert a == b
    assert a.transcript[0][0] == 7


def test_run_once_seed_checks(q11):
    cfg = build_path(2, ["0", "0"], c=3)
    with pytest.raises(ValueError):
        run_once(cfg, q11, [11])
    with pytest.raises(ValueError):
        run_once(cfg, q11, [[1, 2]])
    with pytest.raises(ValueError):
        run_once(cfg, q11, [])
    assert run_once(cfg, q11, [[4, 4]]).accepted


class Chatty(Verifier):
    def message(self, view, transcript):
        return Packet((0, 0), (1, 1))

    def decide(self, view, transcript, inbox):
        return True


def test_bandwidth_violations():
    spec = ProtocolSpec(1, Player.MERLIN, Randomness.SHARED, 1)
    cfg = build_path(2, ["", ""])
    ok_cert = [[Packet((0,), (1,))] * 2]
    with pytest.raises(BandwidthError):
        exact_acceptance(cfg, Protocol(spec, Chatty(), None), certs=ok_cert)
    p = amos_private(Fraction(1, 4))
    with pytest.raises(BandwidthError):
        exact_acceptance(build_path(2, ["0", "0"]), p, certs=[[Packet((4,), (2,))] * 2])
    with pytest.raises(BandwidthError):
        exact_acceptance(build_path(2, ["0", "0"]), p, certs=[[Packet((0,), (3,))] * 2])


def test_best_adversary_ids_5_6(q11):
    rep = best_adversary_exact(NO_56, q11)
    assert rep.value == Fraction(1, 11)
    assert rep.adaptive
    # the single colliding point is s = 1: 1 + s^2 = s + s^2
    assert list(np.flatnonzero(rep.won)) == [1]


def test_full_and_reduced_spaces_agree(q11):
    full = best_adversary_exact(NO_56, q11, space=q11.certificate_space(NO_56))
    assert full.value == Fraction(1, 11)


def test_private_seed_space_enumerated():
    p = amos_private(Fraction(1, 4))
    cfg = build_path(2, ["1", "1"])
    rep = exact_acceptance(cfg, p, keep_verdicts=True)
    assert rep.total == 16 and rep.verdicts.shape == (2, 16)
    seeds = seed_block(p.spec, 2, 0, 16)
    pairs = {(int(a), int(b)) for a, b in zip(seeds[0][0], seeds[0][1])}
    assert len(pairs) == 16
    assert best_adversary_exact(cfg, p).value == Fraction(1, 4)


def test_cap_exceeded():
    p = amos_private(Fraction(1, 4))
    cfg = build_path(3, ["0"] * 3)
    with pytest.raises(CapExceeded):
        exact_acceptance(cfg, p, cap=63)
    assert exact_acceptance(cfg, p, cap=64).probability == 1


def test_empty_certificate_space(q11):
    empty = CertificateSpace(((), (), ()))
    with pytest.raises(ValueError):
        best_adversary_exact(NO_56, q11, space=empty)


def test_monte_carlo_matches_exact(q11):
    # the honest prover fingerprints id 5, which collides with id 6 only at s = 1
    rep = monte_carlo_acceptance(NO_56, q11, 100_000, rng_seed=5)
    assert abs(rep.estimate - 1 / 11) <= rep.halfwidth
    assert rep.halfwidth == pytest.approx(hoeffding_halfwidth(100_000))


def test_monte_carlo_edge_cases(q11):
    cfg = build_path(2, ["1", "1"], c=3)
    one = monte_carlo_acceptance(cfg, q11, 1, rng_seed=0)
    assert one.estimate in (0.0, 1.0)
    a = monte_carlo_acceptance(cfg, q11, 500, rng_seed=9)
    b = monte_carlo_acceptance(cfg, q11, 500, rng_seed=9)
    assert a == b
    with pytest.raises(ValueError):
        monte_carlo_acceptance(cfg, q11, 0, rng_seed=0)


def test_monte_carlo_repeatable_across_blocks(q11):
    cfg = build_path(2, ["1", "1"], c=3)
    a = monte_carlo_acceptance(cfg, q11, 3000, rng_seed=4, block=1000)
    b = monte_carlo_acceptance(cfg, q11, 3000, rng_seed=4, block=1000)
    assert a.accepted == b.accepted
    whole = monte_carlo_acceptance(cfg, q11, 3000, rng_seed=4)
    assert abs(whole.estimate - a.estimate) <= whole.halfwidth + a.halfwidth


def test_tce_shared_dma_is_not_adaptive():
    p = tce_shared(2)
    cfg = build_path(5, ["00", "01", "00", "10", "00"])
    rep = best_adversary_exact(cfg, p)
    assert not rep.adaptive
    assert len(rep.witness) == cfg.n


def test_search_reaches_exact_and_never_exceeds(q11):
    exact = best_adversary_exact(NO_56, q11)
    found = best_adversary_search(NO_56, q11, budget=200, rng_seed=3)
    assert found.exact and found.value <= exact.value
    p = amos_private(Fraction(1, 4))
    cfg = build_path(3, ["1", "0", "1"])
    fixed = best_adversary_exact(cfg, p, adaptive=False)
    s = best_adversary_search(cfg, p, budget=500, rng_seed=1)
    # search covers fixed assignments only, so it trails the adaptive 1/4
    assert s.value == fixed.value == Fraction(1, 16)
    assert best_adversary_exact(cfg, p).value == Fraction(1, 4)


def test_search_deterministic_and_budget_one(q11):
    a = best_adversary_search(NO_56, q11, budget=1, rng_seed=8)
    b = best_adversary_search(NO_56, q11, budget=1, rng_seed=8)
    assert a == b and a.evaluations == 1
    with pytest.raises(ValueError):
        best_adversary_search(NO_56, q11, budget=0, rng_seed=8)


def test_acceptance_matrix_rows_match_single_runs():
    p = amos_private(Fraction(1, 4))
    cfg = build_path(2, ["1", "0"])
    space = p.certificate_space(cfg)
    seeds = seed_block(p.spec, 2, 0, 16)
    mat = acceptance_matrix(cfg, p, list(seeds), 16, space)
    assert mat.shape == (16, 16)
    for idx in range(space.size):
        ev = evaluate(cfg, p, list(seeds), 16, certs=[space.certificates(space.assignment(idx))])
        assert np.array_equal(mat[idx], ev.accepts)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20))
def test_branch_and_bound_equals_enumeration(a, b):
    if a == b:
        return
    p = amos_shared(3, c=3)
    cfg = triangle([a, b, 21], ["1", "1", "0"])
    space = p.certificate_space(cfg)
    for adaptive in (False, True):
        e = best_adversary_exact(cfg, p, space=space, adaptive=adaptive)
        bb = _branch_and_bound(cfg, p, space, 11, adaptive, DEFAULT_CAP)
        assert e.method == "enumeration" and bb.method == "branch-and-bound"
        assert e.value == bb.value
    assert e.value <= Fraction(max(a, b).bit_length() - 1, 11)
