import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from distproofs.protocols import amos_private, tce_private
from distproofs.sm import (BestProof, GapCollapsed, MessageTooLong, PathRoles, ReedSolomonCode, SmInstance,
                           acceptance, amplify_majority, derandomize_ma_sym, eq_private, full_input_equality,
                           ma_sym_best_proof, ma_sym_run, monte_carlo, reduce_tce_to_eq, sm_run, table_size)
from distproofs.sm.reduction import _poisson_binomial_majority


def test_full_input_equality():
    p = full_input_equality(3)
    assert acceptance(p, "101", "101", None) == 1
    assert acceptance(p, "101", "100", None) == 0
    assert sm_run(SmInstance(p, "011", "011"), 0)


def test_code_parameters():
    code = ReedSolomonCode.for_bits(8)
    assert (code.side, code.m, code.k, code.q, code.symbol_bits) == (3, 9, 3, 11, 3)
    assert code.symbols("10110001") == [5, 4, 2]
    with pytest.raises(ValueError):
        code.symbols("1011")
    with pytest.raises(ValueError):
        ReedSolomonCode.for_bits(8, rate=1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.data())
def test_codeword_agreement_bounded_by_degree(n, data):
    code = ReedSolomonCode.for_bits(n)
    x = data.draw(st.text("01", min_size=n, max_size=n))
    y = data.draw(st.text("01", min_size=n, max_size=n))
    agree = code.agreement(x, y)
    assert agree == code.m if x == y else agree <= code.k - 1


def test_eq_private_error_is_cell_fraction():
    p = eq_private(4)
    code = p.meta["code"]
    for x, y in itertools.combinations(p.inputs(), 2):
        a = acceptance(p, x, y, 0)
        assert a == Fraction(code.agreement(x, y), code.m) <= p.error
    assert all(acceptance(p, x, x, 0) == 1 for x in p.inputs())


def test_message_length_enforced():
    p = eq_private(4)
    tiny = type(p)(**{**p.__dict__, "max_message_bits": 1})
    with pytest.raises(MessageTooLong):
        acceptance(tiny, "0000", "0000", 0)


def test_best_proof_and_vacuous():
    p = eq_private(2, proof_bits=1)
    best = ma_sym_best_proof(p, "01", "01")
    assert best == BestProof(Fraction(1), 0)
    empty = type(p)(**{**p.__dict__, "proofs": ()})
    assert ma_sym_best_proof(empty, "01", "01").vacuous
    with pytest.raises(ValueError):
        ma_sym_best_proof(p, "01", "01", cap=1)


def test_monte_carlo_close_to_exact():
    p = eq_private(6)
    exact = acceptance(p, "010101", "010100", 0)
    acc, trials = monte_carlo(p, "010101", "010100", 0, 40_000, rng_seed=2)
    assert abs(acc / trials - float(exact)) < 0.02
    assert monte_carlo(p, "010101", "010100", 0, 500, 4) == monte_carlo(p, "010101", "010100", 0, 500, 4)


def test_single_runs_are_reproducible():
    inst = SmInstance(eq_private(4), "0110", "0111")
    assert [ma_sym_run(inst, 0, s) for s in range(20)] == [ma_sym_run(inst, 0, s) for s in range(20)]
    assert not inst.answer


def test_table_size():
    assert table_size(4, Fraction(1, 10)) == 555  # ceil(200 ln 16)
    assert table_size(1, 1) == 3


def test_derandomization_exact_on_small_inputs():
    der = derandomize_ma_sym(eq_private(2), Fraction(1, 10), rng_seed=1)
    p = der.protocol
    for x, y in itertools.product(["00", "01", "10", "11"], repeat=2):
        assert der.decide_best(x, y) == (x == y)
        assert abs(der.grid_average(x, y, 0) - der.strength(x, y, 0)) <= 2 * der.delta
        assert acceptance(p, x, y, 0) == int(x == y)
    assert p.error == 0 and p.meta["t_alice"] == der.t_alice


def test_gap_collapse_rejected():
    with pytest.raises(GapCollapsed):
        derandomize_ma_sym(eq_private(2), Fraction(1, 4), rng_seed=0)
    with pytest.raises(ValueError):
        derandomize_ma_sym(eq_private(2), 0, rng_seed=0)


def test_poisson_binomial_majority():
    assert _poisson_binomial_majority([Fraction(1, 2)] * 3) == Fraction(1, 2)
    assert _poisson_binomial_majority([Fraction(1), Fraction(1), Fraction(0)]) == 1
    p = Fraction(1, 3)
    assert _poisson_binomial_majority([p] * 3) == 3 * p * p * (1 - p) + p**3


def test_amplify_majority():
    p = eq_private(2)
    a3 = amplify_majority(p, 3)
    assert a3.max_message_bits == 3 * p.max_message_bits
    for x, y in itertools.product(["00", "01", "10", "11"], repeat=2):
        e = acceptance(p, x, y, 0)
        assert acceptance(a3, x, y, 0) == 3 * e * e * (1 - e) + e**3
    with pytest.raises(ValueError):
        amplify_majority(p, 2)


def test_path_roles():
    r = PathRoles(4)
    assert list(r.alice) == [0, 1, 2, 3] and list(r.bob) == [5, 6, 7, 8]
    assert r.middle == 4 and r.boundary == (3, 4, 5)


@pytest.fixture(scope="module")
def reduced():
    return reduce_tce_to_eq(tce_private(2), 2)


def test_reduction_complete_and_sound(reduced):
    for x, y in itertools.product(["00", "01", "10", "11"], repeat=2):
        best = ma_sym_best_proof(reduced, x, y)
        if x == y:
            assert best.value == 1
            assert acceptance(reduced, x, y, reduced.honest_proof(x, y)) == 1
        else:
            assert best.value <= max(reduced.error, Fraction(1, 3))


def test_reduction_rejects_wrong_sources():
    with pytest.raises(ValueError):
        reduce_tce_to_eq(amos_private(Fraction(1, 4)), 2)
    with pytest.raises(ValueError):
        reduce_tce_to_eq(tce_private(3), 3)
