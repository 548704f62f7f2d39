import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import rand_jet, rand_series, rng_for
from jetgroups import linalg
from jetgroups.coeff import ZERO
from jetgroups.diffeo import JetDiffeo, group_commutator
from jetgroups.errors import MismatchError
from jetgroups.examples import (
    SemidirectElement,
    SemidirectSubgroup,
    TowerElement,
    delta_coefficient_closed_form,
    delta_op,
    delta_power_expand,
    full_space,
    g2_chain,
    phi_closed_form,
    semidirect_commutator,
    semidirect_derived_step,
    semidirect_inverse,
    semidirect_mul,
    tower_commutator,
    tower_compose,
    tower_delta,
    tower_invert,
    verify_g2,
    verify_gn,
)
from jetgroups.matgroup import MatGroupDesc, group_L
from jetgroups.parsing import parse_value
from jetgroups.series import TruncSeries


def test_phi_closed_form_examples():
    assert phi_closed_form(0, 0, 4) == JetDiffeo.identity(2, 4)
    assert phi_closed_form(1, 0, 3) == parse_value("(x + x^2 + x^3, y + x*y + x^2*y)", "diffeo", 2, 3)


def test_semidirect_law_matches_jets():
    K = 4
    rng = rng_for(0)
    S = SemidirectSubgroup(group_L(), full_space(2))
    for _ in range(10):
        g, h = S.random_element(rng), S.random_element(rng)
        assert semidirect_mul(g, h).flatten(K) == g.flatten(K).compose(h.flatten(K))
        assert semidirect_inverse(g).flatten(K) == g.flatten(K).inverse()
        assert semidirect_commutator(g, h).flatten(K) == group_commutator(g.flatten(K), h.flatten(K))


def test_semidirect_group_axioms():
    rng = rng_for(1)
    S = SemidirectSubgroup(group_L(), full_space(2))
    e = SemidirectElement.identity()
    for _ in range(20):
        f, g, h = (S.random_element(rng) for _ in range(3))
        assert semidirect_mul(semidirect_mul(f, g), h) == semidirect_mul(f, semidirect_mul(g, h))
        assert semidirect_mul(f, semidirect_inverse(f)).is_identity()
        assert semidirect_mul(e, f) == f


def test_semidirect_validation():
    with pytest.raises(MismatchError):
        SemidirectElement(linalg.identity(2), (1, 2, 3))
    with pytest.raises(ValueError):
        SemidirectElement(((1, 1), (1, 1)), (0, 0))


def test_g2_chain_shape():
    chain = g2_chain()
    assert [S.summary() for S in chain] == [
        {"order_H": 48, "dim_V": 2},
        {"order_H": 24, "dim_V": 2},
        {"order_H": 8, "dim_V": 2},
        {"order_H": 2, "dim_V": 2},
        {"order_H": 1, "dim_V": 2},
        {"order_H": 1, "dim_V": 0},
    ]
    assert all(S.is_invariant() for S in chain)


def test_derived_step_matches_random_commutators():
    rng = rng_for(2)
    for S in g2_chain()[:-1]:
        nxt = semidirect_derived_step(S)
        for _ in range(30):
            assert nxt.contains(semidirect_commutator(S.random_element(rng), S.random_element(rng)))


def test_verify_g2_default():
    rep = verify_g2()
    assert rep["status"] == "pass" and rep["computed"] == 5 and rep["expected"] == 5
    assert rep["witnesses"] and rep["witnesses"][0]["nontrivial"]


def test_verify_g2_small_linear_groups():
    trivial = MatGroupDesc(2, (linalg.identity(2),))
    assert verify_g2(linear_group=trivial, expected=1)["computed"] == 1
    minus = MatGroupDesc(2, (linalg.scale(-1, linalg.identity(2)),))
    rep = verify_g2(linear_group=minus, expected=2)
    assert rep["computed"] == 2 and rep["status"] == "pass"


def test_verify_g2_reports_wrong_expectation():
    trivial = MatGroupDesc(2, (linalg.identity(2),))
    assert verify_g2(linear_group=trivial, expected=3)["status"] == "fail"


# -- the difference operator ------------------------------------------------------

def test_delta_table_small():
    assert delta_power_expand(1) == {(1, 1): 1, (1, 0): 1, (0, 1): 1}
    t2 = delta_power_expand(2)
    assert t2[(2, 2)] == 1 and t2[(1, 1)] == 2 and t2[(2, 1)] == 2 and t2[(1, 2)] == 2
    assert t2[(2, 0)] == 1 and t2[(0, 2)] == 1
    assert sum(t2.values()) == 9
    with pytest.raises(ValueError):
        delta_power_expand(0)


@given(st.integers(1, 9))
@settings(max_examples=30, deadline=None)
def test_delta_table_matches_closed_form(k):
    table = delta_power_expand(k)
    for m in range(k + 1):
        for l in range(k + 1):
            assert table.get((m, l), 0) == delta_coefficient_closed_form(k, m, l)
    assert table[(k, k)] == comb(k, 0) and delta_coefficient_closed_form(2 * k, k, k) == comb(2 * k, k)
    assert sum(table.values()) == 3 ** k


@pytest.mark.parametrize("seed", range(8))
def test_delta_leibniz_expansion(seed):
    rng = rng_for(seed)
    K = 5
    phi0 = rand_jet(rng, 2, K)
    f, g = rand_series(rng, 2, K), rand_series(rng, 2, K)
    k = rng.randint(1, 3)

    def dpow(h, j):
        for _ in range(j):
            h = delta_op(h, phi0)
        return h

    lhs = dpow(f * g, k)
    rhs = TruncSeries.zero(2, K)
    for (m, l), c in delta_power_expand(k).items():
        rhs = rhs + (dpow(f, m) * dpow(g, l)).scale(c)
    assert lhs == rhs


def test_delta_of_radial_map():
    # x o phi_(1,0) - x = x^2 + x^3 + ...
    K = 4
    x = TruncSeries.variable(2, K, 0)
    assert delta_op(x, phi_closed_form(1, 0, K)) == parse_value("x^2 + x^3 + x^4", "series", 2, K)


# -- towers ------------------------------------------------------------------------

def _rand_tower(rng, n, K):
    base = rand_jet(rng, 2, K)
    layers = []
    for j in range(2, n):
        a = TruncSeries.constant(j, K, rng.randint(1, 3)) + rand_series(rng, j, K, min_deg=1, terms=2)
        layers.append((a, rand_series(rng, j, K, min_deg=1, terms=2)))
    return TowerElement(base, layers)


@pytest.mark.parametrize("seed", range(10))
def test_tower_law_matches_flattened_jets(seed):
    rng = rng_for(seed)
    n, K = rng.randint(3, 4), rng.randint(2, 4)
    g, h = _rand_tower(rng, n, K), _rand_tower(rng, n, K)
    assert tower_compose(g, h).flatten() == g.flatten().compose(h.flatten())
    assert tower_invert(g).flatten() == g.flatten().inverse()
    assert tower_commutator(g, h).flatten() == group_commutator(g.flatten(), h.flatten())


@pytest.mark.parametrize("seed", range(6))
def test_tower_group_axioms(seed):
    rng = rng_for(20 + seed)
    n, K = 3, 3
    f, g, h = (_rand_tower(rng, n, K) for _ in range(3))
    assert tower_compose(tower_compose(f, g), h) == tower_compose(f, tower_compose(g, h))
    assert tower_compose(f, tower_invert(f)).is_identity()
    assert tower_compose(TowerElement.identity(n, K), f) == f


@pytest.mark.parametrize("seed", range(6))
def test_commutator_with_chi_is_a_difference(seed):
    # [theta^-1, chi_{1,b}] = chi_{1, b o theta - b}
    rng = rng_for(40 + seed)
    K = 4
    theta = _rand_tower(rng, 3, K)
    b = rand_series(rng, 3, K, min_deg=1, terms=3)
    chi = TowerElement.chi(TruncSeries.one(3, K), b)
    lifted = theta.lift(4)
    got = tower_commutator(tower_invert(lifted), chi)
    assert got == TowerElement.chi(TruncSeries.one(3, K), tower_delta(b, theta))
    assert got.is_chi()


def test_chi_elements_commute_when_a_is_one():
    K = 4
    rng = rng_for(7)
    one = TruncSeries.one(3, K)
    g = TowerElement.chi(one, rand_series(rng, 3, K, min_deg=1))
    h = TowerElement.chi(one, rand_series(rng, 3, K, min_deg=1))
    assert tower_commutator(g, h).is_identity()


def test_tower_validation():
    K = 3
    with pytest.raises(ValueError):
        TowerElement.chi(TruncSeries.zero(2, K), TruncSeries.zero(2, K))
    with pytest.raises(ValueError):
        TowerElement.chi(TruncSeries.one(2, K), TruncSeries.one(2, K))
    with pytest.raises(MismatchError):
        TowerElement(JetDiffeo.identity(2, K), [(TruncSeries.one(3, K), TruncSeries.zero(3, K))])


def test_verify_gn_three():
    rep = verify_gn(3)
    assert rep["status"] == "pass"
    assert rep["computed"] == rep["expected"] == 7
    assert rep["upper_bound"] == 7 and rep["lower_bound"] == 7
    assert rep["failures"] == []
    assert all(w.get("nontrivial", True) for w in rep["witnesses"])


def test_verify_gn_two_defers_to_g2():
    rep = verify_gn(2)
    assert rep["computed"] == 5 and rep["status"] == "pass"


def test_verify_gn_range():
    with pytest.raises(ValueError):
        verify_gn(5)
    with pytest.raises(ValueError):
        verify_gn(1)


def test_random_semidirect_elements_lie_in_group():
    rng = random.Random(3)
    S = SemidirectSubgroup(group_L(), full_space(2))
    for _ in range(10):
        assert S.contains(S.random_element(rng))
    assert not SemidirectSubgroup(MatGroupDesc(2, (linalg.identity(2),)), ()).contains(
        SemidirectElement(linalg.identity(2), (Fraction(1), ZERO))
    )
