import random

import pytest

from helpers import rand_cyc, rand_invertible, rng_for
from jetgroups import linalg
from jetgroups.coeff import I
from jetgroups.errors import ClosureCapError, NoFixedVectorError
from jetgroups.matgroup import (
    L_SCALED_GENERATORS,
    MatGroupDesc,
    commutator_scaling_check,
    derived_series_finite,
    enumerate_closure,
    group_L,
    is_unit_upper_triangular,
    kolchin_flag,
    lower_central_length,
    normal_closure_of_commutators,
)


def test_order_of_L():
    assert len(enumerate_closure(group_L())) == 48


def test_small_groups():
    assert len(enumerate_closure(MatGroupDesc(2, (linalg.identity(2),)))) == 1
    assert len(enumerate_closure(MatGroupDesc(2, (linalg.scale(-1, linalg.identity(2)),)))) == 2


def test_derived_series_of_L():
    chain = derived_series_finite(group_L())
    assert [len(enumerate_closure(H)) for H in chain] == [48, 24, 8, 2, 1]
    minus = linalg.scale(-1, linalg.identity(2))
    assert set(enumerate_closure(chain[3])) == {linalg.identity(2), minus}


def test_trivial_group_has_length_zero():
    assert len(derived_series_finite(MatGroupDesc(2, (linalg.identity(2),)))) - 1 == 0


def test_chain_is_normal_and_decreasing():
    chain = derived_series_finite(group_L())
    rng = random.Random(0)
    for big, small in zip(chain, chain[1:]):
        B, S = enumerate_closure(big), set(enumerate_closure(small))
        assert len(S) < len(B)
        for _ in range(20):
            g, h = rng.choice(B), rng.choice(tuple(S))
            assert linalg.mul(linalg.mul(g, h), linalg.inverse(g)) in S


def test_scaled_route_over_gaussian_rationals():
    A2, B = L_SCALED_GENERATORS
    assert all(c.is_gaussian() for row in A2 for c in row)
    D = normal_closure_of_commutators(L_SCALED_GENERATORS)
    elems = enumerate_closure(D)
    assert len(elems) == 24
    assert all(c.is_gaussian() for M in elems for row in M for c in row)
    assert [len(enumerate_closure(H)) for H in derived_series_finite(D)] == [24, 8, 2, 1]


def test_commutator_scaling():
    rng = rng_for(2)
    for _ in range(10):
        A, B = rand_invertible(rng, 2, rational=False), rand_invertible(rng, 2, rational=False)
        lam, mu = rand_cyc(rng) + 7, rand_cyc(rng) - 7
        assert commutator_scaling_check(A, B, lam, mu)
    A = rand_invertible(rng, 3)
    assert commutator_scaling_check(A, A, 1, 1)
    assert linalg.commutator(A, A) == linalg.identity(3)


def test_closure_cap():
    # diag(2, 1) generates an infinite group
    with pytest.raises(ClosureCapError):
        enumerate_closure(MatGroupDesc(2, (((2, 0), (0, 1)),), closure_cap=50))


def _perm(images):
    m = len(images)
    return tuple(tuple(1 if images[j] == i else 0 for j in range(m)) for i in range(m))


def test_non_solvable_group_is_reported():
    # A5 as 5x5 permutation matrices is perfect, so the derived series stalls
    G = MatGroupDesc(5, (_perm((1, 2, 3, 4, 0)), _perm((1, 2, 0, 3, 4))))
    assert G.order() == 60
    with pytest.raises(ValueError, match="not solvable"):
        derived_series_finite(G)


def test_cyclic_group_is_abelian():
    G = MatGroupDesc(2, (((0, 1), (1, 0)),))
    assert len(derived_series_finite(G)) == 2


def _random_unit_upper(rng, m):
    return tuple(
        tuple(1 if i == j else (rand_cyc(rng, rational=True) if j > i else 0) for j in range(m)) for i in range(m)
    )


@pytest.mark.parametrize("seed", range(10))
def test_kolchin_on_conjugated_sets(seed):
    rng = rng_for(seed)
    m = rng.randint(2, 5)
    Q = rand_invertible(rng, m)
    Qinv = linalg.inverse(Q)
    mats = [linalg.mul(linalg.mul(Q, linalg.matrix(_random_unit_upper(rng, m))), Qinv) for _ in range(rng.randint(1, 3))]
    P = kolchin_flag(mats)
    Pinv = linalg.inverse(P)
    for U in mats:
        assert is_unit_upper_triangular(linalg.mul(linalg.mul(Pinv, U), P))


def test_kolchin_trivial_inputs():
    assert kolchin_flag([linalg.identity(3)]) == linalg.identity(3)
    J = linalg.matrix(((1, 1, 0), (0, 1, 1), (0, 0, 1)))
    P = kolchin_flag([J])
    assert is_unit_upper_triangular(linalg.mul(linalg.mul(linalg.inverse(P), J), P))


def test_kolchin_rejects_non_unipotent():
    with pytest.raises(NoFixedVectorError):
        kolchin_flag([((1, 1), (0, 2))])
    # each unipotent, but no common flag
    with pytest.raises(NoFixedVectorError):
        kolchin_flag([((1, 1), (0, 1)), ((1, 0), (1, 1))])


def test_unipotent_groups_have_nilpotent_lie_algebras():
    rng = rng_for(5)
    m = 4
    Q = rand_invertible(rng, m)
    mats = [linalg.mul(linalg.mul(Q, linalg.matrix(_random_unit_upper(rng, m))), linalg.inverse(Q)) for _ in range(3)]
    steps = lower_central_length(mats)
    assert 1 <= steps <= m


def test_gaussian_entries_of_generator():
    B = group_L().generators[1]
    assert B[0][0] == (1 + I) / 2
