import pytest

from helpers import rand_invertible, rand_jet, rand_series, rng_for
from jetgroups import linalg
from jetgroups.diffeo import JetDiffeo, group_commutator, pullback_function
from jetgroups.errors import MismatchError
from jetgroups.examples import phi_closed_form
from jetgroups.parsing import parse_value
from jetgroups.render import render_diffeo


def D(text, n=2, K=4):
    return parse_value(text, "diffeo", n, K)


def test_radial_maps_compose_additively():
    K = 5
    assert phi_closed_form(1, 0, K).compose(phi_closed_form(0, 1, K)) == phi_closed_form(1, 1, K)


def test_identity_and_inverse():
    phi = D("(x + y^2, y - x*y + x^3)")
    ident = JetDiffeo.identity(2, 4)
    assert ident.compose(phi) == phi
    assert phi.compose(ident) == phi
    assert phi.compose(phi.inverse()) == ident
    assert phi.inverse().compose(phi) == ident


def test_invert_geometric():
    phi = D("(x/(1 - x))", 1, 5)
    assert phi.inverse() == D("(x/(1 + x))", 1, 5)
    assert JetDiffeo.identity(3, 3).inverse() == JetDiffeo.identity(3, 3)


def test_invert_linear():
    A = ((2, 1), (1, 1))
    assert JetDiffeo.linear(A, 4).inverse() == JetDiffeo.linear(linalg.inverse(linalg.matrix(A)), 4)


def test_commutator_with_linear_map():
    # [T^-1, phi_v] = phi_w with w = (T^t - I) v
    K = 5
    T = linalg.matrix(((0, -1), (1, 1)))
    Tinv = JetDiffeo.linear(linalg.inverse(T), K)
    v = (3, -2)
    w = linalg.matvec(linalg.sub(linalg.transpose(T), linalg.identity(2)), v)
    assert group_commutator(Tinv, phi_closed_form(*v, K)) == phi_closed_form(*w, K)


def test_trivial_commutators():
    phi = D("(x + y^2, y + x^2)")
    ident = JetDiffeo.identity(2, 4)
    assert group_commutator(phi, phi).is_identity()
    assert group_commutator(ident, phi).is_identity()


def test_linear_part_and_unipotence():
    assert D("(x + x^2, y)").linear_part() == linalg.identity(2)
    assert phi_closed_form(2, 5, 4).linear_part() == linalg.identity(2)
    assert JetDiffeo.identity(2, 3).is_unipotent()
    assert not JetDiffeo.linear(((2, 0), (0, 1)), 3).is_unipotent()
    assert phi_closed_form(1, -1, 4).is_unipotent()


def test_pullback_examples():
    x = parse_value("x", "series", 1, 5)
    assert pullback_function(x, JetDiffeo.identity(1, 5)) == x
    assert pullback_function(x, D("(x/(1 - x))", 1, 5)) == parse_value("x + x^2 + x^3 + x^4 + x^5", "series", 1, 5)


def test_validation():
    with pytest.raises(ValueError):
        D("(1 + x, y)")
    with pytest.raises(ValueError):
        D("(x + y, 2*x + 2*y)")
    with pytest.raises(MismatchError):
        D("(x, y)", 2, 3).compose(D("(x, y)", 2, 4))


@pytest.mark.parametrize("seed", range(30))
def test_group_axioms(seed):
    rng = rng_for(seed)
    n, K = rng.randint(1, 3), rng.randint(1, 5)
    f, g, h = (rand_jet(rng, n, K, rational=rng.random() < 0.5) for _ in range(3))
    assert f.compose(g).compose(h) == f.compose(g.compose(h))
    ident = JetDiffeo.identity(n, K)
    assert f.compose(f.inverse()) == ident and f.inverse().compose(f) == ident


@pytest.mark.parametrize("seed", range(20))
def test_truncation_commutes_with_composition(seed):
    rng = rng_for(100 + seed)
    n, K = rng.randint(1, 3), rng.randint(2, 5)
    k = rng.randint(1, K - 1)
    f, g = rand_jet(rng, n, K), rand_jet(rng, n, K)
    assert f.compose(g).truncate(k).with_order(k) == f.truncate(k).with_order(k).compose(g.truncate(k).with_order(k))


@pytest.mark.parametrize("seed", range(20))
def test_unipotence_is_conjugation_invariant(seed):
    rng = rng_for(200 + seed)
    n, K = rng.randint(1, 3), rng.randint(1, 4)
    phi = rand_jet(rng, n, K, unipotent=rng.random() < 0.5)
    psi = rand_jet(rng, n, K)
    assert psi.compose(phi).compose(psi.inverse()).is_unipotent() == phi.is_unipotent()


@pytest.mark.parametrize("seed", range(20))
def test_pullback_is_multiplicative(seed):
    rng = rng_for(300 + seed)
    n, K = rng.randint(1, 3), rng.randint(1, 5)
    phi = rand_jet(rng, n, K)
    f, g = rand_series(rng, n, K), rand_series(rng, n, K)
    assert pullback_function(f * g, phi) == pullback_function(f, phi) * pullback_function(g, phi)
    # f o (phi o psi) == (f o phi) o psi
    psi = rand_jet(rng, n, K)
    assert pullback_function(f, phi.compose(psi)) == pullback_function(pullback_function(f, phi), psi)


def test_json_and_text_round_trip():
    rng = rng_for(9)
    for _ in range(60):
        n, K = rng.randint(1, 3), rng.randint(1, 4)
        phi = rand_jet(rng, n, K, rational=False)
        assert JetDiffeo.from_json(phi.to_json()) == phi
        assert parse_value(render_diffeo(phi), "diffeo", n, K) == phi


def test_linear_jet_of_random_matrix():
    rng = rng_for(3)
    A = rand_invertible(rng, 3, rational=False)
    assert JetDiffeo.linear(A, 2).linear_part() == A
