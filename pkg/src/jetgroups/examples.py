"""Sharp derived-length examples: the groups G^2 = N x| L and the towers G^n.

N is the abelian group of maps phi_v = exp(l_v R) with l_v = v1 x + v2 y and
R the radial field; its closed form is (x / (1 - l_v), y / (1 - l_v)).  An
element T o phi_v of G^2 is written (T, v), and conjugation
T^-1 o phi_v o T = phi_{T^t v} gives the law (T, v)(S, w) = (TS, S^t v + w).

A subgroup {(T, v) : T in H, v in V} with V an H^t-invariant subspace has
derived subgroup ([H, H], sum_T (T^t - I) V); ``verify_g2`` runs that
recursion exactly and checks it against random commutators and jet
computations.

Towers: an element of G^n is (phi, (a_3, b_3), ..., (a_n, b_n)) acting by
x_j -> a_j(x_<j) x_j + b_j(x_<j) on top of phi in G^2.  ``verify_gn`` builds
explicit nontrivial elements at every level of the derived series.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

from . import linalg
from .coeff import ZERO, as_cyc
from .diffeo import JetDiffeo, group_commutator
from .errors import MismatchError, VerificationError, WitnessDiedError
from .matgroup import (
    MatGroupDesc,
    derived_subgroup,
    enumerate_closure,
    group_L,
    normal_closure_of_commutators,
)
from .render import render_diffeo, render_series
from .series import Substitution, TruncSeries
from .vfield import JetVectorField, log_unipotent

__all__ = [
    "phi_closed_form",
    "radial_generator",
    "SemidirectElement",
    "SemidirectSubgroup",
    "semidirect_mul",
    "semidirect_inverse",
    "semidirect_commutator",
    "semidirect_derived_step",
    "delta_op",
    "delta_power_expand",
    "TowerElement",
    "tower_compose",
    "tower_invert",
    "tower_commutator",
    "verify_g2",
    "verify_gn",
]


# -- the group N ---------------------------------------------------------------

def phi_closed_form(lam, mu, K: int) -> JetDiffeo:
    """(x / (1 - (lam x + mu y)), y / (1 - (lam x + mu y))) truncated at K."""
    lam, mu = as_cyc(lam), as_cyc(mu)
    x = TruncSeries.variable(2, K, 0)
    y = TruncSeries.variable(2, K, 1)
    geo = (1 - (x.scale(lam) + y.scale(mu))).invert()
    return JetDiffeo([x * geo, y * geo], check=False)


def radial_generator(lam, mu, K: int) -> JetVectorField:
    """(lam x + mu y)(x d/dx + y d/dy)."""
    lam, mu = as_cyc(lam), as_cyc(mu)
    x = TruncSeries.variable(2, K, 0)
    y = TruncSeries.variable(2, K, 1)
    lv = x.scale(lam) + y.scale(mu)
    return JetVectorField([lv * x, lv * y])


# -- semidirect product symbolic engine --------------------------------------

def _vec(v) -> tuple:
    return tuple(as_cyc(c) for c in v)


@dataclass(frozen=True)
class SemidirectElement:
    """T o phi_v with T an invertible m x m matrix and v a length-m vector."""

    T: tuple
    v: tuple

    def __post_init__(self):
        T = linalg.matrix(self.T)
        v = _vec(self.v)
        if linalg.shape(T) != (len(v), len(v)):
            raise MismatchError("matrix and vector sizes differ")
        if linalg.det(T).is_zero():
            raise ValueError("T must be invertible")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "v", v)

    @property
    def m(self) -> int:
        return len(self.v)

    @classmethod
    def identity(cls, m: int = 2) -> "SemidirectElement":
        return cls(linalg.identity(m), (ZERO,) * m)

    def is_identity(self) -> bool:
        return self == SemidirectElement.identity(self.m)

    def flatten(self, K: int) -> JetDiffeo:
        """The jet of T o phi_v (m = 2 only)."""
        if self.m != 2:
            raise MismatchError("jet realization exists for m = 2")
        return JetDiffeo.linear(self.T, K).compose(phi_closed_form(self.v[0], self.v[1], K))


def _make(T, v) -> SemidirectElement:
    """Build from already-validated parts without re-checking invertibility."""
    e = object.__new__(SemidirectElement)
    object.__setattr__(e, "T", T)
    object.__setattr__(e, "v", v)
    return e


def semidirect_mul(g: SemidirectElement, h: SemidirectElement) -> SemidirectElement:
    """(T, v)(S, w) = (TS, S^t v + w)."""
    if g.m != h.m:
        raise MismatchError("elements act on different dimensions")
    St = linalg.transpose(h.T)
    Sv = linalg.matvec(St, g.v)
    return _make(linalg.mul(g.T, h.T), tuple(a + b for a, b in zip(Sv, h.v)))


def semidirect_inverse(g: SemidirectElement) -> SemidirectElement:
    Tinv = linalg.inverse(g.T)
    w = linalg.matvec(linalg.transpose(Tinv), g.v)
    return _make(Tinv, tuple(-c for c in w))


def semidirect_commutator(g: SemidirectElement, h: SemidirectElement) -> SemidirectElement:
    return semidirect_mul(semidirect_mul(g, h), semidirect_mul(semidirect_inverse(g), semidirect_inverse(h)))


@dataclass
class SemidirectSubgroup:
    """{(T, v) : T in H, v in V}; V is kept as a canonical echelon basis."""

    H: MatGroupDesc
    V: tuple
    m: int = 2

    def __post_init__(self):
        self.V = linalg.echelon_basis(self.V) if self.V else ()
        for b in self.V:
            if len(b) != self.m:
                raise MismatchError("basis vector of wrong length")

    @property
    def dim_V(self) -> int:
        return len(self.V)

    def order_H(self) -> int:
        return len(enumerate_closure(self.H))

    def is_trivial(self) -> bool:
        return self.order_H() == 1 and self.dim_V == 0

    def is_invariant(self) -> bool:
        """T^t V is contained in V for every generator T."""
        for T in self.H.generators:
            Tt = linalg.transpose(T)
            for b in self.V:
                if not linalg.in_span(linalg.matvec(Tt, b), self.V):
                    return False
        return True

    def contains(self, g: SemidirectElement) -> bool:
        return g.T in set(enumerate_closure(self.H)) and linalg.in_span(g.v, self.V)

    def random_element(self, rng: random.Random, coeff_range: int = 3) -> SemidirectElement:
        elems = enumerate_closure(self.H)
        T = rng.choice(elems)
        v = [ZERO] * self.m
        for b in self.V:
            c = as_cyc(rng.randint(-coeff_range, coeff_range))
            v = [a + c * x for a, x in zip(v, b)]
        return SemidirectElement(T, tuple(v))

    def summary(self) -> dict:
        return {"order_H": self.order_H(), "dim_V": self.dim_V}


def semidirect_derived_step(S: SemidirectSubgroup) -> SemidirectSubgroup:
    """(H, V) -> ([H, H], span{(T^t - I) b : T in H, b in basis V})."""
    elems = enumerate_closure(S.H)
    ident = linalg.identity(S.m)
    vecs = []
    for T in elems:
        D = linalg.sub(linalg.transpose(T), ident)
        for b in S.V:
            vecs.append(linalg.matvec(D, b))
    nonzero = [v for v in vecs if any(not c.is_zero() for c in v)]
    return SemidirectSubgroup(derived_subgroup(S.H), tuple(nonzero), S.m)


def full_space(m: int = 2) -> tuple:
    return linalg.identity(m)


# -- the difference operator ------------------------------------------------------

def delta_op(f: TruncSeries, phi0: JetDiffeo) -> TruncSeries:
    """f o phi0 - f."""
    return phi0.pullback(f) - f


def delta_power_expand(k: int) -> dict[tuple[int, int], int]:
    """Integer table c[m, l] with Delta^k(fg) = sum c[m,l] Delta^m(f) Delta^l(g).

    Built by iterating Delta(FG) = Delta F Delta G + Delta F G + F Delta G.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    table = {(0, 0): 1}
    for _ in range(k):
        nxt: dict[tuple[int, int], int] = {}
        for (m, l), c in table.items():
            for key in ((m + 1, l + 1), (m + 1, l), (m, l + 1)):
                nxt[key] = nxt.get(key, 0) + c
        table = nxt
    return table


def delta_coefficient_closed_form(k: int, m: int, l: int) -> int:
    """k! / ((k-m)! (k-l)! (m+l-k)!): the number of ways to pick which
    Delta hits f only, g only, or both."""
    if not (0 <= m <= k and 0 <= l <= k and m + l >= k):
        return 0
    return factorial(k) // (factorial(k - m) * factorial(k - l) * factorial(m + l - k))


# -- towers -------------------------------------------------------------------------

class TowerElement:
    """(phi, (a_3, b_3), ..., (a_n, b_n)) with phi a jet in two variables.

    Layer j holds series in j - 1 variables with a_j(0) != 0 and b_j(0) = 0.
    The map is x_j -> a_j(x_1..x_{j-1}) x_j + b_j(x_1..x_{j-1}).
    """

    __slots__ = ("base", "layers", "K")

    def __init__(self, base: JetDiffeo, layers: Sequence[tuple[TruncSeries, TruncSeries]] = ()):
        self.base = base
        self.K = base.K
        n0 = base.n
        out = []
        for idx, (a, b) in enumerate(layers):
            vars_ = n0 + idx
            if a.n != vars_ or b.n != vars_ or a.K != self.K or b.K != self.K:
                raise MismatchError(f"layer {n0 + idx + 1} must use {vars_} variables at order {self.K}")
            if a.constant_term().is_zero():
                raise ValueError("a_j must be a unit (a_j(0) != 0)")
            if not b.constant_term().is_zero():
                raise ValueError("b_j must vanish at 0")
            out.append((a, b))
        self.layers = tuple(out)

    @property
    def n(self) -> int:
        return self.base.n + len(self.layers)

    @classmethod
    def identity(cls, n: int, K: int, n0: int = 2) -> "TowerElement":
        layers = [(TruncSeries.one(j, K), TruncSeries.zero(j, K)) for j in range(n0, n)]
        return cls(JetDiffeo.identity(n0, K), layers)

    @classmethod
    def from_base(cls, phi: JetDiffeo, n: int) -> "TowerElement":
        K = phi.K
        layers = [(TruncSeries.one(j, K), TruncSeries.zero(j, K)) for j in range(phi.n, n)]
        return cls(phi, layers)

    @classmethod
    def chi(cls, a: TruncSeries, b: TruncSeries, n0: int = 2) -> "TowerElement":
        """Identity except the top layer, which is (a, b)."""
        n = a.n + 1
        t = cls.identity(n - 1, a.K, n0)
        return cls(t.base, t.layers + ((a, b),))

    def lift(self, n: int) -> "TowerElement":
        """Same map with identity layers appended up to n variables."""
        K = self.K
        extra = [(TruncSeries.one(j, K), TruncSeries.zero(j, K)) for j in range(self.n, n)]
        return TowerElement(self.base, self.layers + tuple(extra))

    def coordinates(self, upto: int) -> list[TruncSeries]:
        """First ``upto`` coordinate functions, as series in ``upto`` variables."""
        n0 = self.base.n
        out = [g.embed_vars(upto) for g in self.base.components[:upto]]
        for idx, (a, b) in enumerate(self.layers):
            j = n0 + idx  # 0-based variable index of this layer
            if j >= upto:
                break
            xj = TruncSeries.variable(upto, self.K, j)
            out.append(a.embed_vars(upto) * xj + b.embed_vars(upto))
        return out

    def flatten(self) -> JetDiffeo:
        return JetDiffeo(self.coordinates(self.n), check=False)

    def base_is_identity(self) -> bool:
        return self.base.is_identity()

    def is_identity(self) -> bool:
        if not self.base.is_identity():
            return False
        return all(a == 1 and b.is_zero() for a, b in self.layers)

    def is_chi(self) -> bool:
        """Only the top layer may differ from the identity."""
        return self.base.is_identity() and all(a == 1 and b.is_zero() for a, b in self.layers[:-1])

    def __eq__(self, other):
        if not isinstance(other, TowerElement):
            return NotImplemented
        return self.base == other.base and self.layers == other.layers

    def __hash__(self):
        return hash((self.base, self.layers))

    def __repr__(self):
        return f"TowerElement(n={self.n}, K={self.K}, {render_diffeo(self.flatten())!r})"

    def describe(self) -> dict:
        return {
            "base": render_diffeo(self.base),
            "layers": [{"a": render_series(a), "b": render_series(b)} for a, b in self.layers],
        }


def _check_towers(g: TowerElement, h: TowerElement) -> None:
    if g.base.n != h.base.n or g.n != h.n or g.K != h.K:
        raise MismatchError("tower elements differ in shape")


def tower_compose(g: TowerElement, h: TowerElement) -> TowerElement:
    """g o h, layer by layer: (a o H', b o H') with H' the lower coordinates of h."""
    _check_towers(g, h)
    base = g.base.compose(h.base)
    n0 = g.base.n
    layers = []
    for idx, ((a, b), (a2, b2)) in enumerate(zip(g.layers, h.layers)):
        s = Substitution(h.coordinates(n0 + idx))
        aH = s.apply(a)
        layers.append((aH * a2, aH * b2 + s.apply(b)))
    return TowerElement(base, layers)


def tower_invert(g: TowerElement) -> TowerElement:
    base = g.base.inverse()
    n0 = g.base.n
    inv = TowerElement(base)
    for idx, (a, b) in enumerate(g.layers):
        s = Substitution(inv.coordinates(n0 + idx))
        ainv = s.apply(a).invert()
        inv = TowerElement(base, inv.layers + ((ainv, -(s.apply(b) * ainv)),))
    return inv


def tower_commutator(g: TowerElement, h: TowerElement) -> TowerElement:
    """g h g^-1 h^-1."""
    return tower_compose(tower_compose(g, h), tower_compose(tower_invert(g), tower_invert(h)))


def tower_delta(f: TruncSeries, theta: TowerElement) -> TruncSeries:
    """f o theta - f for f in the first theta.n variables."""
    if f.n != theta.n:
        raise MismatchError("function and tower element differ in variable count")
    return Substitution(theta.coordinates(theta.n)).apply(f) - f


# -- reports --------------------------------------------------------------------------

def _report(claim: str, expected, computed, ok: bool, witnesses: list, **extra) -> dict:
    out = {
        "claim": claim,
        "expected": expected,
        "computed": computed,
        "status": "pass" if ok else "fail",
        "witnesses": witnesses,
    }
    out.update(extra)
    return out


def _l3_contains_minus_identity(L: MatGroupDesc) -> tuple[list[MatGroupDesc], bool]:
    from .matgroup import derived_series_finite

    chain = derived_series_finite(L)
    minus = linalg.scale(-1, linalg.identity(2))
    return chain, len(chain) > 3 and minus in set(enumerate_closure(chain[3]))


def g2_chain(linear_group: MatGroupDesc | None = None, max_steps: int = 32) -> list[SemidirectSubgroup]:
    """Derived series of G = {(T, v) : T in H, v in the plane} via the exact recursion."""
    H = linear_group or group_L()
    S = SemidirectSubgroup(H, full_space(2))
    chain = [S]
    while not chain[-1].is_trivial():
        if len(chain) > max_steps:
            raise VerificationError("semidirect recursion did not terminate")
        chain.append(semidirect_derived_step(chain[-1]))
    return chain


def check_derived_step_oracle(S: SemidirectSubgroup, samples: int = 60, seed: int = 0) -> bool:
    """Random commutators of S land in the recursion output, and their vector
    parts span its V and their matrix parts generate its H."""
    nxt = semidirect_derived_step(S)
    rng = random.Random(seed)
    Hn = set(enumerate_closure(nxt.H))
    ident = linalg.identity(S.m)
    zero = (ZERO,) * S.m
    vecs = []
    mats = set()
    for _ in range(samples):
        c = semidirect_commutator(S.random_element(rng), S.random_element(rng))
        if c.T not in Hn or not linalg.in_span(c.v, nxt.V):
            return False
        vecs.append(c.v)
        mats.add(c.T)
    # the pure commutators [(T, 0), (I, b)] make the span check exhaustive
    for T in enumerate_closure(S.H):
        for b in S.V:
            c = semidirect_commutator(SemidirectElement(T, zero), SemidirectElement(ident, b))
            vecs.append(c.v)
    span = linalg.echelon_basis([v for v in vecs if any(not x.is_zero() for x in v)])
    if span != nxt.V:
        return False
    # [H, H] again, as the normal closure of generator commutators
    closure = normal_closure_of_commutators(S.H.generators, S.H.closure_cap)
    return set(enumerate_closure(closure)) == Hn and mats <= Hn


def _log_is_radial(psi: JetDiffeo, V) -> tuple[bool, tuple]:
    """log psi == (v1 x + v2 y) R with v in span V; returns (ok, v)."""
    X = log_unipotent(psi)
    lin_x = X.components[0].coefficient((2, 0))
    lin_y = X.components[0].coefficient((1, 1))
    v = (lin_x, lin_y)
    ok = X == radial_generator(lin_x, lin_y, psi.K) and linalg.in_span(v, V)
    return ok, v


def verify_g2(K: int = 4, linear_group: MatGroupDesc | None = None, expected: int | None = None,
              jet_checks: bool = True, seed: int = 0) -> dict:
    """Derived length of G^2 = N x| L by the exact (H, V) recursion, plus jet spot checks."""
    default = linear_group is None
    chain = g2_chain(linear_group)
    length = len(chain) - 1
    shape = [S.summary() for S in chain]
    failures = []
    if default:
        expected = 5 if expected is None else expected
        if not (chain[4].order_H() == 1 and chain[4].dim_V == 2):
            failures.append("level 4 is not ({I}, plane) = N")
        _, has_minus = _l3_contains_minus_identity(chain[0].H)
        if not has_minus:
            failures.append("L^(3) does not contain -I")
    for j, S in enumerate(chain[:-1]):
        if not S.is_invariant():
            failures.append(f"V at level {j} is not H-invariant")
        if not check_derived_step_oracle(S, seed=seed + j):
            failures.append(f"random-commutator oracle disagrees at step {j}")
    witnesses = []
    if jet_checks:
        rng = random.Random(seed)
        for j in range(min(2, len(chain) - 1)):
            S, nxt = chain[j], chain[j + 1]
            gens = S.H.generators
            for T in gens[:2]:
                for b in S.V:
                    g = SemidirectElement(T, (ZERO, ZERO))
                    h = SemidirectElement(linalg.identity(2), b)
                    sym = semidirect_commutator(g, h)
                    jet = group_commutator(g.flatten(K), h.flatten(K))
                    if jet != sym.flatten(K):
                        failures.append(f"jet commutator disagrees with the semidirect law at step {j}")
                    ok, v = _log_is_radial(jet, nxt.V)
                    if not ok:
                        failures.append(f"log of a step-{j} commutator is not (l_v) R with v in V'")
            for _ in range(3):
                g, h = S.random_element(rng), S.random_element(rng)
                sym = semidirect_commutator(g, h)
                if group_commutator(g.flatten(K), h.flatten(K)) != sym.flatten(K):
                    failures.append(f"random jet commutator disagrees with the law at step {j}")
                if not nxt.contains(sym):
                    failures.append(f"random commutator escapes level {j + 1}")
        if length >= 1:
            last = chain[length - 1]
            if last.dim_V:
                b = last.V[0]
                w = SemidirectElement(linalg.identity(2), b).flatten(K)
                witnesses.append({"level": length - 1, "element": render_diffeo(w),
                                  "nontrivial": not w.is_identity()})
                if w.is_identity():
                    failures.append("top-level witness is trivial at this K")
    ok = not failures and (expected is None or length == expected)
    return _report(
        "derived length of G^2 = N x| L" if default else "derived length of N x| H",
        expected, length, ok, witnesses, chain=shape, K=K, failures=failures,
    )


# -- tower witnesses -----------------------------------------------------------------

@dataclass
class LevelChain:
    """For each derived level l, a few known nontrivial elements of G^(l)."""

    n: int
    K: int
    levels: list[list[TowerElement]] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.levels)


def g2_level_chain(K: int) -> LevelChain:
    """Elements of (G^2)^(l): -I for l <= 3 (it lies in L^(3)) and phi_v for l = 4."""
    minus = JetDiffeo.linear(((-1, 0), (0, -1)), K)
    levels = [[TowerElement(minus)] for _ in range(4)]
    levels.append([TowerElement(phi_closed_form(1, 0, K)), TowerElement(phi_closed_form(0, 1, K))])
    return LevelChain(2, K, levels)


def _seed_candidates(t: int, K: int) -> list[TruncSeries]:
    x = [TruncSeries.variable(t, K, j) for j in range(t)]
    top = x[-1]
    out = [x[0]]
    for p in range(1, t):
        out.append(x[0] * top ** p)
        out.append(top ** (p + 1))
    return out


def _find_delta_path(seed: TruncSeries, chain: LevelChain):
    """Depth-first choice of one element per level keeping Delta^l(seed) nonzero."""
    deltas: dict = {}

    def step(f, l):
        if l == chain.length:
            return []
        for idx, theta in enumerate(chain.levels[l]):
            key = (l, idx, f)
            g = deltas.get(key)
            if g is None:
                g = tower_delta(f, theta)
                deltas[key] = g
            if g.is_zero():
                continue
            rest = step(g, l + 1)
            if rest is not None:
                return [idx] + rest
        return None

    return step(seed, 0)


def extend_chain(chain: LevelChain, checks: list) -> tuple[LevelChain, dict]:
    """Build the level chain of G^(t+1) from that of G^t = H.

    Seeds chi_{1,b} and chi_{e^b,0} are pushed down the derived series by
    commutators with inverses of the chosen level elements.  Each commutator is
    computed with the tower group law and compared against the Delta shortcut.
    """
    t, K = chain.n, chain.K
    n = t + 1
    lH = chain.length
    path = seed = None
    for cand in _seed_candidates(t, K):
        path = _find_delta_path(cand, chain)
        if path is not None:
            seed = cand
            break
    if path is None:
        raise WitnessDiedError(f"every Delta chain dies at K={K}; increase K")
    b = seed
    a = seed.exp()
    chib = TowerElement.chi(TruncSeries.one(t, K), b)
    chia = TowerElement.chi(a, TruncSeries.zero(t, K))
    levels: list[list[TowerElement]] = []
    for l in range(lH):
        lifted = [e.lift(n) for e in chain.levels[l]]
        levels.append(lifted + [chib, chia])
        theta = lifted[path[l]]
        tinv = tower_invert(theta)
        new_b = tower_commutator(tinv, chib)
        new_a = tower_commutator(tinv, chia)
        low = chain.levels[l][path[l]]
        db = tower_delta(b, low)
        da = Substitution(low.coordinates(t)).apply(a) / a
        expect_b = TowerElement.chi(TruncSeries.one(t, K), db)
        expect_a = TowerElement.chi(da, TruncSeries.zero(t, K))
        checks.append({"level": l + 1, "kind": "chi_1b", "law_ok": new_b == expect_b})
        checks.append({"level": l + 1, "kind": "chi_a0", "law_ok": new_a == expect_a})
        b, a = db, da
        chib, chia = new_b, new_a
    if chib.is_identity() or chia.is_identity():
        raise WitnessDiedError(f"level-{lH} witness vanished at K={K}")
    levels.append([chib, chia])
    top = tower_commutator(chia, chib)
    if top.is_identity():
        raise WitnessDiedError(f"level-{lH + 1} commutator vanished at K={K}")
    levels.append([top])
    info = {
        "seed": render_series(seed),
        "path": path,
        "b_witness_order": chib.layers[-1][1].vanishing_order(),
        "top_witness_order": top.layers[-1][1].vanishing_order(),
        "witness_level_lH": chib,
        "witness_level_lH_a": chia,
        "witness_top": top,
    }
    return LevelChain(n, K, levels), info


def _upper_bound_checks(info: dict, n: int, K: int, seed: int = 0) -> list[str]:
    """Structural half: level-l(H) elements are chi's, chi-commutators have a == 1,
    and chi_{1,b}'s commute."""
    failures = []
    for key in ("witness_level_lH", "witness_level_lH_a", "witness_top"):
        if not info[key].is_chi():
            failures.append(f"{key} has a nontrivial base or lower layer")
    top = info["witness_top"]
    if top.layers[-1][0] != 1:
        failures.append("commutator of chi's has a != 1")
    rng = random.Random(seed)
    t = n - 1

    def rand_series(unit: bool):
        terms = {}
        for _ in range(3):
            e = [0] * t
            for _ in range(rng.randint(1, 2)):
                e[rng.randrange(t)] += 1
            terms[tuple(e)] = rng.randint(-3, 3)
        f = TruncSeries(t, K, terms)
        return f + 1 if unit else f

    for _ in range(3):
        g = TowerElement.chi(rand_series(True), rand_series(False))
        h = TowerElement.chi(rand_series(True), rand_series(False))
        c = tower_commutator(g, h)
        if not c.is_chi() or c.layers[-1][0] != 1:
            failures.append("chi commutator left the abelian normal part")
        p = TowerElement.chi(TruncSeries.one(t, K), rand_series(False))
        q = TowerElement.chi(TruncSeries.one(t, K), rand_series(False))
        if tower_compose(p, q) != tower_compose(q, p):
            failures.append("chi_{1,b} elements do not commute")
    return failures


def default_order(n: int) -> int:
    return 2 * (n - 2) + 4


def verify_gn(n: int, K: int | None = None, max_K: int = 24, adaptive: bool = True) -> dict:
    """Derived length of the tower group G^n (2 <= n <= 4): expected 2n + 1.

    Lower bound: explicit nontrivial elements at every derived level up to 2n,
    each produced by a commutator checked with the tower group law.  Upper
    bound: G^(l(H)) consists of chi's (its base lies in H^(l(H)) = {Id}) and
    the chi-part is metabelian.  On witness death K grows by 2.
    """
    if not 2 <= n <= 4:
        raise ValueError("verify_gn supports 2 <= n <= 4")
    if n == 2:
        rep = verify_g2(K or 4)
        rep["claim"] = "derived length of G^2"
        return rep
    K = K or default_order(n)
    attempts = []
    while True:
        try:
            rep = _verify_gn_at(n, K)
            rep["attempts"] = attempts + [K]
            return rep
        except WitnessDiedError as exc:
            attempts.append(K)
            if not adaptive or K + 2 > max_K:
                raise WitnessDiedError(f"{exc}; tried K in {attempts}") from exc
            K += 2


def _verify_gn_at(n: int, K: int) -> dict:
    g2 = verify_g2(min(K, 4), jet_checks=False)
    failures = list(g2["failures"])
    if g2["status"] != "pass":
        failures.append("G^2 verification failed")
    chain = g2_level_chain(K)
    law_checks: list = []
    lengths = {2: 5}
    witnesses = []
    upper = []
    for t in range(2, n):
        chain, info = extend_chain(chain, law_checks)
        lH = lengths[t]
        lengths[t + 1] = lH + 2
        upper += _upper_bound_checks(info, t + 1, K)
        if t + 1 == n:
            witnesses.append({
                "level": lH, "kind": "chi_{1,b}",
                "b": render_series(info["witness_level_lH"].layers[-1][1]),
                "order": info["b_witness_order"],
            })
            witnesses.append({
                "level": lH + 1, "kind": "[chi_{a,0}, chi_{1,b}]",
                "b": render_series(info["witness_top"].layers[-1][1]),
                "order": info["top_witness_order"],
                "nontrivial": not info["witness_top"].is_identity(),
            })
    bad_law = [c for c in law_checks if not c["law_ok"]]
    if bad_law:
        failures.append(f"{len(bad_law)} commutator(s) disagree with the Delta law")
    failures += upper
    computed = chain.length  # nontrivial levels 0 .. 2n, so G^(2n+1) = {Id}
    expected = 2 * n + 1
    ok = not failures and computed == expected
    return _report(
        f"derived length of G^{n}", expected, computed, ok, witnesses,
        K=K, lower_bound=computed, upper_bound=lengths[n], failures=failures,
        law_checks=len(law_checks),
    )

