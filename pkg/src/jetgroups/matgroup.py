"""Finite matrix groups over Q(zeta_8) and Kolchin triangularization.

Closure enumeration is breadth-first multiplication by generators; derived
subgroups are closures of all element-pair commutators.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .coeff import ONE, ZERO, as_cyc
from .errors import ClosureCapError, NoFixedVectorError

__all__ = [
    "MatGroupDesc",
    "enumerate_closure",
    "derived_series_finite",
    "derived_length",
    "kolchin_flag",
    "commutator_scaling_check",
    "is_unit_upper_triangular",
    "lower_central_length",
    "L_GENERATORS",
    "L_SCALED_GENERATORS",
    "group_L",
    "normal_closure_of_commutators",
    "derived_subgroup",
]

DEFAULT_CAP = 10000


def default_cap() -> int:
    env = os.environ.get("JETGROUPS_MAX_CLOSURE")
    return int(env) if env else DEFAULT_CAP


@dataclass
class MatGroupDesc:
    """A finitely generated matrix group, optionally with its enumerated elements."""

    m: int
    generators: tuple
    elements: tuple | None = None
    closure_cap: int = field(default_factory=default_cap)

    def __post_init__(self):
        gens = tuple(linalg.matrix(g) for g in self.generators)
        for g in gens:
            if linalg.shape(g) != (self.m, self.m):
                raise ValueError(f"generator is not {self.m}x{self.m}")
            if linalg.det(g).is_zero():
                raise ValueError("generators must be invertible")
        self.generators = gens

    def order(self) -> int:
        return len(enumerate_closure(self))

    def is_trivial(self) -> bool:
        return self.order() == 1


def enumerate_closure(g: MatGroupDesc) -> tuple:
    """All elements of <generators>, sorted canonically.  Caches on ``g``."""
    if g.elements is not None:
        return g.elements
    ident = linalg.identity(g.m)
    gens = [x for x in g.generators if x != ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = linalg.mul(a, s)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
                    if len(seen) > g.closure_cap:
                        raise ClosureCapError(
                            f"closure exceeded {g.closure_cap} elements; group infinite or too large"
                        )
        frontier = nxt
    # a finite monoid generated by invertible matrices is a group, so inverses are in
    g.elements = tuple(sorted(seen, key=linalg.sort_key))
    return g.elements


def derived_subgroup(g: MatGroupDesc) -> MatGroupDesc:
    elems = enumerate_closure(g)
    inv = {a: linalg.inverse(a) for a in elems}
    comms = set()
    for a in elems:
        for b in elems:
            comms.add(linalg.mul(linalg.mul(a, b), linalg.mul(inv[a], inv[b])))
    gens = tuple(sorted(comms, key=linalg.sort_key))
    return MatGroupDesc(g.m, gens, closure_cap=g.closure_cap)


def derived_series_finite(g: MatGroupDesc, max_depth: int = 64) -> list[MatGroupDesc]:
    """[G, G^(1), ..., G^(l)] ending at the trivial group.

    Raises ``ClosureCapError`` on enumeration blow-up and ``ValueError`` when
    the series stalls (a perfect nontrivial subgroup: not solvable).
    """
    chain = [g]
    while not chain[-1].is_trivial():
        if len(chain) > max_depth:
            raise ValueError("derived series did not terminate within the depth cap")
        nxt = derived_subgroup(chain[-1])
        if nxt.order() == chain[-1].order():
            raise ValueError(f"derived series stalls at order {nxt.order()}: group is not solvable")
        chain.append(nxt)
    return chain


def derived_length(g: MatGroupDesc) -> int:
    return len(derived_series_finite(g)) - 1


def commutator_scaling_check(A, B, lam, mu) -> bool:
    """[lam A, mu B] == [A, B]: central scalars drop out of commutators."""
    A, B = linalg.matrix(A), linalg.matrix(B)
    lam, mu = as_cyc(lam), as_cyc(mu)
    return linalg.commutator(linalg.scale(lam, A), linalg.scale(mu, B)) == linalg.commutator(A, B)


def normal_closure_of_commutators(generators: Sequence, cap: int | None = None) -> MatGroupDesc:
    """[G, G] for G = <generators>, without enumerating G.

    [G, G] is the normal closure of the generator commutators; conjugating by
    generators until nothing new appears gives it.  Only commutators and
    conjugations are formed, so central scalar factors in the generators
    never show up in the result.
    """
    gens = [linalg.matrix(x) for x in generators]
    m = len(gens[0])
    cap = cap or default_cap()
    seeds = set()
    for a in gens:
        for b in gens:
            seeds.add(linalg.commutator(a, b))
    invs = [linalg.inverse(s) for s in gens]
    sub = MatGroupDesc(m, tuple(sorted(seeds, key=linalg.sort_key)), closure_cap=cap)
    while True:
        elems = enumerate_closure(sub)
        es = set(elems)
        extra = set()
        for x in elems:
            for s, si in zip(gens, invs):
                y = linalg.mul(linalg.mul(s, x), si)
                if y not in es:
                    extra.add(y)
        if not extra:
            return sub
        sub = MatGroupDesc(m, tuple(sorted(set(sub.generators) | extra, key=linalg.sort_key)), closure_cap=cap)


# -- Kolchin -------------------------------------------------------------------

def is_unit_upper_triangular(A) -> bool:
    m = len(A)
    for i in range(m):
        for j in range(i + 1):
            want = ONE if i == j else ZERO
            if A[i][j] != want:
                return False
    return True


def _complete_basis(v, m):
    """Matrix whose first column is v, completed by standard vectors."""
    cols = [tuple(v)]
    for j in range(m):
        e = tuple(ONE if i == j else ZERO for i in range(m))
        if linalg.rank(tuple(cols) + (e,)) > len(cols):
            cols.append(e)
        if len(cols) == m:
            break
    return linalg.transpose(tuple(cols))


def _flag(nils: list, m: int):
    if m == 0:
        return ()
    if m == 1:
        if any(not N[0][0].is_zero() for N in nils):
            raise NoFixedVectorError("no common fixed vector: input is not unipotent")
        return linalg.identity(1)
    stacked = tuple(row for N in nils for row in N)
    kernel = linalg.nullspace(stacked) if stacked else [tuple(ONE if i == 0 else ZERO for i in range(m))]
    if not kernel:
        raise NoFixedVectorError("no common fixed vector: input is not a unipotent set")
    P0 = _complete_basis(kernel[0], m)
    P0inv = linalg.inverse(P0)
    blocks = []
    for N in nils:
        M = linalg.mul(linalg.mul(P0inv, N), P0)
        blocks.append(tuple(tuple(row[1:]) for row in M[1:]))
    Q = _flag(blocks, m - 1)
    D = tuple(
        tuple(ONE if (i == 0 and j == 0) else (ZERO if i == 0 or j == 0 else Q[i - 1][j - 1]) for j in range(m))
        for i in range(m)
    )
    return linalg.mul(P0, D)


def kolchin_flag(mats: Sequence) -> linalg.Matrix:
    """P with P^-1 U P unit upper triangular for every U in ``mats``.

    Finds a common fixed vector (common kernel of the U - I), splits it off and
    recurses on the quotient.  Raises ``NoFixedVectorError`` if the set is not
    simultaneously unipotent.
    """
    mats = [linalg.matrix(U) for U in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    m = len(mats[0])
    ident = linalg.identity(m)
    nils = [linalg.sub(U, ident) for U in mats]
    for N in nils:
        if not linalg.is_nilpotent(N):
            raise NoFixedVectorError("input matrix is not unipotent")
    P = _flag(nils, m)
    Pinv = linalg.inverse(P)
    for U in mats:
        if not is_unit_upper_triangular(linalg.mul(linalg.mul(Pinv, U), P)):
            raise NoFixedVectorError("input set is not simultaneously triangularizable")
    return P


def _matrix_log_unipotent(U):
    from fractions import Fraction

    m = len(U)
    N = linalg.sub(U, linalg.identity(m))
    acc = linalg.zeros(m)
    P = linalg.identity(m)
    for j in range(1, m + 1):
        P = linalg.mul(P, N)
        if linalg.is_zero(P):
            break
        acc = linalg.add(acc, linalg.scale(Fraction((-1) ** (j + 1), j), P))
    return acc


def lower_central_length(mats: Sequence) -> int:
    """Steps until the lower central series of the Lie algebra generated by the
    logs of ``mats`` reaches 0 (raises if it exceeds the dimension)."""
    mats = [linalg.matrix(U) for U in mats]
    m = len(mats[0])
    logs = [_matrix_log_unipotent(U) for U in mats]

    def flat(A):
        return tuple(c for row in A for c in row)

    def unflat(v):
        return tuple(tuple(v[i * m:(i + 1) * m]) for i in range(m))

    def lie_span(vecs):
        basis = list(linalg.echelon_basis([flat(v) for v in vecs]))
        changed = True
        while changed:
            changed = False
            mats_ = [unflat(b) for b in basis]
            for a in mats_:
                for b in mats_:
                    c = linalg.sub(linalg.mul(a, b), linalg.mul(b, a))
                    if not linalg.in_span(flat(c), basis):
                        basis = list(linalg.echelon_basis(basis + [flat(c)]))
                        changed = True
        return [unflat(b) for b in basis]

    g = lie_span(logs)
    term = g
    steps = 0
    while term:
        if steps > m:
            raise ValueError("lower central series does not reach zero: algebra not nilpotent")
        new = []
        for a in g:
            for b in term:
                new.append(linalg.sub(linalg.mul(a, b), linalg.mul(b, a)))
        term = [unflat(v) for v in linalg.echelon_basis([flat(v) for v in new])] if new else []
        steps += 1
    return steps


# -- the group L of order 48 --------------------------------------------------

def _l_generators():
    from .coeff import I, SQRT2, Z8

    half = as_cyc(1) / 2
    A = ((Z8, ZERO), (ZERO, Z8 ** 7))  # (1/sqrt2) diag(1+i, 1-i)
    B = (
        ((ONE + I) * half, (-ONE + I) * half),
        ((ONE + I) * half, (ONE - I) * half),
    )
    A_scaled = linalg.scale(SQRT2, A)  # diag(1+i, 1-i), entries in Q(i)
    return A, B, A_scaled


_A, _B, _A_SCALED = _l_generators()
L_GENERATORS = (_A, _B)
L_SCALED_GENERATORS = (_A_SCALED, _B)


def group_L() -> MatGroupDesc:
    """The binary octahedral group of order 48 in SL(2, Q(zeta_8))."""
    return MatGroupDesc(2, L_GENERATORS)
