"""Matrix representation of jets on m / m^(K+1).

A diffeomorphism acts by pullback, g -> g o phi, and a vector field acts as
the derivation g -> X(g).  The basis is the graded-lex list of monomials of
degree 1..K (constant term excluded).  Pullback reverses composition order:
``represent_diffeo(phi o psi) == represent_diffeo(psi) @ represent_diffeo(phi)``.

Heavy users (the logarithm of a jet) never build the d x d matrix; they apply
the operator to single vectors through the substitution memo of the jet.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from . import linalg
from .coeff import CycRational
from .diffeo import JetDiffeo
from .errors import NonNilpotentError, NonUnipotentError
from .series import TruncSeries, basis_size, monomials

__all__ = [
    "JetOperator",
    "represent_diffeo",
    "represent_field",
    "check_dk_membership",
    "operator_log_unipotent",
    "operator_exp_nilpotent",
    "series_to_vector",
    "vector_to_series",
]


def jet_basis(n: int, K: int) -> tuple[tuple[int, ...], ...]:
    return monomials(n, K, 1)


def series_to_vector(f: TruncSeries) -> tuple:
    """Coordinates of f in m/m^(K+1); the constant term must vanish."""
    if not f.constant_term().is_zero():
        raise ValueError("elements of m/m^(K+1) have zero constant term")
    return tuple(f.coefficient(e) for e in jet_basis(f.n, f.K))


def vector_to_series(v, n: int, K: int) -> TruncSeries:
    return TruncSeries(n, K, dict(zip(jet_basis(n, K), v)))


class JetOperator:
    """A d x d matrix over Q(zeta_8) acting on m/m^(K+1), d = C(n+K, n) - 1.

    Column ``c`` is the image of the c-th basis monomial.
    """

    __slots__ = ("n", "K", "matrix")

    def __init__(self, n: int, K: int, matrix):
        d = basis_size(n, K)
        if linalg.shape(matrix) != (d, d):
            raise ValueError(f"operator on m/m^{K + 1} in {n} variables must be {d}x{d}")
        self.n = n
        self.K = K
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def basis(self):
        return jet_basis(self.n, self.K)

    def __matmul__(self, other: "JetOperator") -> "JetOperator":
        return JetOperator(self.n, self.K, linalg.mul(self.matrix, other.matrix))

    def __eq__(self, other):
        if not isinstance(other, JetOperator):
            return NotImplemented
        return (self.n, self.K, self.matrix) == (other.n, other.K, other.matrix)

    def __hash__(self):
        return hash((self.n, self.K, self.matrix))

    def apply(self, f: TruncSeries) -> TruncSeries:
        return vector_to_series(linalg.matvec(self.matrix, series_to_vector(f)), self.n, self.K)

    def column(self, exp) -> TruncSeries:
        c = self.basis.index(tuple(exp))
        return vector_to_series([row[c] for row in self.matrix], self.n, self.K)

    def is_unipotent(self) -> bool:
        return linalg.is_unipotent(self.matrix)

    def is_nilpotent(self) -> bool:
        return linalg.is_nilpotent(self.matrix)

    def identity_like(self) -> "JetOperator":
        return JetOperator(self.n, self.K, linalg.identity(self.dim))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "basis": [list(e) for e in self.basis],
            "matrix": [[c.to_json() for c in row] for row in self.matrix],
        }


def _from_columns(n: int, K: int, columns: list[TruncSeries]) -> JetOperator:
    basis = jet_basis(n, K)
    cols = [[col.coefficient(e) for e in basis] for col in columns]
    return JetOperator(n, K, linalg.transpose(tuple(tuple(c) for c in cols)))


def represent_diffeo(phi: JetDiffeo) -> JetOperator:
    """phi_K: the column for monomial m is m o phi."""
    n, K = phi.n, phi.K
    s = phi.substitution()
    cols = [s.apply(TruncSeries.monomial(n, K, e)) for e in jet_basis(n, K)]
    return _from_columns(n, K, cols)


def represent_field(X) -> JetOperator:
    """The derivation g -> X(g) on m/m^(K+1)."""
    n, K = X.n, X.K
    cols = [X.apply(TruncSeries.monomial(n, K, e)) for e in jet_basis(n, K)]
    return _from_columns(n, K, cols)


def check_dk_membership(A: JetOperator, witness: bool = False):
    """Is A the pullback operator of some jet, i.e. an invertible algebra map?

    Multiplicativity on all products of m/m^(K+1) is equivalent to the image of
    every monomial being the matching product of images of the coordinates,
    which is what is checked.  With ``witness=True`` returns ``(ok, exp)`` with
    the first offending monomial (or None).
    """
    n, K = A.n, A.K
    basis = jet_basis(n, K)
    imgs = {}
    for c, e in enumerate(basis):
        imgs[e] = vector_to_series([row[c] for row in A.matrix], n, K)
    coords = [imgs[tuple(1 if i == j else 0 for i in range(n))] for j in range(n)]
    bad = None
    for e in basis:
        if sum(e) == 1:
            continue
        j = max(i for i, k in enumerate(e) if k)
        prev = list(e)
        prev[j] -= 1
        if imgs[e] != imgs[tuple(prev)] * coords[j]:
            bad = e
            break
    ok = bad is None
    if ok:
        lin = tuple(tuple(g.coefficient(tuple(1 if i == j else 0 for i in range(n))) for j in range(n)) for g in coords)
        ok = not linalg.det(lin).is_zero()
    return (ok, bad) if witness else ok


def operator_log_unipotent(A: JetOperator) -> JetOperator:
    """Mercator series sum_{j>=1} (-1)^(j+1) (A - I)^j / j, finite for unipotent A."""
    d = A.dim
    N = linalg.sub(A.matrix, linalg.identity(d))
    if not linalg.is_nilpotent(N):
        raise NonUnipotentError("operator is not unipotent")
    acc = linalg.zeros(d)
    P = linalg.identity(d)
    for j in range(1, d + 1):
        P = linalg.mul(P, N)
        if linalg.is_zero(P):
            break
        acc = linalg.add(acc, linalg.scale(CycRational(Fraction((-1) ** (j + 1), j)), P))
    return JetOperator(A.n, A.K, acc)


def operator_exp_nilpotent(N: JetOperator) -> JetOperator:
    """sum_j N^j / j!, finite for nilpotent N."""
    d = N.dim
    if not linalg.is_nilpotent(N.matrix):
        raise NonNilpotentError("operator is not nilpotent")
    acc = linalg.identity(d)
    P = linalg.identity(d)
    for j in range(1, d + 1):
        P = linalg.mul(P, N.matrix)
        if linalg.is_zero(P):
            break
        acc = linalg.add(acc, linalg.scale(CycRational(Fraction(1, factorial(j))), P))
    return JetOperator(N.n, N.K, acc)


def pullback_log_apply(phi: JetDiffeo, f: TruncSeries) -> TruncSeries:
    """(log phi_K)(f) without forming the matrix.

    Iterates the difference operator g -> g o phi - g on f; for unipotent phi
    this is nilpotent on m/m^(K+1), so the Mercator sum is finite.
    """
    if not phi.is_unipotent():
        raise NonUnipotentError("logarithm requires a unipotent jet")
    s = phi.substitution()
    d = basis_size(phi.n, phi.K)
    acc = TruncSeries.zero(phi.n, phi.K)
    g = f
    for j in range(1, d + 2):
        g = s.apply(g) - g
        if g.is_zero():
            return acc
        acc = acc + g.scale(CycRational(Fraction((-1) ** (j + 1), j)))
    raise NonUnipotentError("difference operator failed to terminate")

