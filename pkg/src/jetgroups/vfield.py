"""Jets of formal vector fields: derivations, brackets, exp / log and BCH.

A field X = sum_j X(x_j) d/dx_j is stored by its components X(x_j), each in m.
Because X maps m^(K+1) into itself, applying X to a K-jet is exact at order K
even though the partial derivatives alone lose the top degree.

Sign convention.  ``lie_bracket`` is the commutator of derivations, XY - YX.
Time-one flows compose the other way round: with Z = bch_dynkin(X, Y),
exp(Z) = exp(X) o exp(Y), and the low-order expansion reads
Z = X + Y - 1/2 [X, Y] + ...   (the group bracket of diffeomorphisms is
minus the bracket of vector fields).
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from . import linalg
from .coeff import ONE, CycRational, as_cyc
from .diffeo import JetDiffeo
from .errors import MismatchError, NonNilpotentError, NonStabilizationError, NonUnipotentError
from .jetrep import pullback_log_apply
from .series import TruncSeries, basis_size

__all__ = [
    "JetVectorField",
    "apply",
    "lie_bracket",
    "is_nilpotent",
    "exp_nilpotent",
    "log_unipotent",
    "one_parameter",
    "pullback_field",
    "bch_dynkin",
    "dynkin_coefficient",
]


class JetVectorField:
    """A K-jet of a formal vector field vanishing at the origin."""

    __slots__ = ("n", "K", "components")

    def __init__(self, components: Sequence[TruncSeries]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        n, K = len(comps), comps[0].K
        for c in comps:
            if c.n != n or c.K != K:
                raise MismatchError(f"components must be series in {n} variables at a common order")
            if not c.constant_term().is_zero():
                raise ValueError("vector field components must lie in m (X(m) in m)")
        self.n = n
        self.K = K
        self.components = comps

    @classmethod
    def zero(cls, n: int, K: int) -> "JetVectorField":
        return cls([TruncSeries.zero(n, K)] * n)

    @classmethod
    def linear(cls, M, K: int) -> "JetVectorField":
        """The linear field x -> M x, i.e. X(x_i) = sum_j M_ij x_j."""
        M = linalg.matrix(M)
        n = len(M)
        xs = [TruncSeries.variable(n, K, j) for j in range(n)]
        comps = []
        for row in M:
            acc = TruncSeries.zero(n, K)
            for a, x in zip(row, xs):
                if not a.is_zero():
                    acc = acc + x.scale(a)
            comps.append(acc)
        return cls(comps)

    def _check(self, other) -> None:
        if self.n != other.n or self.K != other.K:
            raise MismatchError(
                f"shapes differ: (n={self.n}, K={self.K}) vs (n={other.n}, K={other.K})"
            )

    # -- vector space -------------------------------------------------------
    def __add__(self, other: "JetVectorField") -> "JetVectorField":
        self._check(other)
        return JetVectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "JetVectorField") -> "JetVectorField":
        self._check(other)
        return JetVectorField([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return JetVectorField([-a for a in self.components])

    def scale(self, c) -> "JetVectorField":
        c = as_cyc(c)
        return JetVectorField([a.scale(c) for a in self.components])

    def __mul__(self, other):
        """Scalar multiple, or multiplication by a function f (the field fX)."""
        if isinstance(other, TruncSeries):
            return JetVectorField([other * a for a in self.components])
        return self.scale(other)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, JetVectorField):
            return NotImplemented
        return self.n == other.n and self.K == other.K and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        from .render import render_field

        return f"JetVectorField(n={self.n}, K={self.K}, {render_field(self)!r})"

    def truncate(self, k: int) -> "JetVectorField":
        return JetVectorField([c.truncate(k) for c in self.components])

    # -- structure -------------------------------------------------------------
    def linear_part(self) -> linalg.Matrix:
        rows = []
        for c in self.components:
            rows.append(tuple(c.coefficient(tuple(1 if i == j else 0 for i in range(self.n))) for j in range(self.n)))
        return tuple(rows)

    def is_nilpotent(self) -> bool:
        return linalg.is_nilpotent(self.linear_part())

    def apply(self, f: TruncSeries) -> TruncSeries:
        """X(f) = sum_j X(x_j) df/dx_j."""
        if f.n != self.n or f.K != self.K:
            raise MismatchError("field and function differ in n or K")
        acc = TruncSeries.zero(self.n, self.K)
        for j, c in enumerate(self.components):
            if c.is_zero():
                continue
            d = f.partial_derivative(j)
            if not d.is_zero():
                acc = acc + c * d
        return acc

    def __call__(self, f: TruncSeries) -> TruncSeries:
        return self.apply(f)

    def bracket(self, other: "JetVectorField") -> "JetVectorField":
        """[X, Y] with components X(Y_j) - Y(X_j)."""
        self._check(other)
        return JetVectorField(
            [self.apply(b) - other.apply(a) for a, b in zip(self.components, other.components)]
        )

    def to_json(self) -> dict:
        return {"n": self.n, "K": self.K, "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, data: dict) -> "JetVectorField":
        X = cls([TruncSeries.from_json(c) for c in data["components"]])
        if X.n != int(data["n"]) or X.K != int(data["K"]):
            raise MismatchError("JSON header disagrees with components")
        return X


def apply(X: JetVectorField, f: TruncSeries) -> TruncSeries:
    return X.apply(f)


def lie_bracket(X: JetVectorField, Y: JetVectorField) -> JetVectorField:
    return X.bracket(Y)


def is_nilpotent(X: JetVectorField) -> bool:
    return X.is_nilpotent()


def exp_nilpotent(X: JetVectorField, t=ONE) -> JetDiffeo:
    """exp(tX): components sum_j t^j/j! X^j(x_i), a finite sum for nilpotent X."""
    t = as_cyc(t)
    if not X.is_nilpotent():
        raise NonNilpotentError("exp is only defined here for nilpotent fields")
    n, K = X.n, X.K
    cap = basis_size(n, K)
    comps = []
    for i in range(n):
        g = TruncSeries.variable(n, K, i)
        acc = g
        coef = ONE
        for j in range(1, cap + 2):
            g = X.apply(g)
            if g.is_zero():
                break
            coef = coef * t / j
            if not coef.is_zero():
                acc = acc + g.scale(coef)
        else:
            raise NonNilpotentError("exponential series failed to terminate within dim m/m^(K+1)")
        comps.append(acc)
    return JetDiffeo(comps, check=False)


def log_unipotent(phi: JetDiffeo) -> JetVectorField:
    """The infinitesimal generator: the nilpotent field with exp(log phi) = phi.

    Computed as the operator logarithm of g -> g o phi on m/m^(K+1), evaluated
    on the coordinate functions.
    """
    if not phi.is_unipotent():
        raise NonUnipotentError("log is only defined for unipotent jets")
    n, K = phi.n, phi.K
    return JetVectorField([pullback_log_apply(phi, TruncSeries.variable(n, K, i)) for i in range(n)])


def one_parameter(phi: JetDiffeo, t) -> JetDiffeo:
    """phi^t = exp(t log phi)."""
    return exp_nilpotent(log_unipotent(phi), t)


def pullback_field(phi: JetDiffeo, X: JetVectorField) -> JetVectorField:
    """phi^* X = (D phi)^-1 (X o phi).

    Solved as J0 Y = X o phi - (J - J0) Y by fixed-point iteration; J - J0 has
    entries in m so each pass fixes one more degree.
    """
    X._check(phi)
    n, K = X.n, X.K
    s = phi.substitution()
    Xphi = [s.apply(c) for c in X.components]
    J = [[g.partial_derivative(j) for j in range(n)] for g in phi.components]
    J0inv = linalg.inverse(phi.linear_part())
    E = [[J[i][j] - J[i][j].constant_term() for j in range(n)] for i in range(n)]

    def solve(rhs):
        return [
            sum((rhs[j].scale(J0inv[i][j]) for j in range(n) if not J0inv[i][j].is_zero()), TruncSeries.zero(n, K))
            for i in range(n)
        ]

    Y = solve(Xphi)
    for _ in range(K):
        rhs = [
            Xphi[i] - sum((E[i][j] * Y[j] for j in range(n)), TruncSeries.zero(n, K))
            for i in range(n)
        ]
        Ynew = solve(rhs)
        if Ynew == Y:
            break
        Y = Ynew
    return JetVectorField(Y)


def dynkin_coefficient(word: Sequence[int]) -> Fraction:
    """Total Dynkin coefficient of the right-nested bracket of ``word``.

    ``word`` is a sequence of letters 0 (X) and 1 (Y).  Sums
    (-1)^(k-1)/k * 1/(m * prod r_i! s_i!) over all ways of cutting the word
    into k blocks X^r_i Y^s_i with r_i + s_i > 0.
    """
    m = len(word)
    # ways[p] maps block count -> weight for cutting word[p:]
    ways: list[dict[int, Fraction]] = [dict() for _ in range(m + 1)]
    ways[m] = {0: Fraction(1)}
    for p in range(m - 1, -1, -1):
        out: dict[int, Fraction] = {}
        rmax = 0
        while p + rmax < m and word[p + rmax] == 0:
            rmax += 1
        for r in range(rmax + 1):
            q = p + r
            if r < rmax:
                options = [0] if r > 0 else []
            else:
                smax = 0
                while q + smax < m and word[q + smax] == 1:
                    smax += 1
                options = [s for s in range(smax + 1) if r + s > 0]
            for s in options:
                w = Fraction(1, factorial(r) * factorial(s))
                for k, v in ways[q + s].items():
                    out[k + 1] = out.get(k + 1, Fraction(0)) + w * v
        ways[p] = out
    total = Fraction(0)
    for k, v in ways[0].items():
        total += Fraction((-1) ** (k - 1), k) * v
    return total / m


def bch_dynkin(
    X: JetVectorField,
    Y: JetVectorField,
    max_length: int | None = None,
    bracket: Callable | None = None,
) -> JetVectorField:
    """Dynkin's series for Z with exp(Z) = exp(X) o exp(Y).

    The word sum runs as a dynamic program over suffixes read right to left.
    Words are merged when they are in the same cutting state (blocks closed,
    whether the open block X^r Y^s is in its Y or X part, and the run length
    there), since the bracket is linear and the remaining weight depends only
    on that state.  The loop ends at the first length where every state sum
    vanishes; all longer words are brackets of these and vanish too.
    ``bracket`` defaults to the group bracket (A, B) -> [B, A].
    """
    X._check(Y)
    if not (X.is_nilpotent() and Y.is_nilpotent()):
        raise NonNilpotentError("BCH needs nilpotent fields")
    br = bracket or (lambda a, b: lie_bracket(b, a))
    cap = max_length or basis_size(X.n, X.K)
    letters = (X, Y)
    # state (closed, phase, run): phase 0 = X part, 1 = Y part of the open block
    level = {(0, a, 1): letters[a] for a in (0, 1) if not letters[a].is_zero()}
    total = JetVectorField.zero(X.n, X.K)
    length = 1
    while level:
        if length > cap:
            raise NonStabilizationError(
                f"bracket words still nonzero at length {length}; pair is outside the nilpotent regime"
            )
        acc = None
        for (closed, _, _), v in level.items():
            k = closed + 1
            term = v.scale(CycRational(Fraction((-1) ** (k - 1), k * length)))
            acc = term if acc is None else acc + term
        total = total + acc
        nxt: dict = {}

        def put(state, v, c):
            v = v if c == 1 else v.scale(CycRational(c))
            nxt[state] = nxt[state] + v if state in nxt else v

        for (closed, phase, run), v in level.items():
            for a in (0, 1):
                b = br(letters[a], v)
                if b.is_zero():
                    continue
                # start a new block with this letter
                put((closed + 1, a, 1), b, 1)
                # or grow the open block: more Y's only before any X, more X's always
                if a == phase:
                    put((closed, a, run + 1), b, Fraction(1, run + 1))
                elif a == 0:
                    put((closed, 0, 1), b, 1)
        level = {st: v for st, v in nxt.items() if not v.is_zero()}
        length += 1
    return total
