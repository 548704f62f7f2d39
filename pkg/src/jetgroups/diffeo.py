"""Jets of formal diffeomorphisms of (C^n, 0) at a fixed order K.

A jet is the tuple of its coordinate functions ``(g_1, ..., g_n)``; the group
law is substitution, ``(phi o psi)_j = phi_j(psi_1, ..., psi_n)``.
"""
from __future__ import annotations

from typing import Sequence

from . import linalg
from .errors import MismatchError
from .series import Substitution, TruncSeries

__all__ = [
    "JetDiffeo",
    "compose",
    "invert",
    "group_commutator",
    "linear_part",
    "is_unipotent",
    "pullback_function",
]


class JetDiffeo:
    """A K-jet of a formal diffeomorphism: n components in m with invertible linear part."""

    __slots__ = ("n", "K", "components", "_subst")

    def __init__(self, components: Sequence[TruncSeries], check: bool = True):
        comps = tuple(components)
        if not comps:
            raise ValueError("a diffeomorphism needs at least one component")
        n, K = len(comps), comps[0].K
        for g in comps:
            if g.n != n or g.K != K:
                raise MismatchError(f"components must be series in {n} variables at a common order")
        self.n = n
        self.K = K
        self.components = comps
        self._subst = None
        if check:
            for g in comps:
                if not g.constant_term().is_zero():
                    raise ValueError("components of a diffeomorphism jet must vanish at 0")
            if linalg.det(self.linear_part()).is_zero():
                raise ValueError("linear part of a diffeomorphism jet must be invertible")

    # -- constructors -------------------------------------------------------
    @classmethod
    def identity(cls, n: int, K: int) -> "JetDiffeo":
        return cls([TruncSeries.variable(n, K, j) for j in range(n)], check=False)

    @classmethod
    def linear(cls, A, K: int) -> "JetDiffeo":
        """The linear map x -> A x."""
        A = linalg.matrix(A)
        n = len(A)
        xs = [TruncSeries.variable(n, K, j) for j in range(n)]
        comps = []
        for row in A:
            acc = TruncSeries.zero(n, K)
            for a, x in zip(row, xs):
                if not a.is_zero():
                    acc = acc + x.scale(a)
            comps.append(acc)
        return cls(comps)

    # -- structure ------------------------------------------------------------
    def linear_part(self) -> linalg.Matrix:
        """j^1 phi as an n x n matrix: entry (i, j) is d g_i / d x_j at 0."""
        rows = []
        for g in self.components:
            row = []
            for j in range(self.n):
                e = [0] * self.n
                e[j] = 1
                row.append(g.coefficient(e))
            rows.append(tuple(row))
        return tuple(rows)

    def is_unipotent(self) -> bool:
        return linalg.is_unipotent(self.linear_part())

    def is_identity(self) -> bool:
        return self == JetDiffeo.identity(self.n, self.K)

    def truncate(self, k: int) -> "JetDiffeo":
        return JetDiffeo([g.truncate(k) for g in self.components], check=False)

    def with_order(self, k: int) -> "JetDiffeo":
        return JetDiffeo([g.with_order(k) for g in self.components], check=False)

    def substitution(self) -> Substitution:
        """Cached evaluator of f -> f o phi."""
        if self._subst is None:
            self._subst = Substitution(self.components)
        return self._subst

    # -- group law ----------------------------------------------------------
    def _check(self, other: "JetDiffeo") -> None:
        if self.n != other.n or self.K != other.K:
            raise MismatchError(
                f"jets differ in shape: (n={self.n}, K={self.K}) vs (n={other.n}, K={other.K})"
            )

    def compose(self, other: "JetDiffeo") -> "JetDiffeo":
        """self o other (apply ``other`` first)."""
        self._check(other)
        s = other.substitution()
        return JetDiffeo([s.apply(g) for g in self.components], check=False)

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self) -> "JetDiffeo":
        """Compositional inverse, one degree of accuracy per fixed-point step."""
        n, K = self.n, self.K
        Ainv = linalg.inverse(self.linear_part())

        def apply_linear(M, vec, k):
            out = []
            for row in M:
                acc = TruncSeries.zero(n, k)
                for a, v in zip(row, vec):
                    if not a.is_zero():
                        acc = acc + v.scale(a)
                out.append(acc)
            return out

        # psi = A^-1 (x - N(psi)),  N = nonlinear part of self
        psi = apply_linear(Ainv, [TruncSeries.variable(n, 1, j) for j in range(n)], 1)
        for k in range(2, K + 1):
            lin = [TruncSeries.variable(n, k, j) for j in range(n)]
            nonlin = [
                g.truncate(k) - g.truncate(1).with_order(k) for g in self.components
            ]
            s = Substitution([p.with_order(k) for p in psi])
            rhs = [x - s.apply(h) for x, h in zip(lin, nonlin)]
            psi = apply_linear(Ainv, rhs, k)
        return JetDiffeo(psi, check=False)

    def pullback(self, f: TruncSeries) -> TruncSeries:
        """f o self."""
        if f.n != self.n or f.K != self.K:
            raise MismatchError("function and diffeomorphism differ in n or K")
        return self.substitution().apply(f)

    # -- equality / text --------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, JetDiffeo):
            return NotImplemented
        return self.n == other.n and self.K == other.K and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        from .render import render_diffeo

        return f"JetDiffeo(n={self.n}, K={self.K}, {render_diffeo(self)!r})"

    def to_json(self) -> dict:
        return {"n": self.n, "K": self.K, "components": [g.to_json() for g in self.components]}

    @classmethod
    def from_json(cls, data: dict) -> "JetDiffeo":
        comps = [TruncSeries.from_json(c) for c in data["components"]]
        phi = cls(comps)
        if phi.n != int(data["n"]) or phi.K != int(data["K"]):
            raise MismatchError("JSON header disagrees with components")
        return phi


def compose(phi: JetDiffeo, psi: JetDiffeo) -> JetDiffeo:
    return phi.compose(psi)


def invert(phi: JetDiffeo) -> JetDiffeo:
    return phi.inverse()


def group_commutator(phi: JetDiffeo, eta: JetDiffeo) -> JetDiffeo:
    """phi o eta o phi^-1 o eta^-1."""
    phi._check(eta)
    return phi.compose(eta).compose(phi.inverse().compose(eta.inverse()))


def linear_part(phi: JetDiffeo) -> linalg.Matrix:
    return phi.linear_part()


def is_unipotent(phi: JetDiffeo) -> bool:
    return phi.is_unipotent()


def pullback_function(f: TruncSeries, phi: JetDiffeo) -> TruncSeries:
    return phi.pullback(f)


def diffeo_from_polys(n: int, K: int, comps) -> JetDiffeo:
    """Convenience: components given as ``{exp: coeff}`` maps."""
    return JetDiffeo([TruncSeries(n, K, c) for c in comps])

