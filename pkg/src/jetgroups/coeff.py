"""Exact arithmetic in the cyclotomic field Q(zeta_8) = Q[t]/(t^4 + 1).

An element is stored as four integer numerators over one positive common
denominator, in the basis (1, z, z^2, z^3) with z a primitive 8th root of
unity.  The representation is canonical: the gcd of the five integers is 1.
Useful constants: ``I = z^2`` and ``SQRT2 = z - z^3``.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

__all__ = ["CycRational", "ZERO", "ONE", "I", "SQRT2", "Z8", "embed", "as_cyc"]


def _normalize(n0, n1, n2, n3, d):
    if d < 0:
        n0, n1, n2, n3, d = -n0, -n1, -n2, -n3, -d
    g = gcd(n0, n1, n2, n3, d)
    if g != 1:
        n0 //= g
        n1 //= g
        n2 //= g
        n3 //= g
        d //= g
    return n0, n1, n2, n3, d


class CycRational:
    """Immutable element of Q(zeta_8).

    >>> I * I == -ONE
    True
    >>> SQRT2 * SQRT2
    CycRational('2')
    """

    __slots__ = ("_n", "_d", "_hash")

    def __init__(self, c0=0, c1=0, c2=0, c3=0):
        fr = [Fraction(c) for c in (c0, c1, c2, c3)]
        d = 1
        for f in fr:
            d = d * f.denominator // gcd(d, f.denominator)
        n = [f.numerator * (d // f.denominator) for f in fr]
        self._set(*_normalize(n[0], n[1], n[2], n[3], d))

    def _set(self, n0, n1, n2, n3, d):
        self._n = (n0, n1, n2, n3)
        self._d = d
        self._hash = None

    @classmethod
    def _raw(cls, n0, n1, n2, n3, d):
        """Build from integers without going through Fraction."""
        obj = object.__new__(cls)
        obj._set(*_normalize(n0, n1, n2, n3, d))
        return obj

    @classmethod
    def _canonical(cls, nums, d):
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj._n = nums
        obj._d = d
        obj._hash = None
        return obj

    # -- coordinates ---------------------------------------------------
    @property
    def coords(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return tuple(Fraction(c, self._d) for c in self._n)

    c0 = property(lambda self: Fraction(self._n[0], self._d))
    c1 = property(lambda self: Fraction(self._n[1], self._d))
    c2 = property(lambda self: Fraction(self._n[2], self._d))
    c3 = property(lambda self: Fraction(self._n[3], self._d))

    @property
    def numerators(self) -> tuple[int, int, int, int]:
        return self._n

    @property
    def denominator(self) -> int:
        return self._d

    def is_zero(self) -> bool:
        n = self._n
        return not (n[0] or n[1] or n[2] or n[3])

    def is_rational(self) -> bool:
        n = self._n
        return not (n[1] or n[2] or n[3])

    def is_gaussian(self) -> bool:
        """True when the element lies in Q(i)."""
        return not (self._n[1] or self._n[3])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self._n[0], self._d)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._n, other._n
        da, db = self._d, other._d
        if da == db:
            return CycRational._raw(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], da)
        return CycRational._raw(
            a[0] * db + b[0] * da,
            a[1] * db + b[1] * da,
            a[2] * db + b[2] * da,
            a[3] * db + b[3] * da,
            da * db,
        )

    __radd__ = __add__

    def __neg__(self):
        n = self._n
        return CycRational._canonical((-n[0], -n[1], -n[2], -n[3]), self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a0, a1, a2, a3 = self._n
        b0, b1, b2, b3 = other._n
        return CycRational._raw(
            a0 * b0 - a1 * b3 - a2 * b2 - a3 * b1,
            a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2,
            a0 * b2 + a1 * b1 + a2 * b0 - a3 * b3,
            a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0,
            self._d * other._d,
        )

    __rmul__ = __mul__

    def conjugate_by(self, k: int) -> "CycRational":
        """Apply the Galois automorphism z -> z^k (k odd)."""
        if k % 2 == 0:
            raise ValueError("Galois automorphisms of Q(zeta_8) use odd exponents")
        out = [0, 0, 0, 0]
        for j, c in enumerate(self._n):
            e = (j * k) % 8
            if e >= 4:
                out[e - 4] -= c
            else:
                out[e] += c
        return CycRational._raw(out[0], out[1], out[2], out[3], self._d)

    def inverse(self) -> "CycRational":
        """Multiplicative inverse.

        a * sigma_5(a) lies in Q(i); multiplying by the complex conjugate of
        that product lands in Q, so the inverse is a ratio of conjugates.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_8)")
        s5 = self.conjugate_by(5)
        p = self * s5
        pbar = p.conjugate_by(7)
        norm = p * pbar
        numer = s5 * pbar
        q = norm.to_fraction()
        return numer * CycRational(1 / q)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison / hashing -----------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._d == other._d and self._n == other._n

    def __hash__(self):
        h = self._hash
        if h is None:
            if self.is_rational():
                h = hash(Fraction(self._n[0], self._d))
            else:
                h = hash((self._n, self._d))
            self._hash = h
        return h

    def __bool__(self):
        return not self.is_zero()

    def sort_key(self):
        """Lexicographic key on the canonical coordinates."""
        return self.coords

    # -- text / json ---------------------------------------------------
    def __repr__(self):
        return f"CycRational('{self}')"

    def __str__(self):
        parts = []
        for j, c in enumerate(self.coords):
            if c == 0:
                continue
            mono = ["", "z8", "z8^2", "z8^3"][j]
            if not mono:
                term = str(abs(c))
            elif abs(c) == 1:
                term = mono
            else:
                term = f"{abs(c)}*{mono}"
            if not parts:
                parts.append(term if c > 0 else "-" + term)
            else:
                parts.append(("+ " if c > 0 else "- ") + term)
        return " ".join(parts) if parts else "0"

    def to_json(self) -> list:
        return [[str(c.numerator), str(c.denominator)] for c in self.coords]

    @classmethod
    def from_json(cls, data) -> "CycRational":
        if len(data) != 4:
            raise ValueError("CycRational JSON must hold four [num, den] pairs")
        return cls(*(Fraction(int(p), int(q)) for p, q in data))


def _coerce(x):
    if isinstance(x, CycRational):
        return x
    if isinstance(x, int):
        return CycRational._canonical((x, 0, 0, 0), 1)
    if isinstance(x, Rational):
        return CycRational._canonical((x.numerator, 0, 0, 0), x.denominator)
    return NotImplemented


def as_cyc(x) -> CycRational:
    c = _coerce(x)
    if c is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as an element of Q(zeta_8)")
    return c


ZERO = CycRational._canonical((0, 0, 0, 0), 1)
ONE = CycRational._canonical((1, 0, 0, 0), 1)
Z8 = CycRational._canonical((0, 1, 0, 0), 1)
I = CycRational._canonical((0, 0, 1, 0), 1)
SQRT2 = CycRational._canonical((0, 1, 0, -1), 1)

_NAMED = {"i": I, "sqrt2": SQRT2, "z8": Z8, "zeta8": Z8}


def embed(x) -> CycRational:
    """Embed a rational or one of the named constants ``i``, ``sqrt2``, ``z8``."""
    if isinstance(x, str):
        key = x.strip().lower()
        if key in _NAMED:
            return _NAMED[key]
        return as_cyc(Fraction(key))
    return as_cyc(x)
