"""Truncated multivariate power series: the ring O_n / m^(K+1) over Q(zeta_8).

Monomials are packed into integers: with base ``B = K + 1`` the exponent of
variable ``j`` (0-based) sits at digit ``B**(n-1-j)``.  As long as total degree
stays at most K no digit overflows, so multiplying monomials is adding codes.
Within one degree, larger codes come first in graded-lex order.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial, gcd as _gcd
from typing import Iterable, Sequence

from .coeff import CycRational, ONE, ZERO, as_cyc
from .errors import MismatchError, NonUnitError

__all__ = [
    "TruncSeries",
    "monomials",
    "basis_size",
    "INFINITY",
]

INFINITY = float("inf")
MAX_VARS = 8
MAX_ORDER = 40  # the primitive allows deep jets; public entry points document 12

_DEG_CACHE: dict[int, dict[int, int]] = {}


def _degree(code: int, base: int) -> int:
    cache = _DEG_CACHE.setdefault(base, {})
    d = cache.get(code)
    if d is None:
        d, c = 0, code
        while c:
            c, r = divmod(c, base)
            d += r
        cache[code] = d
    return d


def _encode(exps: Sequence[int], base: int) -> int:
    code = 0
    for e in exps:
        code = code * base + e
    return code


def _decode(code: int, n: int, base: int) -> tuple[int, ...]:
    out = [0] * n
    for j in range(n - 1, -1, -1):
        code, out[j] = divmod(code, base)
    return tuple(out)


@lru_cache(maxsize=None)
def monomials(n: int, K: int, min_degree: int = 0) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree ``min_degree..K`` in graded-lex order."""
    out = []
    for d in range(min_degree, K + 1):
        block = []
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for j in combo:
                e[j] += 1
            block.append(tuple(e))
        block.sort(reverse=True)
        out.extend(block)
    return tuple(out)


def basis_size(n: int, K: int) -> int:
    """dim m/m^(K+1) = C(n+K, n) - 1."""
    return comb(n + K, n) - 1


def _integerize(terms: dict):
    """Split coefficients into integer numerators over one common denominator.

    Returns (items, den, rational) where items are (code, num) sorted by code
    and num is an int when every coefficient is rational, a 4-tuple otherwise.
    """
    den = 1
    rational = True
    for c in terms.values():
        d = c._d
        if den % d:
            den = den * d // _gcd(den, d)
        if rational and (c._n[1] or c._n[2] or c._n[3]):
            rational = False
    items = []
    if rational:
        for code, c in terms.items():
            items.append((code, c._n[0] * (den // c._d)))
    else:
        for code, c in terms.items():
            s = den // c._d
            n = c._n
            items.append((code, (n[0] * s, n[1] * s, n[2] * s, n[3] * s)))
    return items, den, rational


def _mul_terms(ft: dict, gt: dict, K: int, base: int) -> dict:
    """Truncated product of two term maps."""
    if not ft or not gt:
        return {}
    if len(ft) > len(gt):
        ft, gt = gt, ft
    # single monomial with coefficient one: a shift
    if len(ft) == 1:
        (code, c), = ft.items()
        dc = _degree(code, base)
        out = {}
        if c == ONE:
            for k, v in gt.items():
                if _degree(k, base) + dc <= K:
                    out[k + code] = v
        else:
            for k, v in gt.items():
                if _degree(k, base) + dc <= K:
                    out[k + code] = v * c
        return out
    fi, fd, fr = _integerize(ft)
    gi, gd, gr = _integerize(gt)
    F = [(code, _degree(code, base), v) for code, v in fi]
    G = sorted(((_degree(code, base), code, v) for code, v in gi), key=lambda t: t[0])
    acc: dict = {}
    get = acc.get
    den = fd * gd
    if fr and gr:
        for cf, df, af in F:
            lim = K - df
            for dg, cg, ag in G:
                if dg > lim:
                    break
                k = cf + cg
                acc[k] = get(k, 0) + af * ag
        out = {}
        for k, v in acc.items():
            if v:
                out[k] = CycRational._raw(v, 0, 0, 0, den)
        return out
    if fr:
        F = [(c, d, (v, 0, 0, 0)) for c, d, v in F]
    if gr:
        G = [(d, c, (v, 0, 0, 0)) for d, c, v in G]
    for cf, df, (a0, a1, a2, a3) in F:
        lim = K - df
        for dg, cg, (b0, b1, b2, b3) in G:
            if dg > lim:
                break
            k = cf + cg
            r = get(k)
            p0 = a0 * b0 - a1 * b3 - a2 * b2 - a3 * b1
            p1 = a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2
            p2 = a0 * b2 + a1 * b1 + a2 * b0 - a3 * b3
            p3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
            if r is None:
                acc[k] = (p0, p1, p2, p3)
            else:
                acc[k] = (r[0] + p0, r[1] + p1, r[2] + p2, r[3] + p3)
    out = {}
    for k, (v0, v1, v2, v3) in acc.items():
        if v0 or v1 or v2 or v3:
            out[k] = CycRational._raw(v0, v1, v2, v3, den)
    return out


def _add_into(acc: dict, terms: dict, scale=None) -> None:
    """acc += scale * terms, dropping zeros."""
    for k, v in terms.items():
        if scale is not None:
            v = v * scale
        r = acc.get(k)
        if r is None:
            acc[k] = v
        else:
            s = r + v
            if s.is_zero():
                del acc[k]
            else:
                acc[k] = s


class TruncSeries:
    """A power series in ``n`` variables with all terms of degree > K dropped.

    Values are immutable; arithmetic returns new series.  ``terms`` exposes
    the exponent-vector view; the internal map is keyed by packed codes.
    """

    __slots__ = ("n", "K", "_t", "_base")

    def __init__(self, n: int, K: int, terms=None):
        if not 1 <= n <= MAX_VARS:
            raise ValueError(f"variable count must be in 1..{MAX_VARS}, got {n}")
        if not 1 <= K <= MAX_ORDER:
            raise ValueError(f"truncation order must be in 1..{MAX_ORDER}, got {K}")
        self.n = n
        self.K = K
        self._base = K + 1
        t = {}
        if terms:
            for exp, c in dict(terms).items():
                exp = tuple(exp)
                if len(exp) != n or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent vector {exp} for n={n}")
                if sum(exp) > K:
                    continue
                c = as_cyc(c)
                if c.is_zero():
                    continue
                code = _encode(exp, self._base)
                prev = t.get(code)
                c = c if prev is None else prev + c
                if c.is_zero():
                    t.pop(code, None)
                else:
                    t[code] = c
        self._t = t

    @classmethod
    def _from_codes(cls, n: int, K: int, t: dict) -> "TruncSeries":
        obj = object.__new__(cls)
        obj.n = n
        obj.K = K
        obj._base = K + 1
        obj._t = t
        return obj

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, n: int, K: int) -> "TruncSeries":
        return cls(n, K)

    @classmethod
    def constant(cls, n: int, K: int, c) -> "TruncSeries":
        return cls(n, K, {(0,) * n: c})

    @classmethod
    def one(cls, n: int, K: int) -> "TruncSeries":
        return cls.constant(n, K, ONE)

    @classmethod
    def variable(cls, n: int, K: int, j: int) -> "TruncSeries":
        """The coordinate function x_{j+1} (0-based index j)."""
        if not 0 <= j < n:
            raise IndexError(f"variable index {j} out of range for n={n}")
        e = [0] * n
        e[j] = 1
        return cls(n, K, {tuple(e): ONE})

    @classmethod
    def monomial(cls, n: int, K: int, exp: Sequence[int], c=ONE) -> "TruncSeries":
        return cls(n, K, {tuple(exp): c})

    # -- views ----------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], CycRational]:
        b = self._base
        return {_decode(code, self.n, b): c for code, c in self._t.items()}

    def sorted_terms(self) -> list[tuple[tuple[int, ...], CycRational]]:
        """Terms in graded-lex order: degree ascending, then lex descending."""
        b = self._base
        keys = sorted(self._t, key=lambda code: (_degree(code, b), -code))
        return [(_decode(code, self.n, b), self._t[code]) for code in keys]

    def coefficient(self, exp: Sequence[int]) -> CycRational:
        exp = tuple(exp)
        if sum(exp) > self.K:
            return ZERO
        return self._t.get(_encode(exp, self._base), ZERO)

    def constant_term(self) -> CycRational:
        return self._t.get(0, ZERO)

    def is_zero(self) -> bool:
        return not self._t

    def __len__(self):
        return len(self._t)

    def vanishing_order(self):
        """Least total degree of a nonzero term; ``INFINITY`` for zero."""
        if not self._t:
            return INFINITY
        b = self._base
        return min(_degree(code, b) for code in self._t)

    def degree_part(self, d: int) -> "TruncSeries":
        b = self._base
        return TruncSeries._from_codes(
            self.n, self.K, {k: v for k, v in self._t.items() if _degree(k, b) == d}
        )

    def max_degree(self) -> int:
        b = self._base
        return max((_degree(k, b) for k in self._t), default=-1)

    def variables_used(self) -> set[int]:
        used = set()
        for exp in self.terms:
            used.update(j for j, e in enumerate(exp) if e)
        return used

    # -- order management ----------------------------------------------
    def truncate(self, k: int) -> "TruncSeries":
        """Project to O_n / m^(k+1) for k <= K."""
        if k > self.K:
            raise MismatchError(f"cannot truncate order {self.K} series to higher order {k}")
        return TruncSeries(self.n, k, {e: c for e, c in self.terms.items() if sum(e) <= k})

    def with_order(self, k: int) -> "TruncSeries":
        """Reinterpret at order k: truncates if k < K, pads with zero terms if k > K."""
        if k == self.K:
            return self
        return TruncSeries(self.n, k, {e: c for e, c in self.terms.items() if sum(e) <= k})

    def embed_vars(self, n: int, positions: Sequence[int] | None = None) -> "TruncSeries":
        """View as a series in ``n >= self.n`` variables (variable j -> positions[j])."""
        if positions is None:
            positions = range(self.n)
        out = {}
        for exp, c in self.terms.items():
            e = [0] * n
            for j, p in enumerate(positions):
                e[p] = exp[j]
            out[tuple(e)] = c
        return TruncSeries(n, self.K, out)

    def restrict_vars(self, n: int) -> "TruncSeries":
        """Drop to the first ``n`` variables; error if a later variable occurs."""
        out = {}
        for exp, c in self.terms.items():
            if any(exp[n:]):
                raise MismatchError(f"series depends on variables beyond x{n}")
            out[exp[:n]] = c
        return TruncSeries(n, self.K, out)

    # -- ring structure --------------------------------------------------
    def _check(self, other: "TruncSeries") -> None:
        if self.n != other.n or self.K != other.K:
            raise MismatchError(
                f"series shapes differ: (n={self.n}, K={self.K}) vs (n={other.n}, K={other.K})"
            )

    def _lift(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        try:
            c = as_cyc(other)
        except TypeError:
            return NotImplemented
        return TruncSeries._from_codes(self.n, self.K, {} if c.is_zero() else {0: c})

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        acc = dict(self._t)
        _add_into(acc, other._t)
        return TruncSeries._from_codes(self.n, self.K, acc)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._from_codes(self.n, self.K, {k: -v for k, v in self._t.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        acc = dict(self._t)
        _add_into(acc, other._t, scale=-ONE)
        return TruncSeries._from_codes(self.n, self.K, acc)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c) -> "TruncSeries":
        c = as_cyc(c)
        if c.is_zero():
            return TruncSeries._from_codes(self.n, self.K, {})
        if c == ONE:
            return self
        return TruncSeries._from_codes(self.n, self.K, {k: v * c for k, v in self._t.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        return TruncSeries._from_codes(self.n, self.K, _mul_terms(self._t, other._t, self.K, self._base))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.invert()
        return self.scale(as_cyc(other).inverse())

    def __pow__(self, k: int) -> "TruncSeries":
        if not isinstance(k, int) or k < 0:
            raise ValueError("series powers must be non-negative integers")
        result = TruncSeries.one(self.n, self.K)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.n == other.n and self.K == other.K and self._t == other._t
        try:
            c = as_cyc(other)
        except TypeError:
            return NotImplemented
        return self._t == ({} if c.is_zero() else {0: c})

    def __hash__(self):
        return hash((self.n, self.K, frozenset(self._t.items())))

    def __repr__(self):
        from .render import render_series

        return f"TruncSeries(n={self.n}, K={self.K}, {render_series(self)!r})"

    # -- units -------------------------------------------------------------
    def invert(self) -> "TruncSeries":
        """Multiplicative inverse in the truncated ring (Newton doubling)."""
        c0 = self.constant_term()
        if c0.is_zero():
            raise NonUnitError("series with zero constant term is not a unit")
        inv = TruncSeries.constant(self.n, self.K, c0.inverse())
        prec = 1
        two = TruncSeries.constant(self.n, self.K, 2)
        while prec <= self.K:
            # g <- g (2 - f g) doubles the number of correct degrees
            inv = inv * (two - self * inv)
            prec *= 2
        return inv

    def exp(self) -> "TruncSeries":
        """exp(f) for f with zero constant term (finite sum at order K)."""
        if not self.constant_term().is_zero():
            raise ValueError("exp of a series needs a zero constant term")
        result = TruncSeries.one(self.n, self.K)
        power = result
        for k in range(1, self.K + 1):
            power = power * self
            if power.is_zero():
                break
            result = result + power.scale(CycRational(1) / factorial(k))
        return result

    def log(self) -> "TruncSeries":
        """Mercator logarithm of a unit with constant term 1."""
        if self.constant_term() != ONE:
            raise ValueError("log of a series is defined here only for constant term 1")
        u = self - 1
        result = TruncSeries.zero(self.n, self.K)
        power = TruncSeries.one(self.n, self.K)
        for k in range(1, self.K + 1):
            power = power * u
            if power.is_zero():
                break
            result = result + power.scale(CycRational(Fraction((-1) ** (k + 1), k)))
        return result

    # -- calculus and composition -------------------------------------------
    def partial_derivative(self, j: int) -> "TruncSeries":
        """d/dx_{j+1}, term by term (0-based j).

        The output is still labelled with order K; its degree-K part is
        incomplete because the dropped degree-(K+1) terms of the input would
        have contributed there.
        """
        if not 0 <= j < self.n:
            raise IndexError(f"variable index {j} out of range for n={self.n}")
        b = self._base
        place = b ** (self.n - 1 - j)
        out = {}
        for code, c in self._t.items():
            e = (code // place) % b
            if e:
                out[code - place] = c * e
        return TruncSeries._from_codes(self.n, self.K, out)

    def substitute(self, args: Sequence["TruncSeries"]) -> "TruncSeries":
        """f(args_1, ..., args_n) truncated; every argument must lie in m."""
        return Substitution(args).apply(self)

    def __call__(self, *args):
        return self.substitute(args)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "terms": [{"exp": list(e), "coeff": c.to_json()} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruncSeries":
        return cls(
            int(data["n"]),
            int(data["K"]),
            {tuple(t["exp"]): CycRational.from_json(t["coeff"]) for t in data["terms"]},
        )


class Substitution:
    """Reusable evaluator of g -> g(args) with a memo of monomial images.

    The memo is what makes repeated pullbacks along one map cheap: images of
    monomials are computed once, each from a previously computed divisor.
    """

    def __init__(self, args: Sequence[TruncSeries]):
        args = list(args)
        if not args:
            raise MismatchError("substitution needs at least one argument")
        n_out, K = args[0].n, args[0].K
        for a in args:
            if a.n != n_out or a.K != K:
                raise MismatchError("substitution arguments must share n and K")
            if not a.constant_term().is_zero():
                raise ValueError("substituted series must have zero constant term")
        self.args = args
        self.n_in = len(args)
        self.n_out = n_out
        self.K = K
        self._base = K + 1
        self._memo: dict[int, dict] = {0: {0: ONE}}
        self._places = [self._base ** (self.n_in - 1 - j) for j in range(self.n_in)]

    def image(self, code: int) -> dict:
        memo = self._memo
        r = memo.get(code)
        if r is not None:
            return r
        # peel the last variable with a positive exponent
        stack = []
        c = code
        while c not in memo:
            for j in range(self.n_in - 1, -1, -1):
                p = self._places[j]
                if (c // p) % self._base:
                    stack.append((c, j))
                    c -= p
                    break
        for c, j in reversed(stack):
            prev = memo[c - self._places[j]]
            memo[c] = _mul_terms(prev, self.args[j]._t, self.K, self._base)
        return memo[code]

    def apply(self, f: TruncSeries) -> TruncSeries:
        if f.n != self.n_in:
            raise MismatchError(f"series has {f.n} variables but {self.n_in} arguments were given")
        if f.K != self.K:
            raise MismatchError(f"series order {f.K} differs from argument order {self.K}")
        acc: dict = {}
        for code, c in f._t.items():
            _add_into(acc, self.image(code), scale=c)
        return TruncSeries._from_codes(self.n_out, self.K, acc)


def from_polynomial(n: int, K: int, terms: Iterable[tuple[Sequence[int], object]]) -> TruncSeries:
    return TruncSeries(n, K, {tuple(e): c for e, c in terms})
