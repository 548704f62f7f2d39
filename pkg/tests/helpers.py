"""Random domain values and independent oracles shared by the test modules."""
import random
from fractions import Fraction
from itertools import product

from jetgroups import linalg
from jetgroups.coeff import CycRational
from jetgroups.diffeo import JetDiffeo
from jetgroups.series import TruncSeries, monomials
from jetgroups.vfield import JetVectorField


def rand_cyc(rng, rational=False, span=4, den=3):
    def q():
        return Fraction(rng.randint(-span, span), rng.randint(1, den))

    if rational:
        return CycRational(q())
    return CycRational(q(), q() if rng.random() < 0.5 else 0, q() if rng.random() < 0.3 else 0, 0)


def rand_nonzero_cyc(rng, rational=False):
    while True:
        c = rand_cyc(rng, rational)
        if not c.is_zero():
            return c


def rand_series(rng, n, K, min_deg=0, terms=4, rational=False):
    exps = [e for e in monomials(n, K) if sum(e) >= min_deg]
    if not exps:
        return TruncSeries.zero(n, K)
    out = {}
    for _ in range(terms):
        out[rng.choice(exps)] = rand_cyc(rng, rational)
    return TruncSeries(n, K, out)


def rand_strict_upper(rng, n, rational=True):
    return tuple(
        tuple(rand_cyc(rng, rational) if j > i and rng.random() < 0.6 else CycRational(0) for j in range(n))
        for i in range(n)
    )


def rand_nilpotent_field(rng, n, K, rational=True, terms=3):
    """Strictly upper-triangular linear part plus random terms of degree >= 2."""
    lin = JetDiffeo.linear(linalg.identity(n), K)  # coordinates
    M = rand_strict_upper(rng, n, rational)
    comps = []
    for i in range(n):
        acc = rand_series(rng, n, K, min_deg=2, terms=terms, rational=rational) if K >= 2 else TruncSeries.zero(n, K)
        for j in range(n):
            if not M[i][j].is_zero():
                acc = acc + lin.components[j].scale(M[i][j])
        comps.append(acc)
    return JetVectorField(comps)


def rand_invertible(rng, n, rational=True):
    while True:
        A = tuple(tuple(rand_cyc(rng, rational) for _ in range(n)) for _ in range(n))
        if not linalg.det(A).is_zero():
            return A


def rand_jet(rng, n, K, unipotent=False, rational=True, terms=3):
    if unipotent:
        A = linalg.add(linalg.identity(n), rand_strict_upper(rng, n, rational))
    else:
        A = rand_invertible(rng, n, rational)
    base = JetDiffeo.linear(A, K).components
    comps = [g + rand_series(rng, n, K, min_deg=2, terms=terms, rational=rational) for g in base]
    return JetDiffeo(comps)


def rng_for(seed):
    return random.Random(seed)


# -- polynomial oracle: dict {exponent tuple: Fraction}, no library arithmetic --

def to_dict(f):
    out = {}
    for e, c in f.terms.items():
        assert c.is_rational()
        out[tuple(e)] = c.to_fraction()
    return out


def poly_mul(f, g, K):
    out = {}
    for (e1, c1), (e2, c2) in product(f.items(), g.items()):
        e = tuple(a + b for a, b in zip(e1, e2))
        if sum(e) <= K:
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def poly_add(f, g):
    out = dict(f)
    for e, c in g.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def poly_subst(f, args, K):
    n = len(args)
    out = {}
    for e, c in f.items():
        term = {tuple([0] * n): Fraction(c)}
        for a, k in zip(args, e):
            for _ in range(k):
                term = poly_mul(term, a, K)
        out = poly_add(out, term)
    return out


def sympy_field_mul(a, b):
    """Product in Q[t]/(t^4 + 1) computed by sympy polynomial remainder."""
    import sympy

    t = sympy.symbols("t")
    pa = sum(sympy.Rational(c.numerator, c.denominator) * t ** k for k, c in enumerate(a.coords))
    pb = sum(sympy.Rational(c.numerator, c.denominator) * t ** k for k, c in enumerate(b.coords))
    r = sympy.Poly(sympy.rem(sympy.expand(pa * pb), t ** 4 + 1, t), t)
    coeffs = [Fraction(0)] * 4
    for (k,), c in r.terms():
        coeffs[k] = Fraction(int(c.p), int(c.q))
    return CycRational(*coeffs)


def to_complex(a):
    import cmath

    z = cmath.exp(1j * cmath.pi / 4)
    return sum(float(c) * z ** k for k, c in enumerate(a.coords))
