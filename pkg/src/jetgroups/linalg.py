"""Exact dense linear algebra over Q(zeta_8).

Matrices are tuples of row tuples of ``CycRational``; vectors are tuples.
Everything here is small (dimension below a hundred) so plain Gaussian
elimination is adequate.
"""
from __future__ import annotations

from typing import Sequence

from .coeff import ONE, ZERO, CycRational, as_cyc
from .errors import MismatchError

Matrix = tuple  # tuple[tuple[CycRational, ...], ...]


def matrix(rows: Sequence[Sequence]) -> Matrix:
    m = tuple(tuple(as_cyc(c) for c in row) for row in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise MismatchError("ragged matrix")
    return m


def identity(m: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(m)) for i in range(m))


def zeros(r: int, c: int | None = None) -> Matrix:
    c = r if c is None else c
    return tuple(tuple(ZERO for _ in range(c)) for _ in range(r))


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A)) if A else ()


def add(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise MismatchError("matrix shapes differ")
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def sub(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise MismatchError("matrix shapes differ")
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(c, A: Matrix) -> Matrix:
    c = as_cyc(c)
    return tuple(tuple(c * a for a in row) for row in A)


def mul(A: Matrix, B: Matrix) -> Matrix:
    ra, ca = shape(A)
    rb, cb = shape(B)
    if ca != rb:
        raise MismatchError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    # skip zeros: jet operators are sparse and triangular
    Bnz = [[(j, b) for j, b in enumerate(row) if not b.is_zero()] for row in B]
    out = []
    for row in A:
        acc: dict[int, CycRational] = {}
        for k, a in enumerate(row):
            if a.is_zero():
                continue
            for j, b in Bnz[k]:
                p = a * b
                r = acc.get(j)
                acc[j] = p if r is None else r + p
        out.append(tuple(acc.get(j, ZERO) for j in range(cb)))
    return tuple(out)


def matvec(A: Matrix, v: Sequence) -> tuple:
    return tuple(sum((a * x for a, x in zip(row, v) if not a.is_zero()), ZERO) for row in A)


def power(A: Matrix, k: int) -> Matrix:
    result = identity(len(A))
    base = A
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def is_zero(A: Matrix) -> bool:
    return all(c.is_zero() for row in A for c in row)


def is_nilpotent(A: Matrix) -> bool:
    """A^m == 0 with m the dimension, by repeated squaring."""
    m = len(A)
    P = A
    k = 1
    while k < m:
        P = mul(P, P)
        k *= 2
        if is_zero(P):
            return True
    return is_zero(P)


def is_unipotent(A: Matrix) -> bool:
    return is_nilpotent(sub(A, identity(len(A))))


def rref(A: Matrix) -> tuple[list[list[CycRational]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(row) for row in A]
    rows, cols = shape(A)
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if not M[i][c].is_zero()), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1]) if A else 0


def nullspace(A: Matrix) -> list[tuple]:
    """Basis of {v : A v = 0}."""
    rows, cols = shape(A)
    if rows == 0:
        return [tuple(ONE if i == j else ZERO for i in range(cols)) for j in range(cols)]
    R, pivots = rref(A)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(tuple(v))
    return basis


def inverse(A: Matrix) -> Matrix:
    m = len(A)
    if m == 2:
        (a, b), (c, d) = A
        dt = a * d - b * c
        if dt.is_zero():
            raise ZeroDivisionError("singular matrix")
        r = dt.inverse()
        return ((d * r, -b * r), (-c * r, a * r))
    aug = tuple(tuple(row) + tuple(ONE if i == j else ZERO for j in range(m)) for i, row in enumerate(A))
    R, pivots = rref(aug)
    if pivots[:m] != list(range(m)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[m:]) for row in R)


def det(A: Matrix) -> CycRational:
    if len(A) == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    M = [list(row) for row in A]
    m = len(M)
    d = ONE
    for c in range(m):
        p = next((i for i in range(c, m) if not M[i][c].is_zero()), None)
        if p is None:
            return ZERO
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c]
        inv = M[c][c].inverse()
        for i in range(c + 1, m):
            if not M[i][c].is_zero():
                f = M[i][c] * inv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


def echelon_basis(vectors: Sequence[Sequence]) -> tuple[tuple, ...]:
    """Canonical basis (nonzero rows of the RREF) of the span of ``vectors``."""
    vecs = [tuple(as_cyc(c) for c in v) for v in vectors]
    if not vecs:
        return ()
    R, pivots = rref(tuple(vecs))
    return tuple(tuple(R[i]) for i in range(len(pivots)))


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    if not basis:
        return all(as_cyc(c).is_zero() for c in v)
    return rank(tuple(tuple(b) for b in basis) + (tuple(as_cyc(c) for c in v),)) == rank(
        tuple(tuple(b) for b in basis)
    )


def sort_key(A: Matrix):
    """Lexicographic key on the flattened canonical entries."""
    return tuple(c.sort_key() for row in A for c in row)


def commutator(A: Matrix, B: Matrix) -> Matrix:
    """Group commutator A B A^-1 B^-1."""
    return mul(mul(A, B), mul(inverse(A), inverse(B)))
