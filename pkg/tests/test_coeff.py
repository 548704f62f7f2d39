from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import sympy_field_mul, to_complex
from jetgroups.coeff import I, ONE, SQRT2, Z8, ZERO, CycRational, embed
from jetgroups.parsing import parse_value

rationals = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))
elements = st.builds(CycRational, rationals, rationals, rationals, rationals)


def test_i_squared():
    assert I * I == -ONE


def test_sqrt2_squared():
    assert SQRT2 * SQRT2 == CycRational(2)


def test_z8_order_eight():
    p = ONE
    for _ in range(8):
        p = p * Z8
    assert p == ONE
    assert Z8 ** 4 == -ONE


def test_inverse_examples():
    assert ONE.inverse() == ONE
    assert Z8.inverse() == -(Z8 ** 3)
    assert ((ONE + I) / 2).inverse() == ONE - I


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_embed():
    assert embed("3/2").coords == (Fraction(3, 2), 0, 0, 0)
    assert embed("i").coords == (0, 0, 1, 0)
    assert embed("sqrt2").coords == (0, 1, 0, -1)
    assert embed("zeta8").coords == (0, 1, 0, 0)
    assert embed("i") ** 2 == CycRational(-1)
    assert embed("sqrt2") * embed("sqrt2") == CycRational(2)


def test_generator_entry_identity():
    # (1 + i) / sqrt2 is a primitive 8th root of unity
    assert (ONE + I) / SQRT2 == Z8


def test_canonical_form():
    a = CycRational(Fraction(2, 4), Fraction(-3, 6), 0, 0)
    assert a.coords == (Fraction(1, 2), Fraction(-1, 2), 0, 0)
    assert a.denominator == 2
    assert a.numerators == (1, -1, 0, 0)


def test_hash_matches_fraction():
    assert hash(CycRational(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert CycRational(3) == 3


@settings(max_examples=1000, deadline=None)
@given(elements, elements, elements)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a and a * ONE == a
    assert a - a == ZERO
    if not a.is_zero():
        assert a * a.inverse() == ONE


@settings(max_examples=300, deadline=None)
@given(elements, elements)
def test_mul_against_polynomial_remainder(a, b):
    assert a * b == sympy_field_mul(a, b)


@settings(max_examples=300, deadline=None)
@given(elements)
def test_inverse_against_complex_embedding(a):
    if a.is_zero():
        return
    z = to_complex(a)
    w = to_complex(a.inverse())
    assert abs(z * w - 1) < 1e-6


@settings(max_examples=200, deadline=None)
@given(elements)
def test_galois_conjugation_is_a_ring_map(a):
    b = a * a + Z8
    for k in (3, 5, 7):
        assert (a * b).conjugate_by(k) == a.conjugate_by(k) * b.conjugate_by(k)


@settings(max_examples=300, deadline=None)
@given(elements)
def test_json_and_text_round_trip(a):
    assert CycRational.from_json(a.to_json()) == a
    assert CycRational.from_json(a.to_json()).to_json() == a.to_json()
    assert parse_value(str(a), "scalar") == a


def test_negative_powers():
    assert Z8 ** -1 == Z8.inverse()
    assert (SQRT2 ** -2) == CycRational(Fraction(1, 2))
