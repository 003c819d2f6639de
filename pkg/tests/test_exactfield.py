from fractions import Fraction

import pytest
from hypothesis import given

from lie3cert.exactfield import (
    I, ONE, R2, R3, R6, ZERO, FieldElement, NotReal, ZeroInverse, as_fe, fe_arith, fe_conj, fe_inv,
    fe_real_sign, format_fe, parse_fe,
)

from conftest import field_elements, nonzero_elements, real_elements


def test_defining_relations():
    assert fe_arith(I, I, "mul") == -ONE
    assert fe_arith(R2, R3, "mul") == R6
    assert fe_arith((1 + I) / 2, 1 - I, "mul") == ONE
    assert R6 * R6 == as_fe(6)


def test_inverse_examples():
    assert fe_inv(ONE) == ONE
    assert fe_inv(I) == -I
    x = 1 + R2
    y = fe_inv(x)
    assert y == R2 - 1
    assert fe_arith(x, y, "mul") == ONE


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInverse):
        fe_inv(ZERO)
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_conj_examples():
    assert fe_conj(I) == -I
    assert fe_conj(3 + I * R2) == 3 - I * R2
    x, y = 1 + I, R3 - I * R6
    assert fe_conj(x * y) == fe_conj(x) * fe_conj(y)


def test_real_sign_examples():
    assert fe_real_sign(ZERO) == 0
    assert fe_real_sign(1 - R2) == -1
    assert fe_real_sign(3 - R2 - R3 + R6) == 1
    with pytest.raises(NotReal):
        fe_real_sign(I)


def test_lowest_terms():
    x = FieldElement((2, 4, 0, 0, 0, 0, 0, 6), -4)
    assert x.den == 2 and x.nums == (-1, -2, 0, 0, 0, 0, 0, -3)
    assert FieldElement.rational(Fraction(6, 4)).coords[0] == Fraction(3, 2)


def test_parse_and_format_roundtrip():
    for text in ["0", "1", "-1/2", "r2", "1 + (r6)*i", "(1/3)*i"]:
        assert format_fe(parse_fe(text)) == text
    assert parse_fe("(1+i)/2") == (1 + I) / 2


@given(field_elements, field_elements, field_elements)
def test_ring_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == ZERO


@given(nonzero_elements)
def test_every_nonzero_element_is_invertible(x):
    assert x * x.inv() == ONE


@given(field_elements, field_elements)
def test_conjugation_is_an_involutive_automorphism(x, y):
    assert x.conj().conj() == x
    assert (x * y).conj() == x.conj() * y.conj()
    assert (x + y).conj() == x.conj() + y.conj()


@given(field_elements)
def test_conj_fixes_exactly_the_real_part(x):
    assert (x.conj() == x) == x.is_real()
    assert x.real_part() + I * x.imag_part() == x


@given(real_elements, real_elements)
def test_real_sign_is_consistent_with_floats(x, y):
    s = fe_real_sign(x * y)
    assert s == fe_real_sign(x) * fe_real_sign(y)
    approx = float(sum(c * w for c, w in zip(x.coords[:4], (1, 2 ** .5, 3 ** .5, 6 ** .5))))
    if abs(approx) > 1e-9:
        assert fe_real_sign(x) == (1 if approx > 0 else -1)


@given(field_elements)
def test_format_parse_roundtrip(x):
    assert parse_fe(format_fe(x)) == x
