from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from modyangian.scalars import FieldError, PrimeField, binom_mod_p, embed_rational, is_prime


def test_is_prime_matches_sympy():
    for n in range(-3, 400):
        assert is_prime(n) == sympy.isprime(n)


def test_field_rejects_two_and_composites():
    for bad in (2, 1, 0, 9, 15):
        with pytest.raises(FieldError):
            PrimeField(bad)


def test_half_and_kappa():
    F = PrimeField(3)
    assert 2 * F.half() % 3 == 1
    # kappa = N/2 - 1
    assert F.kappa(3) == F.frac(1, 2)
    assert F.kappa(4) == 1
    assert F.kappa(6) == 2
    assert PrimeField(5).kappa(5) == embed_rational(3, 2, 5)


def test_embed_rational_needs_unit_denominator():
    with pytest.raises(FieldError):
        embed_rational(1, 3, 3)


@given(st.integers(0, 60), st.integers(0, 60), st.sampled_from([3, 5, 7]))
def test_lucas_matches_integer_binomial(n, k, p):
    expected = comb(n, k) % p if k <= n else 0
    assert binom_mod_p(n, k, p) == expected


@given(st.integers(-50, 50), st.integers(1, 50), st.sampled_from([3, 5, 7, 11]))
def test_embedding_is_a_ring_map(a, b, p):
    if b % p == 0:
        return
    F = PrimeField(p)
    x = F.frac(a, b)
    assert x * b % p == a % p
    y = Fraction(a, b) * Fraction(a, b)
    assert F.frac(y.numerator, y.denominator) == x * x % p


@given(st.integers(1, 100), st.sampled_from([3, 5, 7]))
def test_inverse(a, p):
    F = PrimeField(p)
    if a % p:
        assert a * F.inv(a) % p == 1
    else:
        with pytest.raises(FieldError):
            F.inv(a)
