import random

import sympy
from hypothesis import given
from hypothesis import strategies as st

from modyangian.rtt import lin_comb
from modyangian.series import (compare, constant, generator_matrix, linear, polynomial,
                               series_from_coeffs)

from conftest import basis


def scalar_series(qb, coeffs, var="u"):
    return series_from_coeffs(qb, [{(): c % qb.p} if c % qb.p else {} for c in coeffs], var)


def scalars_of(s):
    return [x.get((), 0) for x in s.coeffs()]


def sympy_shift(coeffs, c, K, p):
    x = sympy.Symbol("x")  # x = 1/u, u - c = (1 - c x) / x
    expr = sum(a * x ** r * (1 - c * x) ** (-r) for r, a in enumerate(coeffs))
    s = sympy.series(expr, x, 0, K + 1).removeO()
    return [int(s.coeff(x, r)) % p for r in range(K + 1)]


@given(st.lists(st.integers(0, 4), min_size=1, max_size=6), st.integers(1, 4))
def test_shift_matches_binomial_expansion(coeffs, c):
    qb = basis(3, 5, 5)
    coeffs = [1] + coeffs[:5]
    K = len(coeffs) - 1
    got = scalars_of(scalar_series(qb, coeffs).shift(c))
    assert got == sympy_shift(coeffs, c, K, 5)


def test_shift_of_polynomial():
    qb = basis(3, 5, 5)
    # (u - v) with v -> v - 2 gives u - v + 2
    s = linear(qb, ("u", "v"), "u", "v").shift(2, "v")
    t = linear(qb, ("u", "v"), "u", "v", c=-2)
    assert s.terms == t.terms


@given(st.lists(st.integers(0, 4), min_size=5, max_size=5))
def test_invert_scalar_series(coeffs):
    qb = basis(3, 5, 5)
    s = scalar_series(qb, [1] + coeffs)
    x = sympy.Symbol("x")
    ser = sympy.series(1 / sum(a * x ** r for r, a in enumerate([1] + coeffs)), x, 0, 6).removeO()
    assert scalars_of(s.invert()) == [int(ser.coeff(x, r)) % 5 for r in range(6)]


def test_invert_generator_series(qb335):
    T = generator_matrix(qb335, 3)
    t11 = T[0, 0]
    one = constant(qb335, 1)
    for a, b in ((t11.mul(t11.invert()), one), (t11.invert().mul(t11), one)):
        compared, _, bad = compare(a, b, 3)
        assert bad is None and compared == 4


def test_compare_reports_first_mismatch(qb335):
    T = generator_matrix(qb335, 3)
    compared, skipped, bad = compare(T[0, 1], T[1, 0], 3)
    assert bad is not None and bad[0] == (1,)
    # off-diagonal series start at u^-1, so exponents 1..3
    assert compared == 3 and skipped == 0


def test_two_variable_region_skips_beyond_degree_cap(qb335):
    T = generator_matrix(qb335, 3)
    uv = T[0, 0].at("u", ("u", "v")).mul(T[1, 1].at("v", ("u", "v")))
    compared, skipped, bad = compare(uv, uv, 3)
    assert bad is None
    # box 0..3 x 0..3, degree budget 5 removes (3, 3)
    assert compared == 15 and skipped == 1


def test_polynomial_times_series(qb335):
    T = generator_matrix(qb335, 3)
    s = polynomial(qb335, ("u",), {(1,): 1}).mul(T[0, 1])
    # u * t12(u) = t12^(1) + t12^(2) u^-1 + ...
    assert s.coeff(0) == qb335.gen(1, 2, 1)
    assert s.coeff(1) == qb335.gen(1, 2, 2)


@given(st.integers(0, 10 ** 6))
def test_series_multiplication_is_associative(seed):
    qb = basis(3, 3, 5)
    rng = random.Random(seed)
    T = generator_matrix(qb, 2)
    a, b, c = (T[rng.randrange(3), rng.randrange(3)] for _ in range(3))
    lhs = a.mul(b).mul(c)
    rhs = a.mul(b.mul(c))
    assert compare(lhs, rhs, 2)[2] is None


def test_linear_combination_helper():
    assert lin_comb([(1, {(1,): 2}), (1, {(1,): 1})], 3) == {}
