import itertools
import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from modyangian.rtt import (DegreeOverflow, GenTable, IdealCollapse, QuotientBasis, RelationSet,
                            close_ideal, generate_rtt_relations, lin_comb, prime, rtt_coefficient,
                            sub)
from modyangian.scalars import PrimeField

from conftest import basis


# -- oracle: sympy expansion of the cleared matrix identity ------------------

def _oracle_entries(N, R, kappa):
    """(u-v)(u-v-kappa) R(u-v) T1(u) T2(v) - T2(v) T1(u) (same), with
    R(x) = 1 - P/x + Q/(x - kappa), built from Kronecker products."""
    u, v = sympy.symbols("u v")
    t = {(i, j, r): sympy.Symbol(f"t_{i}_{j}_{r}", commutative=False)
         for i in range(1, N + 1) for j in range(1, N + 1) for r in range(1, R + 1)}

    def T(x):
        return sympy.Matrix(N, N, lambda a, b: (1 if a == b else 0)
                            + sum(t[(a + 1, b + 1, r)] * x ** (-r) for r in range(1, R + 1)))

    I = sympy.eye(N)
    E = lambda a, b: sympy.Matrix(N, N, lambda x, y: 1 if (x, y) == (a, b) else 0)
    P = sum((sympy.kronecker_product(E(a, b), E(b, a)) for a in range(N) for b in range(N)),
            sympy.zeros(N * N))
    Q = sum((sympy.kronecker_product(E(a, b), E(N - 1 - a, N - 1 - b))
             for a in range(N) for b in range(N)), sympy.zeros(N * N))
    x = u - v
    Rt = x * (x - kappa) * sympy.eye(N * N) - (x - kappa) * P + x * Q
    T1 = sympy.kronecker_product(T(u), I)
    T2 = sympy.kronecker_product(I, T(v))
    return u, v, t, Rt, T1, T2


def _coefficients(expr, u, v):
    out = {}
    for term in sympy.Add.make_args(sympy.expand(expr)):
        c, nc = term.args_cnc()
        c = sympy.Mul(*c)
        m = sympy.degree(c.subs(v, 1) * u ** 10, u) - 10 if c.has(u) else 0
        n = sympy.degree(c.subs(u, 1) * v ** 10, v) - 10 if c.has(v) else 0
        scal = c / (u ** m * v ** n)
        out.setdefault((m, n), []).append((int(scal), tuple(nc)))
    return out


def _factors(f):
    if isinstance(f, sympy.Pow):
        return [f.base] * int(f.exp)
    return [f]


@pytest.mark.parametrize("entry", [(1, 1, 1, 1), (1, 2, 2, 1), (1, 3, 3, 1), (2, 1, 2, 3),
                                   (1, 2, 3, 2)])
def test_relation_coefficients_match_matrix_expansion(entry):
    N, p, R = 3, 5, 3
    F = PrimeField(p)
    kappa = sympy.Rational(N - 2, 2)
    u, v, t, Rt, T1, T2 = _oracle_entries(N, R, kappa)
    i, j, k, l = entry
    row, col = (i - 1) * N + (k - 1), (j - 1) * N + (l - 1)
    lhs = (Rt * T1 * T2)[row, col] - (T2 * T1 * Rt)[row, col]
    # kappa = 1/2 only appears in scalars; scale by 2 to keep integers
    coeffs = _coefficients(2 * lhs, u, v)
    table = GenTable(N, R)
    code = {s: table.code(*key) for key, s in t.items()}
    for m, n in itertools.product(range(-1, 3), repeat=2):
        expected = {}
        for c, nc in coeffs.get((m, n), []):
            w = tuple(code[s] for f in nc for s in _factors(f))
            expected[w] = (expected.get(w, 0) + c * F.inv(2)) % p
        expected = {w: c for w, c in expected.items() if c}
        got = rtt_coefficient(table, N, p, F.kappa(N), i, j, k, l, m, n)
        assert got == expected, (m, n)


# -- closure ----------------------------------------------------------------

def expected_dims(N, D):
    x = sympy.Symbol("x")
    g = N * (N - 1) // 2 + 1
    f = sympy.prod([(1 - x ** r) ** (-g) for r in range(1, D + 1)])
    s = sympy.series(f, x, 0, D + 1).removeO()
    return [int(s.coeff(x, d)) for d in range(D + 1)]


@pytest.mark.parametrize("N,p,D", [(3, 3, 5), (4, 3, 5), (3, 5, 5), (4, 5, 4)])
def test_pbw_dimensions(N, p, D):
    qb = basis(N, p, D)
    assert qb.dimensions() == expected_dims(N, D)
    assert qb.expected_dimensions() == expected_dims(N, D)
    assert qb.complete_degree == D


def test_known_dimensions_n3():
    assert basis(3, 3, 5).dimensions() == [1, 4, 14, 40, 105, 252]


def test_c_symmetry_emerges(qb335):
    N, p = 3, 3
    c1 = lin_comb([(1, qb335.raw_gen(1, 1, 1)), (1, qb335.raw_gen(3, 3, 1))], p)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            x = lin_comb([(1, qb335.raw_gen(i, j, 1)),
                          (1, qb335.raw_gen(prime(j, N), prime(i, N), 1))], p)
            if i == j:
                x = sub(x, c1, p)
            assert qb335.normal_form(x) == {}


def test_degree_one_bracket(qb335):
    # [t12^(1), t21^(1)] = t11^(1) - t22^(1)
    c = qb335.commutator(qb335.gen(1, 2, 1), qb335.gen(2, 1, 1))
    assert c == qb335.normal_form(sub(qb335.raw_gen(1, 1, 1), qb335.raw_gen(2, 2, 1), 3))


def test_every_relation_reduces_to_zero(qb335):
    rels = generate_rtt_relations(3, 5, 3).encoded_for(qb335.table)
    assert len(rels) > 0
    for rel in rels:
        assert qb335.normal_form(rel.elem) == {}


def test_standard_generators_n3(qb335):
    t = qb335.table
    names = sorted(t.decode(g)[:2] for g in qb335.standard_generators(2))
    assert names == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_degree_overflow(qb335):
    with pytest.raises(DegreeOverflow):
        qb335.mul(qb335.gen(1, 2, 3), qb335.gen(2, 1, 3))


def test_budget(qb335):
    from modyangian.rtt import BudgetExceeded
    with pytest.raises(BudgetExceeded):
        close_ideal(None, 3, 3, 3, max_rules=10)


def test_collapse_is_detected():
    # adding the constant 1 as a relation generates everything
    rels = generate_rtt_relations(3, 2, 3)
    from modyangian.rtt import Relation
    rels.relations.append(Relation({(): 1}, (0, 0, 0, 0, 0, 0), 1))
    with pytest.raises(IdealCollapse):
        close_ideal(rels, 3, 3, 2)


def test_rules_never_raise_filtration_degree(qb335):
    fd = qb335.table.filtration_degree
    for lead, tail in qb335.rules.items():
        for w in tail:
            assert fd(w) <= fd(lead)


# -- properties ---------------------------------------------------------------

def random_elem(qb, rng, degree, terms=3):
    words = qb.complement_basis(degree)
    words = [w for w in words if qb.table.loop_degree(w) <= degree]
    return {w: rng.randrange(1, qb.p) for w in rng.sample(words, min(terms, len(words)))}


@given(st.integers(0, 10 ** 6))
def test_normal_form_is_idempotent_and_linear(seed):
    qb = basis(3, 3, 5)
    rng = random.Random(seed)
    t = qb.table
    raw = {tuple(t.code(rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 2))
                 for _ in range(rng.randint(1, 2))): rng.randrange(1, 3) for _ in range(3)}
    nf = qb.normal_form(raw)
    assert qb.normal_form(nf) == nf
    assert all(qb.is_standard(w) for w in nf)
    y = random_elem(qb, rng, 2)
    assert qb.normal_form(lin_comb([(1, raw), (2, y)], 3)) == lin_comb([(1, nf), (2, y)], 3)


@given(st.integers(0, 10 ** 6))
def test_multiplication_is_associative(seed):
    qb = basis(3, 3, 5)
    rng = random.Random(seed)
    a, b, c = (random_elem(qb, rng, 1), random_elem(qb, rng, 2), random_elem(qb, rng, 2))
    assert qb.mul(qb.mul(a, b), c) == qb.mul(a, qb.mul(b, c))
