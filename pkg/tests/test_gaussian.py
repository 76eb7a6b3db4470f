import pytest
from sympy.liealgebras.cartan_matrix import CartanMatrix

from modyangian.gaussian import GaussianSet, Roots, index_set_I, rank_and_type
from modyangian.series import (compare, constant, generator_matrix, quasideterminant_e,
                               quasideterminant_f, quasideterminant_h)


def assert_series_equal(a, b, box=3):
    compared, _, bad = compare(a, b, box)
    assert bad is None, bad
    return compared


@pytest.mark.parametrize("N,name", [(5, "B2"), (7, "B3"), (9, "B4"), (6, "D3"), (8, "D4")])
def test_cartan_matrix(N, name):
    R = Roots(N)
    ours = [[R.cartan(i, j) for j in range(1, R.n + 1)] for i in range(1, R.n + 1)]
    # sympy writes a_ij = <alpha_i, alpha_j^vee>; ours is the transpose
    ref = CartanMatrix(name).T.tolist()
    assert ours == ref


def test_rank_and_type():
    assert rank_and_type(3) == (1, "B")
    assert rank_and_type(4) == (2, "D")
    assert rank_and_type(7) == (3, "B")
    with pytest.raises(ValueError):
        rank_and_type(2)


def test_index_set():
    assert index_set_I(4) == [(1, 2), (1, 3)]
    assert index_set_I(3) == [(1, 2)]
    assert sorted(index_set_I(5)) == [(1, 2), (1, 4), (2, 3), (3, 5)]


@pytest.mark.parametrize("N", range(3, 12))
def test_index_set_counts_positive_roots(N):
    n, typ = rank_and_type(N)
    positive = n * n if typ == "B" else n * (n - 1)
    assert len(index_set_I(N)) == positive


@pytest.mark.parametrize("fixture", ["gs335", "gs435"])
def test_gauss_product_recovers_T(fixture, request):
    gs = request.getfixturevalue(fixture)
    prod = gs.F.mul(gs.H).mul(gs.E)
    for i in range(gs.N):
        for j in range(gs.N):
            assert_series_equal(prod[i, j], gs.T[i, j])


def test_quasideterminants(gs435):
    T = gs435.T
    for i in (1, 2, 3):
        assert_series_equal(gs435.h(i), quasideterminant_h(T, i))
    for i, j in ((1, 2), (1, 4), (2, 3), (2, 4)):
        assert_series_equal(gs435.e_ij(i, j), quasideterminant_e(T, i, j))
    for j, i in ((2, 1), (4, 1), (3, 2)):
        assert_series_equal(gs435.f_ji(j, i), quasideterminant_f(T, j, i))


def test_h1_is_t11(gs335):
    assert gs335.h(1).coeffs() == gs335.T[0, 0].coeffs()


def test_e12_leading_coefficient(gs335):
    assert gs335.e(1).coeff(1) == gs335.qb.gen(1, 2, 1)
    assert gs335.f(1).coeff(1) == gs335.qb.gen(2, 1, 1)


def test_ht_inverts_h(gs435):
    one = constant(gs435.qb, 1)
    for i in range(1, 5):
        assert_series_equal(gs435.h(i).mul(gs435.ht(i)), one)


def test_type_d_last_simple_root(gs435):
    assert gs435.e(2) is gs435.e_ij(1, 3)
    assert gs435.f(2) is gs435.f_ji(3, 1)


def test_e_circ_drops_first_coefficient(gs335):
    assert gs335.e_circ(1).terms.get((1,)) is None
    assert gs335.e_circ(1).terms.get((2,)) == gs335.e(1).terms.get((2,))


def test_c_matrix_is_scalar(gs335):
    from modyangian.gaussian import scalar_matrix_defect
    assert scalar_matrix_defect(gs335.c_rtt_matrix(), 3) is None


def test_c_agrees_with_gaussian_product(gs335, gs435):
    for gs in (gs335, gs435):
        assert_series_equal(gs.c_rtt(), gs.c_drinfeld())


def test_h_down_and_up_are_shifted_products(gs335):
    h = gs335.h(1)
    assert_series_equal(gs335.h_down(1, 2), h.mul(h.shift(1)))
    assert_series_equal(gs335.h_up(1, 2), h.mul(h.shift(-1)))


def test_generator_matrix_rejects_large_K(qb335):
    with pytest.raises(ValueError):
        generator_matrix(qb335, 6)
    with pytest.raises(ValueError):
        GaussianSet(qb335, 6)
