"""Gaussian generators of X(o_N) and the series built from them: k_i, e_i,
f_i, h_{i down l}, h_{i up l}, b_i, a_i, c, bc, p_ij, q_ji and the helper
fractions used for the e_n / h_{n+1} identities in type B."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Tuple

from .rtt import QuotientBasis
from .series import (MultiSeries, NcSeries, SeriesMatrix, compare, constant, gauss_decompose,
                     generator_matrix, linear)


def rank_and_type(N: int) -> Tuple[int, str]:
    if N < 3:
        raise ValueError("N must be at least 3")
    return N // 2, ("B" if N % 2 else "D")


def index_set_I(N: int) -> List[Tuple[int, int]]:
    """Pairs (i, j) whose e_ij(u)^p gives the off-diagonal central series."""
    n, typ = rank_and_type(N)
    pr = lambda i: N + 1 - i
    if typ == "D":
        return [(i, j) for i in range(1, N + 1) for j in range(1, N + 1) if i < j < pr(i)]
    I1 = [(i, j) for i in range(1, N + 1) for j in range(1, N + 1)
          if i < j < pr(i) and not (j == n + 1 and i < n)]
    I2 = [(n + 1, j) for j in range(1, N + 1) if pr(n) < j <= pr(1)]
    return I1 + I2


class Roots:
    """Simple roots of o_N in the epsilon basis; epsilon_{n+1} = 0."""

    def __init__(self, N: int):
        self.N = N
        self.n, self.type = rank_and_type(N)

    def eps(self, i: int) -> List[int]:
        v = [0] * self.n
        if 1 <= i <= self.n:
            v[i - 1] = 1
        return v

    def alpha(self, i: int) -> List[int]:
        n = self.n
        if not 1 <= i <= n:
            raise ValueError(f"no simple root alpha_{i}")
        if i < n:
            a, b = self.eps(i), self.eps(i + 1)
            return [x - y for x, y in zip(a, b)]
        if self.type == "B":
            return self.eps(n)
        a, b = self.eps(n - 1), self.eps(n)
        return [x + y for x, y in zip(a, b)]

    @staticmethod
    def form(a, b) -> int:
        return sum(x * y for x, y in zip(a, b))

    def eps_alpha(self, i: int, j: int) -> int:
        return self.form(self.eps(i), self.alpha(j))

    def alpha_alpha(self, i: int, j: int) -> int:
        return self.form(self.alpha(i), self.alpha(j))

    def cartan(self, i: int, j: int) -> int:
        c = self.alpha_alpha(i, j)
        if self.type == "B" and i == self.n:
            c *= 2
        return c


class GaussianSet:
    """All Gaussian series of X(o_N) truncated at u^{-K}."""

    def __init__(self, qb: QuotientBasis, K: int, T: Optional[SeriesMatrix] = None):
        if K > qb.D:
            raise ValueError(f"K={K} exceeds D={qb.D}")
        self.qb = qb
        self.N = qb.N
        self.p = qb.p
        self.K = K
        self.n, self.type = rank_and_type(qb.N)
        self.roots = Roots(qb.N)
        self.T = T if T is not None else generator_matrix(qb, K)
        F, H, E = gauss_decompose(self.T)
        self.F, self.H, self.E = F, H, E
        N = self.N
        self.h_series: Dict[int, NcSeries] = {i: H[i - 1, i - 1] for i in range(1, N + 1)}
        self.e_series: Dict[Tuple[int, int], NcSeries] = {
            (i, j): E[i - 1, j - 1] for i in range(1, N + 1) for j in range(i + 1, N + 1)}
        self.f_series: Dict[Tuple[int, int], NcSeries] = {
            (j, i): F[j - 1, i - 1] for i in range(1, N + 1) for j in range(i + 1, N + 1)}
        self._cache: Dict[tuple, NcSeries] = {}

    def _memo(self, key, build):
        got = self._cache.get(key)
        if got is None:
            got = build()
            self._cache[key] = got
        return got

    # -- basic series ------------------------------------------------------

    def h(self, i: int) -> NcSeries:
        return self.h_series[i]

    def ht(self, i: int) -> NcSeries:
        return self._memo(("ht", i), lambda: self.h(i).invert())

    def e_ij(self, i: int, j: int) -> NcSeries:
        return self.e_series[(i, j)]

    def f_ji(self, j: int, i: int) -> NcSeries:
        return self.f_series[(j, i)]

    def _check_simple(self, i: int):
        if not 1 <= i <= self.n:
            raise ValueError(f"index {i} outside 1..{self.n}")

    def e(self, i: int) -> NcSeries:
        self._check_simple(i)
        if self.type == "D" and i == self.n:
            return self.e_ij(self.n - 1, self.n + 1)
        return self.e_ij(i, i + 1)

    def f(self, i: int) -> NcSeries:
        self._check_simple(i)
        if self.type == "D" and i == self.n:
            return self.f_ji(self.n + 1, self.n - 1)
        return self.f_ji(i + 1, i)

    def e_circ(self, i: int) -> NcSeries:
        return self.e(i).drop([(1,)])

    def f_circ(self, i: int) -> NcSeries:
        return self.f(i).drop([(1,)])

    def k(self, i: int) -> NcSeries:
        self._check_simple(i)
        if self.type == "D" and i == self.n:
            return self._memo(("k", i), lambda: self.ht(self.n - 1).mul(self.h(self.n + 1)))
        return self._memo(("k", i), lambda: self.ht(i).mul(self.h(i + 1)))

    # -- products of shifted h's -------------------------------------------

    def h_down(self, i: int, ell: int) -> NcSeries:
        def build():
            out = constant(self.qb, 1, ("u",))
            for s in range(ell):
                out = out.mul(self.h(i).shift(s))
            return out
        return self._memo(("down", i, ell), build)

    def h_up(self, i: int, ell: int) -> NcSeries:
        def build():
            out = constant(self.qb, 1, ("u",))
            for s in range(ell):
                out = out.mul(self.h(i).shift(-s))
            return out
        return self._memo(("up", i, ell), build)

    def b(self, i: int) -> NcSeries:
        return self.h_down(i, self.p)

    def a_product(self, i: int) -> NcSeries:
        def build():
            out = constant(self.qb, 1, ("u",))
            for s in range(self.p):
                out = out.mul(self.k(i).shift(s))
            return out
        return self._memo(("a", i), build)

    def a_quotient(self, i: int) -> NcSeries:
        self._check_simple(i)
        n = self.n
        if i < n:
            top, bottom = i + 1, i
        elif self.type == "B":
            top, bottom = n + 1, n
        else:
            top, bottom = n + 1, n - 1
        return self._memo(("aq", i), lambda: self.b(top).mul(self.b(bottom).invert()))

    def a(self, i: int) -> NcSeries:
        return self.a_product(i)

    # -- Harish-Chandra series ---------------------------------------------

    def c_rtt_matrix(self) -> SeriesMatrix:
        """M = T(u - kappa) T^t(u) with T^t_{ij} = t_{j'i'}(u)."""
        def build():
            N = self.N
            kappa = self.qb.kappa
            T = self.T
            Tk = T.map(lambda s: s.shift(kappa))
            Tt = SeriesMatrix([[T[N - 1 - j, N - 1 - i] for j in range(N)] for i in range(N)])
            return Tk.mul(Tt)
        return self._memo(("cM",), build)

    def c_rtt(self) -> NcSeries:
        return self.c_rtt_matrix()[0, 0]

    def c_drinfeld(self) -> NcSeries:
        def build():
            n = self.n
            out = constant(self.qb, 1, ("u",))
            last = n if self.type == "B" else n - 1
            for i in range(1, last + 1):
                out = out.mul(self.h(i).shift(i - 1)).mul(self.h(i).shift(i).invert())
            if self.type == "B":
                out = out.mul(self.h(n + 1).shift(Fraction(2 * n - 1, 2))).mul(self.h(n + 1).shift(n))
            else:
                out = out.mul(self.h(n).shift(n - 1)).mul(self.h(n + 1).shift(n - 1))
            return out
        return self._memo(("cD",), build)

    def bc_product(self) -> NcSeries:
        def build():
            c = self.c_rtt()
            out = constant(self.qb, 1, ("u",))
            for s in range(self.p):
                out = out.mul(c.shift(s))
            return out
        return self._memo(("bc",), build)

    def bc_from_b(self) -> NcSeries:
        n = self.n
        if self.type == "B":
            return self.b(n + 1).mul(self.b(n + 1))
        return self.b(n).mul(self.b(n + 1))

    # -- off-diagonal central series ---------------------------------------

    def p_series(self, i: int, j: int) -> NcSeries:
        return self._memo(("p", i, j), lambda: pth_power(self.e_ij(i, j), self.p))

    def q_series(self, j: int, i: int) -> NcSeries:
        return self._memo(("q", j, i), lambda: pth_power(self.f_ji(j, i), self.p))

    def e_tilde_B(self) -> NcSeries:
        """e_{n+1,n+2}(u/2) in type B."""
        if self.type != "B":
            raise ValueError("only defined in type B")
        n = self.n
        return self.e_ij(n + 1, n + 2).rescale(2)

    # -- helper fractions (type B) -----------------------------------------

    def H_numerator(self, m: int, vars=("u", "v")) -> MultiSeries:
        """Numerator of the helper H^m_{v,u} over the denominator
        (2(u-v))^m * 2(v-u-1)."""
        self._require_B()
        qb, n = self.qb, self.n
        u, v = vars
        e_u = self.e(n).at(u, vars)
        e_v = self.e(n).at(v, vars)
        e_v1 = self.e(n).shift(1).at(v, vars)
        hv = self.h(n + 1).at(v, vars)
        d = e_v - e_u
        two_vu1 = linear(qb, vars, v, u, 1, scale_by=2)
        two_uv = linear(qb, vars, u, v, 0, scale_by=2)
        out = hv.mul(d.power(m)).mul(two_vu1).scale(factorial(m))
        if m >= 1:
            second = (e_v1 - e_u).mul(hv).mul(d.power(m - 1)).mul(two_uv)
            out = out + second.scale(m * factorial(m - 1))
        return out

    def H_tilde_numerator(self, m: int, vars=("u", "v")) -> MultiSeries:
        """Numerator of the helper tilde-H^{m-1}_{v,u} over the denominator
        2 * (2(u-v))^{m-1} * 2(v-u-1); requires m >= 1."""
        self._require_B()
        if m < 1:
            raise ValueError("m must be at least 1")
        qb, n = self.qb, self.n
        u, v = vars
        e_u = self.e(n).at(u, vars)
        e_v = self.e(n).at(v, vars)
        e_v1 = self.e(n).shift(1).at(v, vars)
        hv = self.h(n + 1).at(v, vars)
        htv = self.ht(n).at(v, vars)
        d = e_v - e_u
        two_vu1 = linear(qb, vars, v, u, 1, scale_by=2)
        two_uv = linear(qb, vars, u, v, 0, scale_by=2)
        out = hv.mul(d.power(m - 1)).mul(htv).mul(two_vu1).scale(factorial(m + 1))
        if m >= 2:
            second = (e_v1 - e_u).mul(hv).mul(d.power(m - 2)).mul(htv).mul(two_uv)
            out = out + second.scale((m - 1) * factorial(m))
        return out

    def _require_B(self):
        if self.type != "B":
            raise ValueError("helper series are defined for N = 2n + 1 only")


def build_gaussian(N: int, qb: QuotientBasis, K: int) -> GaussianSet:
    if qb.N != N:
        raise ValueError("quotient was built for a different N")
    return GaussianSet(qb, K)


def pth_power(s: NcSeries, p: int) -> NcSeries:
    out = constant(s.qb, 1, s.vars)
    for _ in range(p):
        out = out.mul(s)
    return out


def h_down(gs: GaussianSet, i: int, ell: int) -> NcSeries:
    return gs.h_down(i, ell)


def h_up(gs: GaussianSet, i: int, ell: int) -> NcSeries:
    return gs.h_up(i, ell)


def b_series(gs: GaussianSet, i: int) -> NcSeries:
    return gs.b(i)


def a_series(gs: GaussianSet, i: int) -> NcSeries:
    return gs.a(i)


def c_series_rtt(gs: GaussianSet) -> NcSeries:
    return gs.c_rtt()


def c_series_drinfeld(gs: GaussianSet) -> NcSeries:
    return gs.c_drinfeld()


def bc_series(gs: GaussianSet) -> NcSeries:
    return gs.bc_product()


def p_series(gs: GaussianSet, i: int, j: int) -> NcSeries:
    return gs.p_series(i, j)


def q_series(gs: GaussianSet, j: int, i: int) -> NcSeries:
    return gs.q_series(j, i)


def scalar_matrix_defect(M: SeriesMatrix, box_cap: int):
    """First (i, j, exponent) where M fails to be a scalar matrix, or None."""
    N = M.N
    zero = constant(M[0, 0].qb, 0, M[0, 0].vars)
    for i in range(N):
        for j in range(N):
            target = M[0, 0] if i == j else zero
            _, _, bad = compare(M[i, j], target, box_cap)
            if bad is not None:
                return (i + 1, j + 1, bad[0])
    return None
