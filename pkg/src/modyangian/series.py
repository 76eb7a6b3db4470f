"""Truncated series in u^{-1} (and several variables) with coefficients in
the truncated quotient, plus matrices of such series and Gauss
decomposition.

A term ``{(a, b): x}`` of a series in variables ``(u, v)`` stands for
``x u^{-a} v^{-b}``; negative exponents are polynomial factors.  Every
series carries

* ``caps``: coefficient at exponent ``e`` is exact whenever ``e[k] <= caps[k]``
  for every variable (``None`` means no limit);
* ``low``: a lower bound for the exponents that can occur (``None`` when the
  series is known to be zero);
* ``off``: coefficients at ``e`` have loop degree ``<= sum(e) + off``.

Only coefficients with ``sum(e) + off <= D`` are ever computed, so every
stored coefficient is exact and nothing beyond the quotient's degree cap is
fabricated.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .rtt import AlgElem, QuotientBasis, add_into, scale, sub
from .scalars import binom_mod_p

Exp = Tuple[int, ...]


def _min_cap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _cap_plus(cap, low):
    if cap is None or low is None:
        return None
    return cap + low


def _to_scalar(c, p: int) -> int:
    if isinstance(c, Fraction):
        if c.denominator % p == 0:
            raise ValueError(f"{c} is not defined mod {p}")
        return c.numerator * pow(c.denominator, -1, p) % p
    return int(c) % p


class MultiSeries:
    """Series in one or more formal variables with quotient coefficients."""

    def __init__(self, qb: QuotientBasis, vars: Sequence[str], terms: Dict[Exp, AlgElem],
                 caps: Sequence[Optional[int]], low: Sequence[Optional[int]], off: int = 0):
        self.qb = qb
        self.vars = tuple(vars)
        self.caps = tuple(caps)
        self.low = tuple(low)
        self.off = off
        self.terms = {e: x for e, x in terms.items() if x}

    # -- construction helpers ---------------------------------------------

    @property
    def p(self) -> int:
        return self.qb.p

    @property
    def budget(self) -> int:
        return self.qb.D - self.off

    def _new(self, vars, terms, caps, low, off):
        if len(vars) == 1:
            return NcSeries(self.qb, vars, terms, caps, low, off)
        return MultiSeries(self.qb, vars, terms, caps, low, off)

    def is_zero_structurally(self) -> bool:
        return any(l is None for l in self.low)

    def in_region(self, e: Exp) -> bool:
        if sum(e) > self.budget:
            return False
        for c, x in zip(self.caps, e):
            if c is not None and x > c:
                return False
        return True

    def coeff(self, e: Exp) -> AlgElem:
        if not self.in_region(e):
            raise KeyError(f"exponent {e} is outside the exact region of this series")
        return self.terms.get(tuple(e), {})

    # -- variables ----------------------------------------------------------

    def embed(self, vars: Sequence[str]) -> "MultiSeries":
        """View the series inside a larger variable set (new variables have
        exponent 0, no cap)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = [v for v in self.vars if v not in vars]
        if missing:
            raise ValueError(f"variables {missing} not in {vars}")
        pos = [self.vars.index(v) if v in self.vars else None for v in vars]
        terms = {tuple(e[k] if k is not None else 0 for k in pos): x for e, x in self.terms.items()}
        caps = [self.caps[k] if k is not None else None for k in pos]
        zero = self.is_zero_structurally()
        low = [None if zero else (self.low[k] if k is not None else 0) for k in pos]
        return self._new(vars, terms, caps, low, self.off)

    def rename(self, mapping: Dict[str, str]) -> "MultiSeries":
        vars = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(vars)) != len(vars):
            raise ValueError("renaming would merge variables")
        return self._new(vars, dict(self.terms), self.caps, self.low, self.off)

    def at(self, var: str, vars: Optional[Sequence[str]] = None) -> "MultiSeries":
        """Univariate series evaluated at ``var``, optionally embedded."""
        if len(self.vars) != 1:
            raise ValueError("at() needs a univariate series")
        s = self.rename({self.vars[0]: var})
        return s.embed(vars) if vars is not None else s

    def _align(self, other: "MultiSeries"):
        if self.vars == other.vars:
            return self, other
        vars = tuple(self.vars) + tuple(v for v in other.vars if v not in self.vars)
        return self.embed(vars), other.embed(vars)

    # -- linear structure ---------------------------------------------------

    def __add__(self, other):
        return self._lin(other, 1)

    def __sub__(self, other):
        return self._lin(other, -1)

    def __radd__(self, other):
        return self.__add__(other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def _lin(self, other, sign: int):
        if not isinstance(other, MultiSeries):
            other = constant(self.qb, other, self.vars)
        a, b = self._align(other)
        caps = tuple(_min_cap(x, y) for x, y in zip(a.caps, b.caps))
        if a.is_zero_structurally():
            low = b.low
        elif b.is_zero_structurally():
            low = a.low
        else:
            low = tuple(min(x, y) for x, y in zip(a.low, b.low))
        off = max(a.off, b.off)
        p = self.p
        terms: Dict[Exp, AlgElem] = {}
        res = a._new(a.vars, {}, caps, low, off)
        for src, c in ((a, 1), (b, sign)):
            for e, x in src.terms.items():
                if res.in_region(e):
                    terms[e] = add_into(terms.get(e, {}), x, c, p)
        res.terms = {e: x for e, x in terms.items() if x}
        return res

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "MultiSeries":
        c = _to_scalar(c, self.p)
        terms = {e: scale(x, c, self.p) for e, x in self.terms.items()} if c else {}
        return self._new(self.vars, terms, self.caps, self.low, self.off)

    # -- products ----------------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        return self.mul(other)

    def __rmul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        return other.mul(self)

    def mul(self, other: "MultiSeries") -> "MultiSeries":
        a, b = self._align(other)
        vars = a.vars
        off = a.off + b.off
        if a.is_zero_structurally() or b.is_zero_structurally():
            return a._new(vars, {}, [None] * len(vars), [None] * len(vars), off)
        caps = tuple(_min_cap(_cap_plus(ca, lb), _cap_plus(cb, la))
                     for ca, cb, la, lb in zip(a.caps, b.caps, a.low, b.low))
        low = tuple(x + y for x, y in zip(a.low, b.low))
        res = a._new(vars, {}, caps, low, off)
        qb, p = self.qb, self.p
        terms: Dict[Exp, AlgElem] = {}
        bitems = list(b.terms.items())
        for e1, x in a.terms.items():
            for e2, y in bitems:
                e = tuple(s + t for s, t in zip(e1, e2))
                if not res.in_region(e):
                    continue
                prod = qb.mul(x, y)
                if prod:
                    terms[e] = add_into(terms.get(e, {}), prod, 1, p)
        res.terms = {e: x for e, x in terms.items() if x}
        return res

    def commutator(self, other: "MultiSeries") -> "MultiSeries":
        return self.mul(other) - other.mul(self)

    def power(self, m: int) -> "MultiSeries":
        out = constant(self.qb, 1, self.vars)
        for _ in range(m):
            out = out.mul(self)
        return out

    # -- substitutions ------------------------------------------------------

    def shift(self, c, var: Optional[str] = None) -> "MultiSeries":
        """Substitute var -> var - c and re-expand in var^{-1}."""
        if var is None:
            if len(self.vars) != 1:
                raise ValueError("shift of a multivariate series needs a variable")
            var = self.vars[0]
        k = self.vars.index(var)
        p = self.p
        c = _to_scalar(c, p)
        if c == 0:
            return self
        cap = self.caps[k]
        res = self._new(self.vars, {}, self.caps, self.low, self.off)
        terms: Dict[Exp, AlgElem] = {}

        def put(e, x, coef):
            if coef % p and res.in_region(e):
                terms[e] = add_into(terms.get(e, {}), x, coef, p)

        for e, x in self.terms.items():
            r = e[k]
            if r > 0:
                if cap is None:
                    raise ValueError("cannot shift an uncapped variable with negative powers")
                for m in range(r, cap + 1):
                    e2 = e[:k] + (m,) + e[k + 1:]
                    put(e2, x, binom_mod_p(m - 1, r - 1, p) * pow(c, m - r, p))
            elif r == 0:
                put(e, x, 1)
            else:
                d = -r
                for j in range(d + 1):
                    e2 = e[:k] + (-j,) + e[k + 1:]
                    put(e2, x, binom_mod_p(d, j, p) * pow(-c, d - j, p))
        res.terms = {e: x for e, x in terms.items() if x}
        return res

    def rescale(self, factor, var: Optional[str] = None) -> "MultiSeries":
        """Substitute var -> var / factor, i.e. multiply u^{-r} by factor^r."""
        if var is None:
            var = self.vars[0]
        k = self.vars.index(var)
        p = self.p
        f = _to_scalar(factor, p)
        terms = {}
        for e, x in self.terms.items():
            r = e[k]
            c = pow(f, r, p) if r >= 0 else pow(pow(f, -1, p), -r, p)
            terms[e] = scale(x, c, p)
        return self._new(self.vars, terms, self.caps, self.low, self.off)

    def drop(self, exps: Iterable[Exp]) -> "MultiSeries":
        """Copy without the listed terms (e.g. e° drops the u^{-1} term)."""
        drop = set(tuple(e) for e in exps)
        terms = {e: x for e, x in self.terms.items() if e not in drop}
        return self._new(self.vars, terms, self.caps, self.low, self.off)

    def map_coeffs(self, fn) -> "MultiSeries":
        terms = {e: fn(x) for e, x in self.terms.items()}
        return self._new(self.vars, terms, self.caps, self.low, self.off)

    # -- comparison ---------------------------------------------------------

    def region(self, box_cap: int) -> Tuple[List[Exp], int]:
        """Exponents that are exact for this series (inside the per-variable
        box up to ``box_cap`` where a variable is uncapped) and the number of
        box points skipped for exceeding the degree budget."""
        if self.is_zero_structurally():
            return [], 0
        ranges = []
        for lo, cap in zip(self.low, self.caps):
            hi = box_cap if cap is None else cap
            ranges.append(range(lo, hi + 1))
        inside, skipped = [], 0
        for e in itertools.product(*ranges):
            if sum(e) <= self.budget:
                inside.append(e)
            else:
                skipped += 1
        return inside, skipped

    def __repr__(self):
        return f"<{type(self).__name__} vars={self.vars} caps={self.caps} terms={len(self.terms)}>"


class NcSeries(MultiSeries):
    """Univariate truncated series sum_{r=0}^{K} x_r u^{-r}."""

    @property
    def var(self) -> str:
        return self.vars[0]

    @property
    def cap(self) -> int:
        return self.caps[0]

    def coeff(self, r) -> AlgElem:
        if isinstance(r, tuple):
            return super().coeff(r)
        return super().coeff((r,))

    def coeffs(self) -> List[AlgElem]:
        return [self.terms.get((r,), {}) for r in range(self.cap + 1)]

    def invert(self) -> "NcSeries":
        """Inverse of a series whose constant term is a nonzero scalar."""
        p = self.p
        c0 = self.terms.get((0,), {})
        if set(c0) - {()} or not c0 or self.low[0] is None or self.low[0] < 0:
            raise ValueError("constant term is not an invertible scalar")
        inv0 = pow(c0[()], -1, p)
        K = self.cap
        qb = self.qb
        out: List[AlgElem] = [{(): inv0}]
        for m in range(1, K + 1):
            acc: AlgElem = {}
            for t in range(1, m + 1):
                x = self.terms.get((t,))
                if x and out[m - t]:
                    add_into(acc, qb.mul(x, out[m - t]), 1, p)
            out.append(scale(acc, -inv0, p))
        return series_from_coeffs(qb, out, self.var)


# ---------------------------------------------------------------------------
# constructors


def series_from_coeffs(qb: QuotientBasis, coeffs: Sequence[AlgElem], var: str = "u") -> NcSeries:
    K = len(coeffs) - 1
    if K > qb.D:
        raise ValueError(f"series cap {K} exceeds quotient cap {qb.D}")
    terms = {(r,): dict(x) for r, x in enumerate(coeffs) if x}
    low = min((e[0] for e in terms), default=None)
    return NcSeries(qb, (var,), terms, (K,), (low,), 0)


def constant(qb: QuotientBasis, c, vars: Sequence[str] = ("u",)) -> MultiSeries:
    c = _to_scalar(c, qb.p)
    vars = tuple(vars)
    n = len(vars)
    terms = {(0,) * n: {(): c}} if c else {}
    cls = NcSeries if n == 1 else MultiSeries
    return cls(qb, vars, terms, (None,) * n, ((0,) * n) if c else ((None,) * n), 0)


def polynomial(qb: QuotientBasis, vars: Sequence[str], coeffs: Dict[Tuple[int, ...], object]) -> MultiSeries:
    """Polynomial with scalar coefficients; keys are nonnegative powers of
    the variables (so {(1, 0): 1, (0, 1): -1} is u - v)."""
    vars = tuple(vars)
    p = qb.p
    terms = {}
    for powers, c in coeffs.items():
        c = _to_scalar(c, p)
        if c:
            terms[tuple(-k for k in powers)] = {(): c}
    n = len(vars)
    if not terms:
        return constant(qb, 0, vars)
    low = tuple(min(e[k] for e in terms) for k in range(n))
    off = max(-sum(e) for e in terms)
    cls = NcSeries if n == 1 else MultiSeries
    return cls(qb, vars, terms, (None,) * n, low, max(off, 0))


def linear(qb: QuotientBasis, vars: Sequence[str], a: str, b: Optional[str] = None, c=0,
           scale_by=1) -> MultiSeries:
    """scale_by * (a - b - c) as a polynomial in ``vars``."""
    vars = tuple(vars)
    coeffs = {}
    ia = vars.index(a)
    key = [0] * len(vars)
    key[ia] = 1
    coeffs[tuple(key)] = Fraction(scale_by)
    if b is not None:
        key = [0] * len(vars)
        key[vars.index(b)] = 1
        coeffs[tuple(key)] = -Fraction(scale_by)
    coeffs[(0,) * len(vars)] = -Fraction(c) * Fraction(scale_by)
    return polynomial(qb, vars, coeffs)


def shift(s: MultiSeries, c, var: Optional[str] = None) -> MultiSeries:
    return s.shift(c, var)


def invert(s: NcSeries) -> NcSeries:
    return s.invert()


def mul(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    return a.mul(b)


def commutator_series(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    return a.commutator(b)


def compare(lhs: MultiSeries, rhs: MultiSeries, box_cap: int):
    """Coefficient-wise comparison on the common exact region.

    Returns ``(compared, skipped, first_mismatch)`` where ``first_mismatch``
    is ``None`` or ``(exponent, difference)``.
    """
    a, b = lhs._align(rhs)
    vars = a.vars
    caps = tuple(_min_cap(x, y) for x, y in zip(a.caps, b.caps))
    if a.is_zero_structurally() and b.is_zero_structurally():
        low = (0,) * len(vars)
    elif a.is_zero_structurally():
        low = b.low
    elif b.is_zero_structurally():
        low = a.low
    else:
        low = tuple(min(x, y) for x, y in zip(a.low, b.low))
    probe = MultiSeries(a.qb, vars, {}, caps, low, max(a.off, b.off))
    points, skipped = probe.region(box_cap)
    p = a.p
    for e in points:
        d = sub(a.terms.get(e, {}), b.terms.get(e, {}), p)
        if d:
            return len(points), skipped, (e, d)
    return len(points), skipped, None


# ---------------------------------------------------------------------------
# matrices


class SeriesMatrix:
    """N x N matrix of univariate series sharing a variable and cap."""

    def __init__(self, rows: List[List[NcSeries]]):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("series matrix must be square")
        self.rows = rows
        self.N = n

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def mul(self, other: "SeriesMatrix") -> "SeriesMatrix":
        N = self.N
        out = []
        for i in range(N):
            row = []
            for j in range(N):
                acc = None
                for k in range(N):
                    term = self.rows[i][k].mul(other.rows[k][j])
                    acc = term if acc is None else acc + term
                row.append(acc)
            out.append(row)
        return SeriesMatrix(out)

    def map(self, fn) -> "SeriesMatrix":
        return SeriesMatrix([[fn(x) for x in row] for row in self.rows])


def generator_matrix(qb: QuotientBasis, K: int, var: str = "u") -> SeriesMatrix:
    """T(u) = (t_ij(u)) truncated at u^{-K}."""
    if K > qb.D:
        raise ValueError(f"K={K} exceeds D={qb.D}")
    N = qb.N
    rows = []
    for i in range(1, N + 1):
        row = []
        for j in range(1, N + 1):
            coeffs = [qb.gen(i, j, r) for r in range(K + 1)]
            row.append(series_from_coeffs(qb, coeffs, var))
        rows.append(row)
    return SeriesMatrix(rows)


def gauss_decompose(T: SeriesMatrix):
    """T = F H E by Schur-complement elimination.

    Returns ``(F, H, E)`` as SeriesMatrix objects (H diagonal, F unit lower,
    E unit upper) and raises ValueError for a non-invertible pivot.
    """
    N = T.N
    qb = T.rows[0][0].qb
    var = T.rows[0][0].var
    K = T.rows[0][0].cap
    one = series_from_coeffs(qb, [{(): 1}] + [{}] * K, var)
    zero = series_from_coeffs(qb, [{}] * (K + 1), var)
    A = [list(r) for r in T.rows]
    H = [[zero] * N for _ in range(N)]
    E = [[one if i == j else zero for j in range(N)] for i in range(N)]
    F = [[one if i == j else zero for j in range(N)] for i in range(N)]
    for k in range(N):
        h = A[k][k]
        hinv = h.invert()
        H[k][k] = h
        for j in range(k + 1, N):
            E[k][j] = hinv.mul(A[k][j])
        for i in range(k + 1, N):
            F[i][k] = A[i][k].mul(hinv)
        for i in range(k + 1, N):
            for j in range(k + 1, N):
                A[i][j] = A[i][j] - F[i][k].mul(A[k][j])
    return SeriesMatrix(F), SeriesMatrix(H), SeriesMatrix(E)


def quasideterminant_h(T: SeriesMatrix, i: int) -> NcSeries:
    """h_i for i <= 3 written out directly as a quasideterminant expansion
    (independent of the elimination loop)."""
    t = lambda a, b: T.rows[a - 1][b - 1]
    if i == 1:
        return t(1, 1)
    t11i = t(1, 1).invert()
    if i == 2:
        return t(2, 2) - t(2, 1).mul(t11i).mul(t(1, 2))
    if i == 3:
        h2 = t(2, 2) - t(2, 1).mul(t11i).mul(t(1, 2))
        left = t(3, 2) - t(3, 1).mul(t11i).mul(t(1, 2))
        right = t(2, 3) - t(2, 1).mul(t11i).mul(t(1, 3))
        return t(3, 3) - t(3, 1).mul(t11i).mul(t(1, 3)) - left.mul(h2.invert()).mul(right)
    raise ValueError("explicit quasideterminants are only written out for i <= 3")


def quasideterminant_e(T: SeriesMatrix, i: int, j: int) -> NcSeries:
    """e_{ij} for i <= 2 from the explicit formulas."""
    t = lambda a, b: T.rows[a - 1][b - 1]
    t11i = t(1, 1).invert()
    if i == 1:
        return t11i.mul(t(1, j))
    if i == 2:
        h2 = quasideterminant_h(T, 2)
        return h2.invert().mul(t(2, j) - t(2, 1).mul(t11i).mul(t(1, j)))
    raise ValueError("explicit quasideterminants are only written out for i <= 2")


def quasideterminant_f(T: SeriesMatrix, j: int, i: int) -> NcSeries:
    t = lambda a, b: T.rows[a - 1][b - 1]
    t11i = t(1, 1).invert()
    if i == 1:
        return t(j, 1).mul(t11i)
    if i == 2:
        h2 = quasideterminant_h(T, 2)
        return (t(j, 2) - t(j, 1).mul(t11i).mul(t(1, 2))).mul(h2.invert())
    raise ValueError("explicit quasideterminants are only written out for i <= 2")
