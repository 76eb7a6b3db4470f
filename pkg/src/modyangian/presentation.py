"""Relation catalogue for the Drinfeld presentation of X(o_N), the lemma
identities derived from it, centrality checks and automorphism checks.

Every identity with denominators is compared after multiplying both sides
by all of its denominators, so each case is a pair of series (lhs, rhs)
that must agree coefficient by coefficient.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .gaussian import GaussianSet, index_set_I, scalar_matrix_defect
from .reports import FAIL, NA, PASS, SKIPPED, CheckReport
from .rtt import (AlgElem, BudgetExceeded, DegreeOverflow, IdealCollapse, QuotientBasis, Relation,
                  RelationSet, add_into, close_ideal, concat_product, const,
                  generate_rtt_relations, lin_comb, sub)
from .series import MultiSeries, NcSeries, compare, constant, linear, series_from_coeffs


@dataclass
class RelationCase:
    id: str
    tag: str
    vars: Tuple[str, ...]
    build: Callable[["Ctx"], Tuple[MultiSeries, MultiSeries]]
    types: str = "BD"
    note: str = ""


# ---------------------------------------------------------------------------
# building blocks


class Ctx:
    """Named series of a GaussianSet placed in a fixed variable tuple."""

    def __init__(self, gs: GaussianSet, vars: Sequence[str], var_cap: Optional[int] = None):
        self.gs = gs
        self.qb = gs.qb
        self.vars = tuple(vars)
        self.var_cap = var_cap
        self._memo: Dict[tuple, MultiSeries] = {}

    def _place(self, key, s: NcSeries, var: str, shift=0) -> MultiSeries:
        full = (key, var, shift)
        got = self._memo.get(full)
        if got is None:
            if shift:
                s = s.shift(shift)
            if self.var_cap is not None and (s.cap is None or s.cap > self.var_cap):
                s = truncate(s, self.var_cap)
            got = s.at(var, self.vars)
            self._memo[full] = got
        return got

    # argument is var - shift throughout
    def e(self, i, var, shift=0):
        return self._place(("e", i), self.gs.e(i), var, shift)

    def f(self, i, var, shift=0):
        return self._place(("f", i), self.gs.f(i), var, shift)

    def e_circ(self, i, var):
        return self._place(("ec", i), self.gs.e_circ(i), var)

    def f_circ(self, i, var):
        return self._place(("fc", i), self.gs.f_circ(i), var)

    def e_ij(self, i, j, var, shift=0):
        return self._place(("eij", i, j), self.gs.e_ij(i, j), var, shift)

    def h(self, i, var, shift=0):
        return self._place(("h", i), self.gs.h(i), var, shift)

    def ht(self, i, var, shift=0):
        return self._place(("ht", i), self.gs.ht(i), var, shift)

    def k(self, i, var):
        return self._place(("k", i), self.gs.k(i), var)

    def h_down(self, i, ell, var):
        return self._place(("down", i, ell), self.gs.h_down(i, ell), var)

    def h_up(self, i, ell, var):
        return self._place(("up", i, ell), self.gs.h_up(i, ell), var)

    def lin(self, a, b=None, c=0, k=1):
        return linear(self.qb, self.vars, a, b, c, k)

    def var(self, a):
        return linear(self.qb, self.vars, a)

    def zero(self):
        return constant(self.qb, 0, self.vars)


def truncate(s: NcSeries, cap: int) -> NcSeries:
    terms = {e: x for e, x in s.terms.items() if e[0] <= cap}
    new_cap = cap if s.cap is None else min(cap, s.cap)
    return NcSeries(s.qb, s.vars, terms, (new_cap,), s.low, s.off)


def comm(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    return a.commutator(b)


# ---------------------------------------------------------------------------
# the presentation


def presentation_cases(gs: GaussianSet) -> Tuple[List[RelationCase], List[Tuple[str, str]]]:
    """Instances of every relation of the presentation, plus (tag, reason)
    for tags that have no instance at this N."""
    n, typ, R = gs.n, gs.type, gs.roots
    cases: List[RelationCase] = []
    na: List[Tuple[str, str]] = []
    UV = ("u", "v")

    for i in range(1, n + 2):
        for j in range(i, n + 2):
            cases.append(RelationCase(
                f"hihj[i={i},j={j}]", "hihj", UV,
                lambda c, i=i, j=j: (comm(c.h(i, "u"), c.h(j, "v")), c.zero())))

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            def b_eifj(c, i=i, j=j):
                lhs = c.lin("u", "v").mul(comm(c.e(i, "u"), c.f(j, "v")))
                rhs = c.k(i, "u") - c.k(i, "v") if i == j else c.zero()
                return lhs, rhs
            cases.append(RelationCase(f"eifj[i={i},j={j}]", "eifj", UV, b_eifj))

    hiej_pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    hiej_pairs += [(n + 1, j) for j in range(1, n - 1)]
    for i, j in hiej_pairs:
        ea = R.eps_alpha(i, j)

        def b_hiej(c, i=i, j=j, ea=ea):
            lhs = c.lin("u", "v").mul(comm(c.h(i, "u"), c.e(j, "v")))
            rhs = c.h(i, "u").mul(c.e(j, "u") - c.e(j, "v")).scale(-ea)
            return lhs, rhs

        def b_hifj(c, i=i, j=j, ea=ea):
            lhs = c.lin("u", "v").mul(comm(c.h(i, "u"), c.f(j, "v")))
            rhs = (c.f(j, "u") - c.f(j, "v")).mul(c.h(i, "u")).scale(ea)
            return lhs, rhs
        cases.append(RelationCase(f"hiej[i={i},j={j}]", "hiej", UV, b_hiej))
        cases.append(RelationCase(f"hifj[i={i},j={j}]", "hifj", UV, b_hifj))

    # h_{n+1} against e_{n-1}, e_n
    if typ == "B":
        if n >= 2:
            cases.append(RelationCase(
                "hn+1efn-1[e]", "hn+1efn-1", UV,
                lambda c: (comm(c.h(n + 1, "u"), c.e(n - 1, "v")), c.zero()), "B"))
            cases.append(RelationCase(
                "hn+1efn-1[f]", "hn+1efn-1", UV,
                lambda c: (comm(c.h(n + 1, "u"), c.f(n - 1, "v")), c.zero()), "B"))
        else:
            na.append(("hn+1efn-1", "needs n >= 2"))

        def b_hn1en(c):
            d = c.lin("u", "v").mul(c.lin("u", "v", 1)).scale(2)
            lhs = d.mul(comm(c.h(n + 1, "u"), c.e(n, "v")))
            rhs = (c.lin("u", "v", 1).mul(c.h(n + 1, "u")).mul(c.e(n, "u") - c.e(n, "v"))
                   - c.lin("u", "v").mul(c.e(n, "u", 1) - c.e(n, "v")).mul(c.h(n + 1, "u")))
            return lhs, rhs

        def b_hn1fn(c):
            d = c.lin("u", "v").mul(c.lin("u", "v", 1)).scale(2)
            lhs = d.mul(comm(c.h(n + 1, "u"), c.f(n, "v")))
            rhs = (c.lin("u", "v").mul(c.h(n + 1, "u")).mul(c.f(n, "u", 1) - c.f(n, "v"))
                   - c.lin("u", "v", 1).mul(c.f(n, "u") - c.f(n, "v")).mul(c.h(n + 1, "u")))
            return lhs, rhs
        cases.append(RelationCase("hn+1en", "hn+1en", UV, b_hn1en, "B"))
        cases.append(RelationCase("hn+1fn", "hn+1fn", UV, b_hn1fn, "B"))
        na += [("hn+1efn-1-2n", "type D only"), ("hn+1efn-2n", "type D only")]
    else:
        na += [("hn+1efn-1", "type B only"), ("hn+1en", "type B only"), ("hn+1fn", "type B only")]
        for j, tag, sign in ((n - 1, "hn+1efn-1-2n", -1), (n, "hn+1efn-2n", 1)):
            def b_e(c, j=j, sign=sign):
                lhs = c.lin("u", "v").mul(comm(c.h(n + 1, "u"), c.e(j, "v")))
                rhs = c.h(n + 1, "u").mul(c.e(j, "u") - c.e(j, "v")).scale(sign)
                return lhs, rhs

            def b_f(c, j=j, sign=sign):
                lhs = c.lin("u", "v").mul(comm(c.h(n + 1, "u"), c.f(j, "v")))
                rhs = (c.f(j, "u") - c.f(j, "v")).mul(c.h(n + 1, "u")).scale(-sign)
                return lhs, rhs
            cases.append(RelationCase(f"{tag}[e]", tag, UV, b_e, "D"))
            cases.append(RelationCase(f"{tag}[f]", tag, UV, b_f, "D"))

    for i in range(1, n + 1):
        half = Fraction(R.alpha_alpha(i, i), 2)

        def b_eiei(c, i=i, half=half):
            lhs = c.lin("u", "v").mul(comm(c.e(i, "u"), c.e(i, "v")))
            d = c.e(i, "u") - c.e(i, "v")
            return lhs, d.mul(d).scale(half)

        def b_fifi(c, i=i, half=half):
            lhs = c.lin("u", "v").mul(comm(c.f(i, "u"), c.f(i, "v")))
            d = c.f(i, "u") - c.f(i, "v")
            return lhs, d.mul(d).scale(-half)
        cases.append(RelationCase(f"eiei[i={i}]", "eiei", UV, b_eiei))
        cases.append(RelationCase(f"fifi[i={i}]", "fifi", UV, b_fifi))

    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    if not pairs:
        na += [("eiej", "needs two simple roots"), ("fifj", "needs two simple roots")]
    for i, j in pairs:
        aa = R.alpha_alpha(i, j)

        def b_eiej(c, i=i, j=j, aa=aa):
            lhs = (c.var("u").mul(comm(c.e_circ(i, "u"), c.e(j, "v")))
                   - c.var("v").mul(comm(c.e(i, "u"), c.e_circ(j, "v"))))
            return lhs, c.e(i, "u").mul(c.e(j, "v")).scale(-aa)

        def b_fifj(c, i=i, j=j, aa=aa):
            lhs = (c.var("u").mul(comm(c.f_circ(i, "u"), c.f(j, "v")))
                   - c.var("v").mul(comm(c.f(i, "u"), c.f_circ(j, "v"))))
            return lhs, c.f(j, "v").mul(c.f(i, "u")).scale(aa)
        cases.append(RelationCase(f"eiej[i={i},j={j}]", "eiej", UV, b_eiej))
        cases.append(RelationCase(f"fifj[i={i},j={j}]", "fifj", UV, b_fifj))

    serre = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    if not serre:
        na += [("Serre-e", "needs i != j"), ("Serre-f", "needs i != j")]
    for i, j in serre:
        k = 1 + abs(R.cartan(i, j))
        us = tuple(f"u{a}" for a in range(1, k + 1))
        vars = us + ("v",)
        for kind in ("e", "f"):
            def b_serre(c, i=i, j=j, k=k, us=us, kind=kind):
                g = c.e if kind == "e" else c.f
                total = c.zero()
                for sigma in itertools.permutations(us):
                    inner = g(j, "v")
                    for var in reversed(sigma):
                        inner = comm(g(i, var), inner)
                    total = total + inner
                return total, c.zero()
            cases.append(RelationCase(f"Serre-{kind}[i={i},j={j},k={k}]", f"Serre-{kind}", vars,
                                      b_serre))
    return cases, na


# ---------------------------------------------------------------------------
# lemma identities


def lemma_cases(gs: GaussianSet, ms: Iterable[int] = (0, 1, 2),
                ells: Iterable[int] = (1, 2, 3)) -> Tuple[List[RelationCase], List[Tuple[str, str]]]:
    n, typ, R = gs.n, gs.type, gs.roots
    ms, ells = tuple(ms), tuple(ells)
    cases: List[RelationCase] = []
    na: List[Tuple[str, str]] = []
    UV = ("u", "v")
    U = ("u",)
    B, D = typ == "B", typ == "D"

    # bracket identities for e_{n-1,n+1} in type B
    if B and n >= 2:
        def b_brac(c):
            lhs = comm(c.e_ij(n - 1, n + 1, "u"), c.e(n, "v"))
            rhs = c.e(n, "v").mul(comm(c.e(n - 1, "u"), c.e(n, "v")))
            return lhs, rhs

        def b_brac2(c):
            lhs = c.lin("u", "v").mul(comm(c.e(n - 1, "u"), c.e(n, "v")))
            rhs = (c.e_ij(n - 1, n + 1, "v") - c.e_ij(n - 1, n + 1, "u")
                   - c.e(n - 1, "v").mul(c.e(n, "v")) + c.e(n - 1, "u").mul(c.e(n, "v")))
            return lhs, rhs
        cases.append(RelationCase("brac:en-1n+1en brac", "brac:en-1n+1en brac", UV, b_brac, "B"))
        cases.append(RelationCase("brac:en-1en", "brac:en-1en", UV, b_brac2, "B"))
    else:
        reason = "type B with n >= 2 only"
        na += [("brac:en-1n+1en brac", reason), ("brac:en-1en", reason)]

    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    zero_pairs = [(i, j) for i, j in pairs if R.cartan(i, j) == 0]
    if not pairs:
        na += [("serre-ef30", "needs i != j"), ("serre-eee 30", "needs i != j"),
               ("serre-fff 30", "needs i != j")]
    if not zero_pairs:
        na.append(("serre-20", "no pair with c_ij = 0"))
    for i, j in zero_pairs:
        cases.append(RelationCase(f"serre-20[e,i={i},j={j}]", "serre-20", UV,
                                  lambda c, i=i, j=j: (comm(c.e(i, "u"), c.e(j, "v")), c.zero())))
        cases.append(RelationCase(f"serre-20[f,i={i},j={j}]", "serre-20", UV,
                                  lambda c, i=i, j=j: (comm(c.f(i, "u"), c.f(j, "v")), c.zero())))
    for i, j in pairs:
        cases.append(RelationCase(
            f"serre-ef30[e,i={i},j={j}]", "serre-ef30", UV,
            lambda c, i=i, j=j: (comm(c.e(i, "u"), comm(c.e(i, "u"), c.e(j, "v"))), c.zero())))
        cases.append(RelationCase(
            f"serre-ef30[f,i={i},j={j}]", "serre-ef30", UV,
            lambda c, i=i, j=j: (comm(c.f(i, "u"), comm(c.f(i, "u"), c.f(j, "v"))), c.zero())))
        UVW = ("u", "v", "w")
        cases.append(RelationCase(
            f"serre-eee 30[i={i},j={j}]", "serre-eee 30", UVW,
            lambda c, i=i, j=j: (comm(c.e(i, "u"), comm(c.e(i, "v"), c.e(j, "w")))
                                 + comm(c.e(i, "v"), comm(c.e(i, "u"), c.e(j, "w"))), c.zero())))
        cases.append(RelationCase(
            f"serre-fff 30[i={i},j={j}]", "serre-fff 30", UVW,
            lambda c, i=i, j=j: (comm(c.f(i, "u"), comm(c.f(i, "v"), c.f(j, "w")))
                                 + comm(c.f(i, "v"), comm(c.f(i, "u"), c.f(j, "w"))), c.zero()),
            note="checked with f_j in the innermost bracket"))

    # commutators of e_i(u) with h's at v
    for i in range(1, n + 1):
        cases.append(RelationCase(
            f"eihi-1[i={i}]", "eihi-1", UV,
            lambda c, i=i: (c.lin("u", "v").mul(comm(c.e(i, "u"), c.h(i, "v"))),
                            -c.h(i, "v").mul(c.e(i, "v") - c.e(i, "u")))))
        cases.append(RelationCase(
            f"eihitilde[i={i}]", "eihitilde", UV,
            lambda c, i=i: (c.lin("u", "v").mul(comm(c.e(i, "u"), c.ht(i, "v"))),
                            (c.e(i, "v") - c.e(i, "u")).mul(c.ht(i, "v")))))
        if not (B and i == n):
            cases.append(RelationCase(
                f"eihi+1-1[i={i}]", "eihi+1-1", UV,
                lambda c, i=i: (c.lin("u", "v").mul(comm(c.e(i, "u"), c.h(i + 1, "v"))),
                                c.h(i + 1, "v").mul(c.e(i, "v") - c.e(i, "u")))))
            cases.append(RelationCase(
                f"eihi+1tilde[i={i}]", "eihi+1tilde", UV,
                lambda c, i=i: (c.lin("u", "v").mul(comm(c.e(i, "u"), c.ht(i + 1, "v"))),
                                -(c.e(i, "v") - c.e(i, "u")).mul(c.ht(i + 1, "v")))))
    if B and n == 1:
        na += [("eihi+1-1", "excluded for i = n in type B"),
               ("eihi+1tilde", "excluded for i = n in type B")]
    if n >= 2:
        def b_enhn1(c):
            lhs = c.lin("u", "v").mul(comm(c.e(n, "u"), c.h(n - 1, "v")))
            rhs = c.zero() if B else -c.h(n - 1, "v").mul(c.e(n, "v") - c.e(n, "u"))
            return lhs, rhs

        def b_enhn1t(c):
            lhs = c.lin("u", "v").mul(comm(c.e(n, "u"), c.ht(n - 1, "v")))
            rhs = c.zero() if B else (c.e(n, "v") - c.e(n, "u")).mul(c.ht(n - 1, "v"))
            return lhs, rhs
        cases.append(RelationCase("enhn-1-1", "enhn-1-1", UV, b_enhn1))
        cases.append(RelationCase("enhn-1tilde", "enhn-1tilde", UV, b_enhn1t))
    else:
        na += [("enhn-1-1", "needs n >= 2"), ("enhn-1tilde", "needs n >= 2")]

    # shifted commutation of e_i with h_i, h_{i+1}
    for i in range(1, n + 1):
        s = R.eps_alpha(i, i)
        cases.append(RelationCase(
            f"eihihiei-1[a,i={i}]", "eihihiei-1", U,
            lambda c, i=i, s=s: (c.e(i, "u", s).mul(c.h(i, "u")), c.h(i, "u").mul(c.e(i, "u")))))
        cases.append(RelationCase(
            f"eihihiei-1[b,i={i}]", "eihihiei-1", U,
            lambda c, i=i, s=s: (c.ht(i, "u").mul(c.e(i, "u", s)), c.e(i, "u").mul(c.ht(i, "u")))))
        if i != n:
            s2 = R.eps_alpha(i + 1, i)
            cases.append(RelationCase(
                f"eihihiei-2[a,i={i}]", "eihihiei-2", U,
                lambda c, i=i, s2=s2: (c.e(i, "u", s2).mul(c.h(i + 1, "u")),
                                       c.h(i + 1, "u").mul(c.e(i, "u")))))
            cases.append(RelationCase(
                f"eihihiei-2[b,i={i}]", "eihihiei-2", U,
                lambda c, i=i, s2=s2: (c.ht(i + 1, "u").mul(c.e(i, "u", s2)),
                                       c.e(i, "u").mul(c.ht(i + 1, "u"))),
                note="shift taken as (eps_{i+1}, alpha_i), matching the first identity"))
    if n == 1:
        na.append(("eihihiei-2", "excluded for i = n"))
    if D:
        cases.append(RelationCase(
            "comm in N=2n[a]", "comm in N=2n", U,
            lambda c: (c.e(n, "u", -1).mul(c.h(n + 1, "u")), c.h(n + 1, "u").mul(c.e(n, "u"))), "D"))
        cases.append(RelationCase(
            "comm in N=2n[b]", "comm in N=2n", U,
            lambda c: (c.e(n - 1, "u", 1).mul(c.h(n + 1, "u")),
                       c.h(n + 1, "u").mul(c.e(n - 1, "u"))), "D"))
    else:
        na.append(("comm in N=2n", "type D only"))

    # the m-families
    def d(c, i, var_shift=0):
        return c.e(i, "v", var_shift) - c.e(i, "u")

    for m in ms:
        for i in range(1, n + 1):
            half = Fraction(R.alpha_alpha(i, i), 2)
            cases.append(RelationCase(
                f"new1[i={i},m={m}]", "new1", UV,
                lambda c, i=i, m=m, half=half: (
                    c.lin("u", "v").mul(comm(c.e(i, "u"), d(c, i).power(m))),
                    d(c, i).power(m + 1).scale(half * m))))
            cases.append(RelationCase(
                f"new2[i={i},m={m}]", "new2", UV,
                lambda c, i=i, m=m, half=half: (
                    c.lin("u", "v").mul(comm(c.e(i, "u"), c.h(i, "v").mul(d(c, i).power(m)))),
                    c.h(i, "v").mul(d(c, i).power(m + 1)).scale(half * m - 1))))
            if not (B and i == n):
                cases.append(RelationCase(
                    f"new3[i={i},m={m}]", "new3", UV,
                    lambda c, i=i, m=m: (
                        c.lin("u", "v").mul(comm(c.e(i, "u"), c.h(i + 1, "v").mul(d(c, i).power(m)))),
                        c.h(i + 1, "v").mul(d(c, i).power(m + 1)).scale(m + 1))))
                cases.append(RelationCase(
                    f"new5[i={i},m={m}]", "new5", UV,
                    lambda c, i=i, m=m: (
                        c.lin("u", "v").mul(comm(c.e(i, "u"),
                                                 c.h(i + 1, "v").mul(d(c, i).power(m)).mul(c.ht(i, "v")))),
                        c.h(i + 1, "v").mul(d(c, i).power(m + 1)).mul(c.ht(i, "v")).scale(m + 2))))
        if D:
            cases.append(RelationCase(
                f"new22[m={m}]", "new22", UV,
                lambda c, m=m: (
                    c.lin("u", "v").mul(comm(c.e(n - 1, "u"), c.h(n + 1, "v").mul(d(c, n - 1).power(m)))),
                    c.h(n + 1, "v").mul(d(c, n - 1).power(m + 1)).scale(m - 1)), "D"))
            cases.append(RelationCase(
                f"new222[m={m}]", "new222", UV,
                lambda c, m=m: (
                    c.lin("u", "v").mul(comm(c.e(n, "u"), c.h(n - 1, "v").mul(d(c, n).power(m)))),
                    c.h(n - 1, "v").mul(d(c, n).power(m + 1)).scale(m - 1)), "D"))
            cases.append(RelationCase(
                f"new7[m={m}]", "new7", UV,
                lambda c, m=m: (
                    c.lin("u", "v").mul(comm(c.e(n, "u"),
                                             c.h(n + 1, "v").mul(d(c, n).power(m)).mul(c.ht(n - 1, "v")))),
                    c.h(n + 1, "v").mul(d(c, n).power(m + 1)).mul(c.ht(n - 1, "v")).scale(m + 2)),
                "D", note="both sides carry the factor (u - v), as in the neighbouring identities"))
        if B:
            def b_new42(c, m=m):
                den = c.lin("u", "v").mul(c.lin("v", "u", 1)).scale(2)
                lhs = den.mul(comm(c.e(n, "u"), c.h(n + 1, "v").mul(d(c, n).power(m))))
                rhs = (c.lin("v", "u", 1).mul(c.h(n + 1, "v")).mul(d(c, n).power(m + 1)).scale(m + 1)
                       + c.lin("u", "v").mul(d(c, n, 1)).mul(c.h(n + 1, "v")).mul(d(c, n).power(m)))
                return lhs, rhs

            def b_new43(c, m=m):
                x = d(c, n, 1).mul(c.h(n + 1, "v"))
                lhs = c.lin("u", "v", 0, 2).mul(comm(c.e(n, "u"), x.mul(d(c, n).power(m))))
                rhs = x.mul(d(c, n).power(m + 1)).scale(m + 1)
                return lhs, rhs

            def b_new6(c, m=m):
                den = c.lin("u", "v").mul(c.lin("v", "u", 1)).scale(2)
                core = c.h(n + 1, "v").mul(d(c, n).power(m))
                lhs = den.mul(comm(c.e(n, "u"), core.mul(c.ht(n, "v"))))
                rhs = (c.lin("v", "u", 1).mul(c.h(n + 1, "v")).mul(d(c, n).power(m + 1))
                       .mul(c.ht(n, "v")).scale(m + 3)
                       + c.lin("u", "v").mul(d(c, n, 1)).mul(core).mul(c.ht(n, "v")))
                return lhs, rhs
            cases.append(RelationCase(f"new4-2[m={m}]", "new4-2", UV, b_new42, "B"))
            cases.append(RelationCase(f"new4-3[m={m}]", "new4-3", UV, b_new43, "B"))
            cases.append(RelationCase(f"new6[m={m}]", "new6", UV, b_new6, "B"))
    if B:
        na += [("new22", "type D only"), ("new222", "type D only"), ("new7", "type D only")]
        if n == 1:
            na += [("new3", "excluded for i = n in type B"), ("new5", "excluded for i = n in type B")]
    else:
        na += [("new4-2", "type B only"), ("new4-3", "type B only"), ("new6", "type B only"),
               ("en Hmvu", "type B only")]

    if B:
        for m in ms:
            cases.append(RelationCase(
                f"en Hmvu[H,m={m}]", "en Hmvu", UV,
                lambda c, m=m: (c.lin("u", "v", 0, 2).mul(comm(c.e(n, "u"), c.gs.H_numerator(m))),
                                c.gs.H_numerator(m + 1)), "B"))
            cases.append(RelationCase(
                f"en Hmvu[Htilde,m={m + 1}]", "en Hmvu", UV,
                lambda c, m=m: (c.lin("u", "v", 0, 2).mul(comm(c.e(n, "u"), c.gs.H_tilde_numerator(m + 1))),
                                c.gs.H_tilde_numerator(m + 2)), "B"))

    # products of shifted h's
    for ell in ells:
        for i in range(1, n + 1):
            cases.append(RelationCase(
                f"down 1[i={i},l={ell}]", "down 1", UV,
                lambda c, i=i, ell=ell: (
                    c.lin("u", "v").mul(comm(c.h_down(i, ell, "u"), c.e(i, "v"))),
                    c.h_down(i, ell, "u").mul(c.e(i, "v") - c.e(i, "u")).scale(ell))))
            if i >= 2:
                cases.append(RelationCase(
                    f"up 1[i={i},l={ell}]", "up 1", UV,
                    lambda c, i=i, ell=ell: (
                        c.lin("u", "v").mul(comm(c.h_up(i, ell, "u"), c.e(i - 1, "v"))),
                        c.h_up(i, ell, "u").mul(c.e(i - 1, "u") - c.e(i - 1, "v")).scale(ell))))
        if D:
            cases.append(RelationCase(
                f"up 2-2n[l={ell}]", "up 2-2n", UV,
                lambda c, ell=ell: (
                    c.lin("u", "v").mul(comm(c.h_up(n + 1, ell, "u"), c.e(n, "v"))),
                    c.h_up(n + 1, ell, "u").mul(c.e(n, "u") - c.e(n, "v")).scale(ell)), "D"))
            cases.append(RelationCase(
                f"down 2-2n[l={ell}]", "down 2-2n", UV,
                lambda c, ell=ell: (
                    c.lin("u", "v").mul(comm(c.h_down(n + 1, ell, "u"), c.e(n - 1, "v"))),
                    c.h_down(n + 1, ell, "u").mul(c.e(n - 1, "v") - c.e(n - 1, "u")).scale(ell)), "D"))
    if n == 1:
        na.append(("up 1", "needs i >= 2"))
    if B:
        na += [("up 2-2n", "type D only"), ("down 2-2n", "type D only")]
    return cases, na


# ---------------------------------------------------------------------------
# running cases


def params_of(gs: GaussianSet) -> Dict[str, int]:
    return {"N": gs.N, "p": gs.p, "D": gs.qb.D, "K": gs.K}


def _fmt_counterexample(qb: QuotientBasis, vars, e, diff: AlgElem) -> str:
    mono = " ".join(f"{v}^{-k}" for v, k in zip(vars, e) if k)
    text = qb.fmt(diff)
    if len(text) > 300:
        text = text[:300] + " ..."
    return f"coefficient of [{mono or '1'}] differs by {text}"


def check_relation(case: RelationCase, gs: GaussianSet, suite: str = "presentation",
                   var_cap: Optional[int] = None) -> CheckReport:
    """Evaluate both cleared sides and compare every exact coefficient."""
    t0 = time.time()
    params = params_of(gs)
    if case.types != "BD" and gs.type not in case.types:
        return CheckReport(case.id, case.tag, suite, params, NA, note=f"type {case.types} only")
    if var_cap is None:
        var_cap = gs.K if len(case.vars) <= 3 else min(gs.K, 2)
    ctx = Ctx(gs, case.vars, var_cap)
    try:
        lhs, rhs = case.build(ctx)
    except DegreeOverflow as exc:
        return CheckReport(case.id, case.tag, suite, params, SKIPPED, note=str(exc),
                           seconds=time.time() - t0)
    compared, skipped, bad = compare(lhs, rhs, var_cap)
    vars = lhs._align(rhs)[0].vars
    if bad is not None:
        status = FAIL
        cex = _fmt_counterexample(gs.qb, vars, *bad)
    else:
        status = PASS if compared else SKIPPED
        cex = None
    return CheckReport(case.id, case.tag, suite, params, status, compared, skipped, cex,
                       time.time() - t0, case.note)


def _na_reports(gs, na, suite):
    return [CheckReport(tag, tag, suite, params_of(gs), NA, note=reason) for tag, reason in na]


_POOL_STATE: Dict[str, object] = {}


def _run_one(k: int) -> CheckReport:
    st = _POOL_STATE
    return check_relation(st["cases"][k], st["gs"], st["suite"])


def run_cases(cases: List[RelationCase], gs: GaussianSet, suite: str,
              workers: int = 1) -> List[CheckReport]:
    """Run cases, in forked worker processes when workers > 1; the result
    order is the case order either way."""
    if workers <= 1 or len(cases) < 2:
        return [check_relation(c, gs, suite) for c in cases]
    import multiprocessing as mp
    _POOL_STATE.update(cases=cases, gs=gs, suite=suite)
    try:
        with mp.get_context("fork").Pool(workers) as pool:
            return pool.map(_run_one, range(len(cases)))
    finally:
        _POOL_STATE.clear()


def check_presentation(gs: GaussianSet, workers: int = 1) -> List[CheckReport]:
    cases, na = presentation_cases(gs)
    return run_cases(cases, gs, "presentation", workers) + _na_reports(gs, na, "presentation")


def check_lemma_catalog(gs: GaussianSet, ms=(0, 1, 2), ells=(1, 2, 3),
                        workers: int = 1) -> List[CheckReport]:
    cases, na = lemma_cases(gs, ms, ells)
    return run_cases(cases, gs, "lemma", workers) + _na_reports(gs, na, "lemma")


# ---------------------------------------------------------------------------
# centrality and coefficient relations


def check_centrality(z: AlgElem, qb: QuotientBasis, name: str = "z", tag: str = "center",
                     params: Optional[Dict[str, int]] = None) -> CheckReport:
    """[z, t_kl^(s)] = 0 for every generator whose degree fits the budget."""
    t0 = time.time()
    params = params or {"N": qb.N, "p": qb.p, "D": qb.D}
    dz = qb.loop_degree(z)
    dz = 0 if dz == float("-inf") else dz
    compared = skipped = 0
    N = qb.N
    for s in range(1, qb.D + 1):
        if dz + s > qb.D:
            skipped += N * N
            continue
        for k in range(1, N + 1):
            for l in range(1, N + 1):
                c = qb.commutator(z, qb.gen(k, l, s))
                compared += 1
                if c:
                    return CheckReport(name, tag, "center", params, FAIL, compared, skipped,
                                       f"[{name}, t{k}{l}({s})] = {qb.fmt(c)[:300]}",
                                       time.time() - t0)
    status = PASS if compared else SKIPPED
    return CheckReport(name, tag, "center", params, status, compared, skipped, None,
                       time.time() - t0, f"probed generator degrees 1..{qb.D - dz}")


def check_zero(x: AlgElem, qb: QuotientBasis, name: str, tag: str, suite: str,
               params: Dict[str, int]) -> CheckReport:
    status = PASS if not x else FAIL
    return CheckReport(name, tag, suite, params, status, 1, 0,
                       None if not x else qb.fmt(x)[:300])


def check_coefficient_relation_e(gs: GaussianSet, i: int) -> CheckReport:
    """[x^(r), x^(s)] = sum_{t=r}^{s-1} x^(t) x^(r+s-1-t) for r < s, where x is
    e_i when (alpha_i, alpha_i) = 2 and the rescaled e_{n+1,n+2} for i = n
    in type B."""
    t0 = time.time()
    qb, p = gs.qb, gs.p
    if gs.type == "B" and i == gs.n:
        s_ = gs.e_tilde_B()
        name = "coeff-rel-e[tilde e_{n+1,n+2}]"
    else:
        s_ = gs.e(i)
        name = f"coeff-rel-e[i={i}]"
    x = s_.coeffs()
    compared = skipped = 0
    for r in range(1, gs.K + 1):
        for s in range(r, gs.K + 1):
            if r + s > qb.D:
                skipped += 1
                continue
            lhs = qb.commutator(x[r], x[s])
            rhs: AlgElem = {}
            for t in range(r, s):
                add_into(rhs, qb.mul(x[t], x[r + s - 1 - t]), 1, p)
            compared += 1
            diff = sub(lhs, rhs, p)
            if diff:
                return CheckReport(name, "coeff-rel-e", "center", params_of(gs), FAIL, compared,
                                   skipped, f"(r,s)=({r},{s}): {qb.fmt(diff)[:300]}",
                                   time.time() - t0)
    return CheckReport(name, "coeff-rel-e", "center", params_of(gs),
                       PASS if compared else SKIPPED, compared, skipped, None, time.time() - t0)


def center_suite(gs: GaussianSet) -> List[CheckReport]:
    """Centrality of c, b_i, a_i, p_ij, q_ji coefficients and of
    (e_ij^(1))^p, (f_ji^(1))^p; vanishing of b_i^(r) for 1 < r < p; and the
    double-formula agreements for c, bc, a_i and the type B e_{n+1,n+2}."""
    qb, p, K, n = gs.qb, gs.p, gs.K, gs.n
    P = params_of(gs)
    out: List[CheckReport] = []
    c = gs.c_rtt()
    for r in range(1, K + 1):
        out.append(check_centrality(c.coeff(r), qb, f"c^({r})", "HC center", P))
    for i in range(1, n + 2):
        b = gs.b(i)
        for r in range(1, K + 1):
            out.append(check_centrality(b.coeff(r), qb, f"b_{i}^({r})", "bir in center", P))
        for r in range(2, min(p, K + 1)):
            out.append(check_zero(b.coeff(r), qb, f"b_{i}^({r})=0", "diag center", "center", P))
    for i in range(1, n + 1):
        a = gs.a(i)
        for r in range(1, K + 1):
            out.append(check_centrality(a.coeff(r), qb, f"a_{i}^({r})", "aiu", P))
    for (i, j) in index_set_I(gs.N):
        ps, qs = gs.p_series(i, j), gs.q_series(j, i)
        for r in range(p, K + 1):
            out.append(check_centrality(ps.coeff(r), qb, f"p_{i}{j}^({r})", "offdig-power", P))
            out.append(check_centrality(qs.coeff(r), qb, f"q_{j}{i}^({r})", "offdig-power", P))
        e1 = gs.e_ij(i, j).coeff(1)
        f1 = gs.f_ji(j, i).coeff(1)
        if p <= qb.D:
            out.append(check_centrality(qb.power(e1, p), qb, f"(e_{i}{j}^(1))^{p}", "greijrp", P))
            out.append(check_centrality(qb.power(f1, p), qb, f"(f_{j}{i}^(1))^{p}", "greijrp", P))
        else:
            out.append(CheckReport(f"(e_{i}{j}^(1))^{p}", "greijrp", "center", P, SKIPPED,
                                   note="p exceeds the degree cap"))
    for i in range(1, n + 1):
        out.append(check_coefficient_relation_e(gs, i))
    out.extend(cross_formula_suite(gs))
    return out


def _series_report(name, tag, gs, lhs, rhs, suite="center") -> CheckReport:
    t0 = time.time()
    compared, skipped, bad = compare(lhs, rhs, gs.K)
    if bad is not None:
        return CheckReport(name, tag, suite, params_of(gs), FAIL, compared, skipped,
                           _fmt_counterexample(gs.qb, lhs.vars, *bad), time.time() - t0)
    return CheckReport(name, tag, suite, params_of(gs), PASS if compared else SKIPPED,
                       compared, skipped, None, time.time() - t0)


def cross_formula_suite(gs: GaussianSet) -> List[CheckReport]:
    out = []
    P = params_of(gs)
    bad = scalar_matrix_defect(gs.c_rtt_matrix(), gs.K)
    out.append(CheckReport("c-scalar-matrix", "HC center", "center", P, PASS if bad is None else FAIL,
                           gs.N * gs.N, 0, None if bad is None else f"entry/exponent {bad}"))
    out.append(_series_report("c-rtt=c-drinfeld", "HC center via Drinfeld", gs, gs.c_rtt(),
                              gs.c_drinfeld()))
    out.append(_series_report("bc-product=bc-b", "p-center generators", gs, gs.bc_product(),
                              gs.bc_from_b()))
    for i in range(1, gs.n + 1):
        out.append(_series_report(f"a_{i}-product=a_{i}-quotient", "aiu", gs, gs.a_product(i),
                                  gs.a_quotient(i)))
    if gs.type == "B":
        n = gs.n
        out.append(_series_report("e_{n+1,n+2}=-e_n(u-1/2)", "offdig-power", gs,
                                  gs.e_ij(n + 1, n + 2), -gs.e(n).shift(Fraction(1, 2))))
    return out


# ---------------------------------------------------------------------------
# automorphisms


def tau_elem(x: AlgElem, qb: QuotientBasis) -> AlgElem:
    """Transposition anti-automorphism on free-algebra words."""
    t = qb.table
    out: AlgElem = {}
    for w, c in x.items():
        w2 = tuple(t.code(j, i, r) for (i, j, r) in (t.decode(g) for g in reversed(w)))
        out[w2] = (out.get(w2, 0) + c) % qb.p
    return {w: c for w, c in out.items() if c}


def perm_elem(x: AlgElem, qb: QuotientBasis, w: Sequence[int]) -> AlgElem:
    """t_ij^(r) -> t_{w(i) w(j)}^(r); ``w`` is 1-based as a tuple w[i-1]."""
    t = qb.table
    out: AlgElem = {}
    for word, c in x.items():
        w2 = tuple(t.code(w[i - 1], w[j - 1], r) for (i, j, r) in (t.decode(g) for g in word))
        out[w2] = (out.get(w2, 0) + c) % qb.p
    return {k: c for k, c in out.items() if c}


def mu_f_elem(x: AlgElem, qb: QuotientBasis, f: Sequence[int]) -> AlgElem:
    """t_ij(u) -> f(u) t_ij(u) with f = (1, f_1, f_2, ...)."""
    t, p = qb.table, qb.p
    images: Dict[int, AlgElem] = {}

    def image(g):
        got = images.get(g)
        if got is None:
            i, j, r = t.decode(g)
            got = {}
            for s in range(0, r + 1):
                fs = f[s] if s < len(f) else 0
                if fs % p == 0:
                    continue
                if r - s == 0:
                    term = const(1 if i == j else 0, p)
                else:
                    term = {(t.code(i, j, r - s),): 1}
                add_into(got, term, fs, p)
            images[g] = got
        return got

    out: AlgElem = {}
    for word, c in x.items():
        acc: AlgElem = {(): 1}
        for g in word:
            acc = concat_product(acc, image(g), p)
        add_into(out, acc, c, p)
    return out


def admissible_permutations(N: int) -> List[Tuple[int, ...]]:
    pr = lambda i: N + 1 - i
    return [w for w in itertools.permutations(range(1, N + 1))
            if all(w[pr(i) - 1] == pr(w[i - 1]) for i in range(1, N + 1))]


def check_automorphisms(qb: QuotientBasis, rels: RelationSet, K: Optional[int] = None,
                        n_random: int = 3, seed: int = 0) -> List[CheckReport]:
    P = {"N": qb.N, "p": qb.p, "D": qb.D}
    out: List[CheckReport] = []

    rels = rels.encoded_for(qb.table)

    def run(name, tag, fn):
        t1 = time.time()
        for k, rel in enumerate(rels.relations):
            img = qb.normal_form(fn(rel.elem))
            if img:
                out.append(CheckReport(name, tag, "automorphisms", P, FAIL, k + 1, 0,
                                       f"relation {rel.source}: {qb.fmt(img)[:300]}",
                                       time.time() - t1))
                return
        out.append(CheckReport(name, tag, "automorphisms", P, PASS, len(rels.relations), 0, None,
                               time.time() - t1))

    run("tau(relations)", "transposition", lambda x: tau_elem(x, qb))
    for w in admissible_permutations(qb.N):
        run(f"perm{w}(relations)", "permutation", lambda x, w=w: perm_elem(x, qb, w))
    rng = random.Random(seed)
    fs = [[1] + [rng.randrange(qb.p) for _ in range(qb.D)] for _ in range(n_random)]
    for f in fs:
        run(f"mu_f{tuple(f)}(relations)", "auto:mu_f", lambda x, f=f: mu_f_elem(x, qb, f))

    if K is not None:
        gs = GaussianSet(qb, K)
        out.extend(check_tau_gaussian(gs))
        for f in fs:
            out.extend(check_mu_f_covariance(gs, f))
    return out


def check_tau_gaussian(gs: GaussianSet) -> List[CheckReport]:
    """tau(h_i) = h_i and tau(e_ij) = f_ji coefficient-wise."""
    qb = gs.qb
    P = params_of(gs)
    out = []
    for i in range(1, gs.N + 1):
        for r in range(1, gs.K + 1):
            x = gs.h(i).coeff(r)
            d = sub(qb.normal_form(tau_elem(x, qb)), x, qb.p)
            out.append(check_zero(d, qb, f"tau(h_{i}^({r}))", "transposition", "automorphisms", P))
    for (i, j), e in sorted(gs.e_series.items()):
        for r in range(1, gs.K + 1):
            d = sub(qb.normal_form(tau_elem(e.coeff(r), qb)), gs.f_ji(j, i).coeff(r), qb.p)
            out.append(check_zero(d, qb, f"tau(e_{i}{j}^({r}))=f_{j}{i}^({r})", "transposition",
                                  "automorphisms", P))
    return out


def check_mu_f_covariance(gs: GaussianSet, f: Sequence[int]) -> List[CheckReport]:
    """Gauss decomposition of f(u)T(u): h_i -> f h_i, e and f unchanged."""
    qb, K = gs.qb, gs.K
    fser = series_from_coeffs(qb, [const(f[r] if r < len(f) else 0, qb.p) for r in range(K + 1)])
    g2 = GaussianSet(qb, K, gs.T.map(lambda s: fser.mul(s)))
    name = f"mu_f{tuple(f[:K + 1])}"
    out = []
    for i in range(1, gs.N + 1):
        out.append(_series_report(f"{name}: h_{i}", "auto:mu_f", gs, g2.h(i), fser.mul(gs.h(i)),
                                  "automorphisms"))
    for key in sorted(gs.e_series):
        out.append(_series_report(f"{name}: e_{key[0]}{key[1]}", "auto:mu_f", gs, g2.e_series[key],
                                  gs.e_series[key], "automorphisms"))
    for key in sorted(gs.f_series):
        out.append(_series_report(f"{name}: f_{key[0]}{key[1]}", "auto:mu_f", gs, g2.f_series[key],
                                  gs.f_series[key], "automorphisms"))
    return out


# ---------------------------------------------------------------------------
# ideal-level checks


def c_symmetry_reports(qb: QuotientBasis) -> List[CheckReport]:
    """t_ij^(1) + t_{j'i'}^(1) - delta_ij (t_11^(1) + t_{1'1'}^(1)) = 0."""
    N, p = qb.N, qb.p
    P = {"N": N, "p": p, "D": qb.D}
    pr = lambda i: N + 1 - i
    out = []
    c1 = lin_comb([(1, qb.raw_gen(1, 1, 1)), (1, qb.raw_gen(N, N, 1))], p)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            x = lin_comb([(1, qb.raw_gen(i, j, 1)), (1, qb.raw_gen(pr(j), pr(i), 1))], p)
            if i == j:
                x = sub(x, c1, p)
            out.append(check_zero(qb.normal_form(x), qb, f"c-symmetry[i={i},j={j}]", "HC center",
                                  "presentation", P))
    return out


def ideal_reports(qb: QuotientBasis, rels: Optional[RelationSet] = None) -> List[CheckReport]:
    """Soundness of the closure and the PBW dimension count."""
    P = {"N": qb.N, "p": qb.p, "D": qb.D}
    out = []
    t0 = time.time()
    if rels is None:
        rels = generate_rtt_relations(qb.N, qb.D, qb.p)
    rels = rels.encoded_for(qb.table)
    bad = None
    for rel in rels.relations:
        x = qb.normal_form(rel.elem)
        if x:
            bad = f"relation {rel.source} reduces to {qb.fmt(x)[:300]}"
            break
    out.append(CheckReport("rtt-soundness", "def relations RTT", "presentation", P,
                           FAIL if bad else PASS, len(rels), 0, bad, time.time() - t0))
    dims, expected = qb.dimensions(), qb.expected_dimensions()
    ok = dims == expected
    out.append(CheckReport("pbw-dimensions", "PBW map", "presentation", P, PASS if ok else FAIL,
                           len(dims), 0, None if ok else f"dimensions {dims} != {expected}",
                           note=f"graded dimensions {dims}"))
    return out


def harness_self_test(N: int = 3, p: int = 3, D: int = 3, K: int = 2, seed: int = 1,
                      mode: str = "relation") -> Tuple[CheckReport, List[CheckReport]]:
    """Corrupt one coefficient and rerun the checks on the corrupted data.

    mode "relation" perturbs one RTT relation and rebuilds the closure;
    mode "rule" perturbs one coefficient of a completed commutation rule.
    The self-test passes when at least one check FAILs.
    """
    t0 = time.time()
    rels = generate_rtt_relations(N, D, p)
    rng = random.Random(seed)
    P = {"N": N, "p": p, "D": D}
    reports: List[CheckReport] = []
    if mode == "relation":
        quad = [k for k, r in enumerate(rels.relations) if any(len(w) == 2 for w in r.elem)]
        k = rng.choice(quad)
        rel = rels.relations[k]
        word = sorted(w for w in rel.elem if len(w) == 2)[0]
        bad_elem = dict(rel.elem)
        bad_elem[word] = (bad_elem[word] + 1) % p
        if not bad_elem[word]:
            del bad_elem[word]
        corrupted = RelationSet(N, p, D, list(rels.relations))
        corrupted.relations[k] = Relation(bad_elem, rel.source, rel.top_degree)
        what = f"relation {rel.source} at word {word}"
        try:
            qb = close_ideal(corrupted, N, p, D, max_rules=20000)
        except (BudgetExceeded, IdealCollapse) as exc:
            qb = None
            reports.append(CheckReport("closure", "def relations RTT", "self-test", P, FAIL,
                                       counterexample=str(exc)))
    elif mode == "rule":
        qb = close_ideal(None, N, p, D)
        pairs = sorted((l for l in qb.rules if len(l) == 2 and qb.rules[l]), key=qb.table.key)
        lead = rng.choice(pairs)
        tail = dict(qb.rules[lead])
        word = sorted(tail, key=qb.table.key)[-1]
        tail[word] = (tail[word] + 1) % p
        if not tail[word]:
            del tail[word]
        qb._install(lead, tail)
        what = f"rule {qb.table.fmt_word(lead)} at word {qb.table.fmt_word(word)}"
    else:
        raise ValueError(f"unknown self-test mode {mode!r}")
    if qb is not None:
        reports.extend(ideal_reports(qb, rels))
        reports.extend(c_symmetry_reports(qb))
        try:
            gs = GaussianSet(qb, K)
        except (ValueError, DegreeOverflow) as exc:
            reports.append(CheckReport("gauss", "Gauss decomp", "self-test", P, FAIL,
                                       counterexample=str(exc)))
        else:
            cases, _ = presentation_cases(gs)
            for case in cases:
                # corrupted data may break a construction outright; that counts as a failure
                try:
                    reports.append(check_relation(case, gs, "self-test"))
                except (ArithmeticError, ValueError, KeyError) as exc:
                    reports.append(CheckReport(case.id, case.tag, "self-test", P, FAIL,
                                               counterexample=f"construction failed: {exc}"))
    fails = [r.id for r in reports if r.status == FAIL]
    summary = CheckReport(f"harness-self-test[{mode}]", "self-test", "self-test", P,
                          PASS if fails else FAIL, len(reports), 0,
                          None if fails else "corruption went unnoticed",
                          time.time() - t0,
                          f"corrupted {what}; failing checks: {', '.join(fails[:8]) or 'none'}")
    return summary, reports
