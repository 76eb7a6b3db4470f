"""RTT presentation of X(o_N) truncated at loop degree D.

Elements of the free algebra on the generators t_{ij}^{(r)} are sparse dicts
``{word: coeff}``; a word is a tuple of integer generator codes and the empty
tuple is the unit.  :func:`close_ideal` turns the coefficient relations of the
RTT identity into a rewriting system (a truncated noncommutative Groebner
basis for the word order below), and :class:`QuotientBasis` computes normal
forms against it.

Word order, largest first: loop degree, then filtration degree (so shorter
words win inside one loop degree), then lexicographic order of the
``(i, j, r)`` triples.  Leading words are the ones that get rewritten.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .scalars import PrimeField

log = logging.getLogger(__name__)

Word = Tuple[int, ...]
AlgElem = Dict[Word, int]

ORDER_ID = "loop-filt-lex/v1"
NEG_INF = float("-inf")


class DegreeOverflow(ValueError):
    """A product or normal form would exceed the loop-degree cap."""


class IdealCollapse(RuntimeError):
    """The relations generate the whole algebra (1 lies in the ideal)."""


class BudgetExceeded(RuntimeError):
    """Ideal closure needed more rules than the configured budget."""


# ---------------------------------------------------------------------------
# generators and words


class GenTable:
    """Integer codes for t_{ij}^{(r)}, 1 <= i, j <= N, 1 <= r <= rmax.

    Codes are increasing in (i, j, r) lexicographically, so comparing code
    tuples compares words lexicographically on index triples.
    """

    def __init__(self, N: int, rmax: int):
        self.N = N
        self.rmax = rmax
        self.deg = [0] * (N * N * rmax)
        self.triples = [None] * (N * N * rmax)
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                for r in range(1, rmax + 1):
                    g = self.code(i, j, r)
                    self.deg[g] = r
                    self.triples[g] = (i, j, r)

    def code(self, i: int, j: int, r: int) -> int:
        if not (1 <= r <= self.rmax):
            raise DegreeOverflow(f"generator degree {r} outside 1..{self.rmax}")
        return ((i - 1) * self.N + (j - 1)) * self.rmax + (r - 1)

    def decode(self, g: int) -> Tuple[int, int, int]:
        return self.triples[g]

    def loop_degree(self, w: Word) -> int:
        deg = self.deg
        return sum(deg[g] for g in w)

    def filtration_degree(self, w: Word) -> int:
        return self.loop_degree(w) - len(w)

    def key(self, w: Word):
        d = self.loop_degree(w)
        return (d, d - len(w), w)

    def fmt_word(self, w: Word) -> str:
        if not w:
            return "1"
        return "*".join("t%d%d(%d)" % self.triples[g] for g in w)


def prime(i: int, N: int) -> int:
    """i' = N + 1 - i."""
    return N + 1 - i


# ---------------------------------------------------------------------------
# sparse element helpers


def add_into(acc: AlgElem, x: AlgElem, c: int, p: int) -> AlgElem:
    """acc += c * x (in place)."""
    if c % p == 0:
        return acc
    for w, a in x.items():
        v = (acc.get(w, 0) + c * a) % p
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)
    return acc


def lin_comb(terms: Iterable[Tuple[int, AlgElem]], p: int) -> AlgElem:
    acc: AlgElem = {}
    for c, x in terms:
        add_into(acc, x, c, p)
    return acc


def scale(x: AlgElem, c: int, p: int) -> AlgElem:
    c %= p
    if c == 0:
        return {}
    return {w: a * c % p for w, a in x.items()}


def sub(x: AlgElem, y: AlgElem, p: int) -> AlgElem:
    return add_into(dict(x), y, -1, p)


def const(c: int, p: int) -> AlgElem:
    c %= p
    return {(): c} if c else {}


def concat_product(x: AlgElem, y: AlgElem, p: int) -> AlgElem:
    """Product in the free algebra (no reduction)."""
    out: AlgElem = {}
    for w1, a in x.items():
        for w2, b in y.items():
            w = w1 + w2
            v = (out.get(w, 0) + a * b) % p
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return out


# ---------------------------------------------------------------------------
# relations


@dataclass
class Relation:
    elem: AlgElem
    source: Tuple[int, int, int, int, int, int]  # (i, j, k, l, u-power, v-power)
    top_degree: int


@dataclass
class RelationSet:
    N: int
    p: int
    D: int
    relations: List[Relation] = field(default_factory=list)
    rmax: Optional[int] = None  # code table width; defaults to D

    def __iter__(self):
        return iter(self.relations)

    def __len__(self):
        return len(self.relations)

    def elements(self) -> List[AlgElem]:
        return [r.elem for r in self.relations]

    def encoded_for(self, table: "GenTable") -> "RelationSet":
        """The same relations with words re-encoded in ``table``."""
        src = GenTable(self.N, self.rmax or self.D)
        if src.rmax == table.rmax:
            return self
        rels = [Relation({tuple(table.code(*src.decode(g)) for g in w): c for w, c in r.elem.items()},
                         r.source, r.top_degree) for r in self.relations]
        return RelationSet(self.N, self.p, self.D, rels, table.rmax)


# (u - v)(u - v - kappa) and friends as {(u-exp, v-exp): coeff}
def _clearing_polys(kappa: int, p: int):
    P1 = {(2, 0): 1, (1, 1): p - 2, (0, 2): 1, (1, 0): -kappa % p, (0, 1): kappa % p}
    P2 = {(1, 0): 1, (0, 1): p - 1, (0, 0): -kappa % p}
    P3 = {(1, 0): 1, (0, 1): p - 1}
    return P1, P2, P3


def _tword(table: GenTable, i: int, j: int, r: int) -> Optional[Tuple[Word, int]]:
    """t_{ij}^{(r)} as (word, coeff) with t^{(0)} = delta; None when zero."""
    if r == 0:
        return ((), 1) if i == j else None
    return ((table.code(i, j, r),), 1)


def _add_product(acc: AlgElem, table: GenTable, A, a: int, B, b: int, c: int, p: int):
    """acc += c * t_A^{(a)} t_B^{(b)}."""
    x = _tword(table, A[0], A[1], a)
    if x is None:
        return
    y = _tword(table, B[0], B[1], b)
    if y is None:
        return
    w = x[0] + y[0]
    v = (acc.get(w, 0) + c) % p
    if v:
        acc[w] = v
    else:
        acc.pop(w, None)


def rtt_coefficient(table: GenTable, N: int, p: int, kappa: int,
                    i: int, j: int, k: int, l: int, m: int, n: int) -> AlgElem:
    """Coefficient of u^m v^n in the cleared RTT identity for (i, j, k, l).

    The identity is multiplied through by (u - v)(u - v - kappa); everything
    is moved to one side so the returned element must vanish in X(o_N).
    """
    P1, P2, P3 = _clearing_polys(kappa, p)
    acc: AlgElem = {}
    # (u-v)(u-v-kappa) [t_ij(u), t_kl(v)]
    for (al, be), c in P1.items():
        a, b = al - m, be - n
        if a >= 1 and b >= 1:
            _add_product(acc, table, (i, j), a, (k, l), b, c, p)
            _add_product(acc, table, (k, l), b, (i, j), a, -c, p)
    # -(u-v-kappa) (t_kj(u) t_il(v) - t_kj(v) t_il(u))
    for (al, be), c in P2.items():
        a, b = al - m, be - n
        if a >= 0 and b >= 0:
            _add_product(acc, table, (k, j), a, (i, l), b, -c, p)
            _add_product(acc, table, (k, j), b, (i, l), a, c, p)
    # +(u-v) (d_{k,i'} sum_q t_qj(u) t_q'l(v) - d_{l,j'} sum_q t_kq'(v) t_iq(u))
    ip, jp = prime(i, N), prime(j, N)
    for (al, be), c in P3.items():
        a, b = al - m, be - n
        if a < 0 or b < 0:
            continue
        if k == ip:
            for q in range(1, N + 1):
                _add_product(acc, table, (q, j), a, (prime(q, N), l), b, c, p)
        if l == jp:
            for q in range(1, N + 1):
                _add_product(acc, table, (k, prime(q, N)), b, (i, q), a, -c, p)
    return acc


def generate_rtt_relations(N: int, D: int, p: int, min_degree: int = 1) -> RelationSet:
    """All nonzero coefficient relations of the cleared RTT identity whose
    top loop degree lies in [min_degree, D]."""
    if N < 3:
        raise ValueError("N must be at least 3")
    if D < 1:
        raise ValueError("D must be positive")
    F = PrimeField(p)
    kappa = F.kappa(N)
    table = GenTable(N, D)
    rels = RelationSet(N, p, D)
    for e in range(max(min_degree, 1), D + 1):
        rels.relations.extend(_relations_of_degree(table, N, p, kappa, e))
    return rels


def _relations_of_degree(table, N, p, kappa, e) -> List[Relation]:
    out = []
    rng = range(1, N + 1)
    for m in range(-e, 3):
        n = 2 - e - m
        if n > 2:
            continue
        for i, j, k, l in itertools.product(rng, rng, rng, rng):
            x = rtt_coefficient(table, N, p, kappa, i, j, k, l, m, n)
            if x:
                out.append(Relation(x, (i, j, k, l, m, n), e))
    return out


# ---------------------------------------------------------------------------
# echelon form


def _echelon(rows: List[AlgElem], key, p: int) -> Dict[Word, AlgElem]:
    """Fully interreduced row echelon form.  Returns {leading word: monic row}."""
    pivots: Dict[Word, AlgElem] = {}
    for row in rows:
        row = dict(row)
        while row:
            lead = max(row, key=key)
            piv = pivots.get(lead)
            if piv is None:
                inv = pow(row[lead], -1, p)
                pivots[lead] = {w: c * inv % p for w, c in row.items()}
                break
            add_into(row, piv, -row[lead], p)
    # back substitution, smallest pivot first
    order = sorted(pivots, key=key)
    for lead in order:
        row = pivots[lead]
        for w in sorted((w for w in row if w != lead and w in pivots), key=key, reverse=True):
            c = row.get(w)
            if c:
                add_into(row, pivots[w], -c, p)
    return pivots


# ---------------------------------------------------------------------------
# the quotient


class QuotientBasis:
    """Rewriting system for X(o_N) modulo loop degree > D.

    ``rules`` maps each leading word to its replacement (an element in normal
    form made of smaller words).  Standard words -- those containing no
    leading word -- form the complement basis.
    """

    def __init__(self, N: int, p: int, D: int, lookahead: int = 1):
        self.N = N
        self.p = p
        self.D = D
        self.field = PrimeField(p)
        self.kappa = self.field.kappa(N)
        self.lookahead = lookahead
        self.table = GenTable(N, D + lookahead)
        self.rules: Dict[Word, AlgElem] = {}
        self._linear: Dict[int, AlgElem] = {}
        self._pair: Dict[Tuple[int, int], AlgElem] = {}
        self._long: Dict[Word, AlgElem] = {}
        self._cache: Dict[Word, AlgElem] = {}
        self._cap = D
        self.complete_degree = 0
        self.stats: Dict[str, object] = {}

    # -- rule bookkeeping -------------------------------------------------

    def _install(self, lead: Word, tail: AlgElem):
        self.rules[lead] = tail
        if len(lead) == 1:
            self._linear[lead[0]] = tail
        elif len(lead) == 2:
            self._pair[lead] = tail
        else:
            self._long[lead] = tail
        self._cache.clear()

    def _remove(self, lead: Word):
        self.rules.pop(lead)
        if len(lead) == 1:
            self._linear.pop(lead[0])
        elif len(lead) == 2:
            self._pair.pop(lead)
        else:
            self._long.pop(lead)
        self._cache.clear()

    # -- normal forms -----------------------------------------------------

    def _find_redex(self, w: Word):
        lin = self._linear
        for pos, g in enumerate(w):
            if g in lin:
                return pos, 1, lin[g]
        pair = self._pair
        for pos in range(len(w) - 1):
            t = pair.get((w[pos], w[pos + 1]))
            if t is not None:
                return pos, 2, t
        for lead, t in self._long.items():
            L = len(lead)
            for pos in range(len(w) - L + 1):
                if w[pos:pos + L] == lead:
                    return pos, L, t
        return None

    def nf_word(self, w: Word) -> AlgElem:
        got = self._cache.get(w)
        if got is not None:
            return got
        redex = self._find_redex(w)
        if redex is None:
            out = {w: 1}
        else:
            pos, L, tail = redex
            pre, post = w[:pos], w[pos + L:]
            out = {}
            p = self.p
            for tw, c in tail.items():
                add_into(out, self.nf_word(pre + tw + post), c, p)
        self._cache[w] = out
        return out

    def loop_degree(self, x: AlgElem) -> int:
        if not x:
            return NEG_INF
        ld = self.table.loop_degree
        return max(ld(w) for w in x)

    def normal_form(self, x: AlgElem) -> AlgElem:
        ld = self.table.loop_degree
        out: AlgElem = {}
        p = self.p
        for w, c in x.items():
            if ld(w) > self._cap:
                raise DegreeOverflow(
                    f"word {self.table.fmt_word(w)} has loop degree {ld(w)} > {self._cap}")
            add_into(out, self.nf_word(w), c, p)
        return out

    def mul(self, x: AlgElem, y: AlgElem) -> AlgElem:
        if not x or not y:
            return {}
        dx, dy = self.loop_degree(x), self.loop_degree(y)
        if dx + dy > self._cap:
            raise DegreeOverflow(f"product of degrees {dx} + {dy} exceeds cap {self._cap}")
        out: AlgElem = {}
        p = self.p
        nf = self.nf_word
        for w1, a in x.items():
            for w2, b in y.items():
                add_into(out, nf(w1 + w2), a * b, p)
        return out

    def commutator(self, x: AlgElem, y: AlgElem) -> AlgElem:
        return sub(self.mul(x, y), self.mul(y, x), self.p)

    def power(self, x: AlgElem, k: int) -> AlgElem:
        out = const(1, self.p)
        for _ in range(k):
            out = self.mul(out, x)
        return out

    # -- element constructors --------------------------------------------

    def gen(self, i: int, j: int, r: int) -> AlgElem:
        """t_{ij}^{(r)} reduced; r = 0 gives the constant delta_{ij}."""
        if r == 0:
            return const(1 if i == j else 0, self.p)
        if r > self.D:
            raise DegreeOverflow(f"t^({r}) exceeds cap {self.D}")
        return self.nf_word((self.table.code(i, j, r),))

    def raw_gen(self, i: int, j: int, r: int) -> AlgElem:
        if r == 0:
            return const(1 if i == j else 0, self.p)
        return {(self.table.code(i, j, r),): 1}

    def one(self) -> AlgElem:
        return const(1, self.p)

    # -- filtration -------------------------------------------------------

    def filtration_degree(self, x: AlgElem):
        if not x:
            return NEG_INF
        fd = self.table.filtration_degree
        return max(fd(w) for w in x)

    def leading_part(self, x: AlgElem) -> AlgElem:
        d = self.filtration_degree(x)
        fd = self.table.filtration_degree
        return {w: c for w, c in x.items() if fd(w) == d}

    # -- complement basis -------------------------------------------------

    def is_standard(self, w: Word) -> bool:
        return self._find_redex(w) is None

    def standard_generators(self, r: int) -> List[int]:
        t = self.table
        return [t.code(i, j, r) for i in range(1, self.N + 1) for j in range(1, self.N + 1)
                if t.code(i, j, r) not in self._linear]

    def complement_basis(self, degree: Optional[int] = None) -> List[Word]:
        """Standard words of loop degree <= degree (default D), in word order."""
        cap = self.D if degree is None else degree
        gens = sorted(g for r in range(1, cap + 1) for g in self.standard_generators(r))
        deg = self.table.deg
        out: List[Word] = [()]

        def extend(w: Word, d: int):
            for g in gens:
                if d + deg[g] > cap:
                    continue
                w2 = w + (g,)
                if self._find_redex(w2) is None:
                    out.append(w2)
                    extend(w2, d + deg[g])

        extend((), 0)
        return sorted(out, key=self.table.key)

    def dimensions(self, degree: Optional[int] = None) -> List[int]:
        cap = self.D if degree is None else degree
        dims = [0] * (cap + 1)
        ld = self.table.loop_degree
        for w in self.complement_basis(cap):
            dims[ld(w)] += 1
        return dims

    def expected_dimensions(self, degree: Optional[int] = None) -> List[int]:
        """Graded dimensions predicted by the PBW theorem: dim o_N + 1
        polynomial generators in every loop degree."""
        cap = self.D if degree is None else degree
        g = self.N * (self.N - 1) // 2 + 1
        series = [1] + [0] * cap
        for r in range(1, cap + 1):
            for _ in range(g):
                for d in range(r, cap + 1):
                    series[d] += series[d - r]
        return series

    def fmt(self, x: AlgElem) -> str:
        if not x:
            return "0"
        items = sorted(x.items(), key=lambda kv: self.table.key(kv[0]), reverse=True)
        return " + ".join(f"{c}*{self.table.fmt_word(w)}" for w, c in items)


# ---------------------------------------------------------------------------
# closure


def close_ideal(rels: Optional[RelationSet], N: int, p: int, D: int,
                lookahead: int = 1, max_rules: Optional[int] = None) -> QuotientBasis:
    """Complete the RTT relations to a rewriting system valid through degree D.

    Works one loop degree at a time: the relations of top degree d are
    reduced, echelonized, and installed (commutation rules in degree d,
    linear rules in degree d - 1); then every overlap x*y*z of degree d is
    resolved and any nonzero remainder is fed back.  ``lookahead`` extra
    degrees of RTT relations are used only to harvest rules whose leading
    word has degree <= D (the linear rules of degree D need relations of top
    degree D + 1).
    """
    if rels is not None and (rels.N != N or rels.p != p):
        raise ValueError("relation set was generated for different parameters")
    qb = QuotientBasis(N, p, D, lookahead)
    F = qb.field
    table = qb.table
    kappa = F.kappa(N)
    key = table.key
    stats = {"relations": 0, "overlaps": 0, "stage_rules": []}
    encoded = rels.encoded_for(table) if rels is not None else None

    def relations_at(e: int) -> List[AlgElem]:
        if rels is not None and e <= rels.D:
            return [r.elem for r in encoded.relations if r.top_degree == e]
        return [r.elem for r in _relations_of_degree(table, N, p, kappa, e)]

    def budget_check():
        if max_rules is not None and len(qb.rules) > max_rules:
            raise BudgetExceeded(f"{len(qb.rules)} rules exceed budget {max_rules}")

    def process(polys: List[AlgElem], max_lead_degree: int) -> int:
        """Reduce, echelonize and install; returns the lowest degree touched."""
        lowest = max_lead_degree + 1
        while True:
            reduced = [f for f in (qb.normal_form(f) for f in polys) if f]
            if not reduced:
                return lowest
            pivots = _echelon(reduced, key, p)
            if () in pivots:
                raise IdealCollapse("a nonzero constant lies in the ideal")
            linear = {lead: row for lead, row in pivots.items()
                      if len(lead) == 1 or table.loop_degree(lead) < max_lead_degree}
            if linear:
                for lead, row in linear.items():
                    if table.loop_degree(lead) > max_lead_degree:
                        continue
                    tail = scale({w: c for w, c in row.items() if w != lead}, -1, p)
                    qb._install(lead, tail)
                    lowest = min(lowest, table.loop_degree(lead))
                _refresh_rules(qb, lowest)
                polys = [row for lead, row in pivots.items() if lead not in linear]
                continue
            for lead, row in pivots.items():
                if table.loop_degree(lead) > max_lead_degree:
                    continue
                tail = scale({w: c for w, c in row.items() if w != lead}, -1, p)
                qb._install(lead, tail)
                lowest = min(lowest, table.loop_degree(lead))
            _refresh_rules(qb, lowest)
            return lowest

    qb._cap = D + lookahead
    for d in range(1, D + 1):
        polys = relations_at(d)
        stats["relations"] += len(polys)
        lowest = process(polys, d)
        budget_check()
        # resolve overlaps; redo lower degrees when new low rules appear
        check_from = min(lowest, d)
        while True:
            residues = []
            for e in range(max(check_from, 3), d + 1):
                residues.extend(_overlap_residues(qb, e, stats))
            if not residues:
                break
            log.info("degree %d: %d unresolved overlaps, feeding back", d, len(residues))
            lowest = process(residues, d)
            budget_check()
            check_from = min(lowest, d)
        stats["stage_rules"].append(len(qb.rules))
        log.debug("degree %d: %d rules", d, len(qb.rules))
    for e in range(D + 1, D + lookahead + 1):
        polys = relations_at(e)
        stats["relations"] += len(polys)
        process(polys, D)
        budget_check()
    qb._cap = D
    qb._cache.clear()
    dims, expected = qb.dimensions(), qb.expected_dimensions()
    complete = 0
    for d in range(1, D + 1):
        if dims[d] != expected[d]:
            break
        complete = d
    qb.complete_degree = complete
    stats["dimensions"] = dims
    stats["expected_dimensions"] = expected
    qb.stats = stats
    if complete < D:
        log.warning("quotient dimensions %s differ from PBW prediction %s", dims, expected)
    return qb


def _refresh_rules(qb: QuotientBasis, from_degree: int):
    """Re-reduce rule tails (and demote rules whose lead became reducible)."""
    changed = True
    while changed:
        changed = False
        for lead in sorted(qb.rules, key=qb.table.key):
            tail = qb.rules[lead]
            # a lead containing another lead is no longer a rule
            others = _contains_other_lead(qb, lead)
            if others:
                qb._remove(lead)
                poly = dict(tail)
                add_into(poly, {lead: 1}, -1, qb.p)
                red = qb.normal_form(poly)
                if red:
                    lead2 = max(red, key=qb.table.key)
                    if lead2 == ():
                        raise IdealCollapse("a nonzero constant lies in the ideal")
                    inv = pow(red[lead2], -1, qb.p)
                    qb._install(lead2, scale({w: c for w, c in red.items() if w != lead2},
                                             -inv, qb.p))
                changed = True
                break
            new_tail = qb.normal_form(tail)
            if new_tail != tail:
                qb.rules[lead] = new_tail
                if len(lead) == 1:
                    qb._linear[lead[0]] = new_tail
                elif len(lead) == 2:
                    qb._pair[lead] = new_tail
                else:
                    qb._long[lead] = new_tail
                qb._cache.clear()


def _contains_other_lead(qb: QuotientBasis, lead: Word) -> bool:
    for L in range(1, len(lead) + 1):
        for pos in range(len(lead) - L + 1):
            sw = lead[pos:pos + L]
            if sw != lead and sw in qb.rules:
                return True
    return False


def _overlap_residues(qb: QuotientBasis, d: int, stats) -> List[AlgElem]:
    """Nonzero S-elements for overlaps of leading words in loop degree d."""
    table, p = qb.table, qb.p
    ld = table.loop_degree
    leads = [l for l in qb.rules if len(l) >= 2]
    by_first: Dict[int, List[Word]] = {}
    for l in leads:
        by_first.setdefault(l[0], []).append(l)
    out = []
    for l1 in leads:
        d1 = ld(l1)
        if d1 >= d:
            continue
        for k in range(1, len(l1)):
            suffix = l1[k:]
            for l2 in by_first.get(suffix[0], ()):
                if len(l2) <= len(suffix) or l2[:len(suffix)] != suffix:
                    continue
                w = l1 + l2[len(suffix):]
                if ld(w) != d:
                    continue
                stats["overlaps"] += 1
                rest = l2[len(suffix):]
                pre = l1[:k]
                a = qb.normal_form(concat_product(qb.rules[l1], {rest: 1}, p))
                b = qb.normal_form(concat_product({pre: 1}, qb.rules[l2], p))
                s = sub(a, b, p)
                if s:
                    out.append(s)
    return out
