"""U(o_N[t]/(t^L)) tensored with k[zeta_1..zeta_L] over F_p.

Basis of the Lie algebra: F_ij t^r with i + j < N + 1 and 0 <= r < L, where
F_ij = E_ij - E_{j'i'}.  Any F_ab with a + b > N + 1 is rewritten as
-F_{b'a'}, and F_{a a'} = 0.  Elements are dicts keyed by (mono, zeta) with
mono a nondecreasing tuple of basis indices (PBW order by (r, i, j)) and
zeta a tuple of exponents of zeta_1..zeta_L.
"""

from __future__ import annotations

import time
from typing import Dict, List, Optional, Tuple

from .gaussian import GaussianSet, index_set_I
from .reports import FAIL, PASS, SKIPPED, CheckReport
from .rtt import AlgElem, QuotientBasis
from .scalars import PrimeField

Mono = Tuple[int, ...]
Key = Tuple[Mono, Tuple[int, ...]]
PbwElem = Dict[Key, int]


class CurrentAlgebra:
    def __init__(self, N: int, L: int, p: int):
        if N < 3:
            raise ValueError("N must be at least 3")
        self.N, self.L, self.p = N, L, p
        self.field = PrimeField(p)
        self.gens: List[Tuple[int, int, int]] = sorted(
            ((i, j, r) for r in range(L) for i in range(1, N + 1) for j in range(1, N + 1)
             if i + j < N + 1),
            key=lambda g: (g[2], g[0], g[1]))
        self.index = {g: k for k, g in enumerate(self.gens)}
        self._nozeta = (0,) * L
        self._bracket: Dict[Tuple[int, int], Dict[int, int]] = {}
        self._straight: Dict[Mono, Dict[Mono, int]] = {}

    @property
    def dim(self) -> int:
        return len(self.gens)

    def prime(self, i: int) -> int:
        return self.N + 1 - i

    # -- Lie algebra -------------------------------------------------------

    def F_linear(self, i: int, j: int, r: int) -> Dict[int, int]:
        """F_ij t^r as a combination of basis indices."""
        if r >= self.L:
            return {}
        s = i + j
        if s == self.N + 1:
            return {}
        if s > self.N + 1:
            return {self.index[(self.prime(j), self.prime(i), r)]: self.p - 1}
        return {self.index[(i, j, r)]: 1}

    def bracket_index(self, a: int, b: int) -> Dict[int, int]:
        key = (a, b)
        got = self._bracket.get(key)
        if got is not None:
            return got
        i, j, r = self.gens[a]
        k, l, s = self.gens[b]
        pr, p = self.prime, self.p
        out: Dict[int, int] = {}
        terms = []
        if k == j:
            terms.append((1, i, l))
        if i == l:
            terms.append((-1, k, j))
        if k == pr(i):
            terms.append((-1, pr(j), l))
        if l == pr(j):
            terms.append((1, k, pr(i)))
        for c, x, y in terms:
            for g, d in self.F_linear(x, y, r + s).items():
                out[g] = (out.get(g, 0) + c * d) % p
        out = {g: c for g, c in out.items() if c}
        self._bracket[key] = out
        return out

    def bracket_current(self, a: Tuple[int, int, int], b: Tuple[int, int, int]) -> PbwElem:
        """[F_ij t^r, F_kl t^s] for (i, j, r), (k, l, s) in any index range."""
        out: PbwElem = {}
        for ga, ca in self.F_linear(*a).items():
            for gb, cb in self.F_linear(*b).items():
                for g, c in self.bracket_index(ga, gb).items():
                    key = ((g,), self._nozeta)
                    out[key] = (out.get(key, 0) + ca * cb * c) % self.p
        return {k: c for k, c in out.items() if c}

    # -- constructors ------------------------------------------------------

    def F(self, i: int, j: int, r: int = 0) -> PbwElem:
        return {((g,), self._nozeta): c for g, c in self.F_linear(i, j, r).items()}

    def zeta(self, r: int) -> PbwElem:
        if not 1 <= r <= self.L:
            raise ValueError(f"zeta_{r} outside 1..{self.L}")
        z = [0] * self.L
        z[r - 1] = 1
        return {((), tuple(z)): 1}

    def one(self) -> PbwElem:
        return {((), self._nozeta): 1}

    def const(self, c) -> PbwElem:
        c = self.field(c)
        return {((), self._nozeta): c} if c else {}

    # -- linear structure --------------------------------------------------

    def add(self, x: PbwElem, y: PbwElem, c=1) -> PbwElem:
        c = self.field(c)
        out = dict(x)
        for k, v in y.items():
            out[k] = (out.get(k, 0) + c * v) % self.p
        return {k: v for k, v in out.items() if v}

    def sub(self, x: PbwElem, y: PbwElem) -> PbwElem:
        return self.add(x, y, -1)

    def scale(self, x: PbwElem, c) -> PbwElem:
        c = self.field(c)
        return {k: v * c % self.p for k, v in x.items() if v * c % self.p}

    # -- PBW straightening -------------------------------------------------

    def straighten(self, word: Mono) -> Dict[Mono, int]:
        """Rewrite a product of basis elements in PBW order."""
        got = self._straight.get(word)
        if got is not None:
            return got
        for k in range(len(word) - 1):
            a, b = word[k], word[k + 1]
            if a > b:
                pre, post = word[:k], word[k + 2:]
                out = dict(self.straighten(pre + (b, a) + post))
                for g, c in self.bracket_index(a, b).items():
                    for m, d in self.straighten(pre + (g,) + post).items():
                        out[m] = (out.get(m, 0) + c * d) % self.p
                out = {m: c for m, c in out.items() if c}
                break
        else:
            out = {word: 1}
        self._straight[word] = out
        return out

    def normal_form(self, terms) -> PbwElem:
        """Straighten an iterable of ((word, zeta), coefficient) pairs."""
        out: PbwElem = {}
        p = self.p
        for (word, z), c in terms:
            for m, d in self.straighten(tuple(word)).items():
                key = (m, z)
                out[key] = (out.get(key, 0) + c * d) % p
        return {k: v for k, v in out.items() if v}

    def mul(self, x: PbwElem, y: PbwElem) -> PbwElem:
        def terms():
            for (m1, z1), a in x.items():
                for (m2, z2), b in y.items():
                    yield (m1 + m2, tuple(u + v for u, v in zip(z1, z2))), a * b
        return self.normal_form(terms())

    def commutator(self, x: PbwElem, y: PbwElem) -> PbwElem:
        return self.sub(self.mul(x, y), self.mul(y, x))

    def power(self, x: PbwElem, k: int) -> PbwElem:
        out = self.one()
        for _ in range(k):
            out = self.mul(out, x)
        return out

    # -- restricted structure ----------------------------------------------

    def p_map(self, i: int, j: int, r: int) -> PbwElem:
        """(F_ij t^r)^[p] = delta_ij F_ij t^{rp}, zero once rp >= L."""
        if i != j:
            return {}
        return self.F(i, j, r * self.p)

    def pcenter_generator(self, i: int, j: int, r: int) -> PbwElem:
        x = self.F(i, j, r)
        return self.sub(self.power(x, self.p), self.p_map(i, j, r))

    def fmt(self, x: PbwElem) -> str:
        if not x:
            return "0"
        parts = []
        for (m, z), c in sorted(x.items()):
            fs = ["F%d%d*t^%d" % self.gens[g] for g in m]
            zs = [f"zeta{k + 1}^{e}" for k, e in enumerate(z) if e]
            parts.append(f"{c}*" + ("*".join(fs + zs) or "1"))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# p-center checks


def verify_current_center(N: int, L: int, p: int) -> CheckReport:
    """Each (F_ij t^r)^p - delta_ij F_ij t^{rp} commutes with every basis element."""
    t0 = time.time()
    ca = CurrentAlgebra(N, L, p)
    params = {"N": N, "L": L, "p": p}
    compared = 0
    truncated = sum(1 for (i, j, r) in ca.gens if i == j and r * p >= L and r > 0)
    basis = [ca.F(*g) for g in ca.gens]
    for (i, j, r) in ca.gens:
        z = ca.pcenter_generator(i, j, r)
        for g, y in zip(ca.gens, basis):
            c = ca.commutator(z, y)
            compared += 1
            if c:
                return CheckReport(f"current-center[N={N},L={L},p={p}]", "gene of center", "current",
                                   params, FAIL, compared, 0,
                                   f"[(F{i}{j}t^{r})^p - [p], F{g[0]}{g[1]}t^{g[2]}] = {ca.fmt(c)}",
                                   time.time() - t0)
    note = f"{ca.dim} generators x {ca.dim} basis elements"
    if truncated:
        note += f"; {truncated} diagonal [p]-parts vanish by truncation (rp >= L)"
    return CheckReport(f"current-center[N={N},L={L},p={p}]", "gene of center", "current", params,
                       PASS, compared, 0, None, time.time() - t0, note)


def sym_ad(ca: CurrentAlgebra, y: int, poly: Dict[Mono, int]) -> Dict[Mono, int]:
    """ad(y) on the symmetric algebra: the bracket extended as a derivation."""
    out: Dict[Mono, int] = {}
    p = ca.p
    for mono, c in poly.items():
        for k, g in enumerate(mono):
            rest = mono[:k] + mono[k + 1:]
            for h, d in ca.bracket_index(y, g).items():
                m = tuple(sorted(rest + (h,)))
                out[m] = (out.get(m, 0) + c * d) % p
    return {m: c for m, c in out.items() if c}


def verify_sym_invariance(N: int, L: int, p: int) -> CheckReport:
    """ad(y)(x^p) = 0 in S(o_N[t]/(t^L)) for all basis x, y; as a control,
    some x^w with 0 < w < p must fail to be invariant."""
    t0 = time.time()
    ca = CurrentAlgebra(N, L, p)
    params = {"N": N, "L": L, "p": p}
    rid = f"sym-invariance[N={N},L={L},p={p}]"
    compared = 0
    for x in range(ca.dim):
        xp = {(x,) * p: 1}
        for y in range(ca.dim):
            compared += 1
            img = sym_ad(ca, y, xp)
            if img:
                return CheckReport(rid, "center of S", "current", params, FAIL, compared, 0,
                                   f"ad(x{y})(x{x}^p) = {img}", time.time() - t0)
    for w in range(1, p):
        witness = any(sym_ad(ca, y, {(x,) * w: 1}) for x in range(ca.dim) for y in range(ca.dim))
        if not witness:
            return CheckReport(rid, "center of S", "current", params, FAIL, compared, 0,
                               f"every x^{w} is invariant; the check cannot discriminate",
                               time.time() - t0)
    return CheckReport(rid, "center of S", "current", params, PASS, compared, 0, None,
                       time.time() - t0, "control: lower powers are not invariant")


# ---------------------------------------------------------------------------
# associated graded comparison


def grading(ca: CurrentAlgebra, key: Key) -> int:
    """F t^r and zeta_{r+1} sit in degree r."""
    mono, z = key
    return sum(ca.gens[g][2] for g in mono) + sum(k * e for k, e in enumerate(z))


def gr_generator(ca: CurrentAlgebra, i: int, j: int, r: int) -> PbwElem:
    """Image of t_ij^(r) in degree r - 1: F_ij t^{r-1} + delta_ij zeta_r / 2."""
    x = ca.F(i, j, r - 1)
    if i == j:
        x = ca.add(x, ca.zeta(r), ca.field.half())
    return x


def gr_leading(x: AlgElem, qb: QuotientBasis, ca: CurrentAlgebra) -> Tuple[int, PbwElem]:
    """(filtration degree, image of the leading part) for x in normal form.

    A zero image with nonzero x means the representative's filtration degree
    is inflated; callers report that separately."""
    if not x:
        return -1, {}
    deg = qb.filtration_degree(x)
    lead = qb.leading_part(x)
    table = qb.table
    out: PbwElem = {}
    for w, c in lead.items():
        acc = ca.one()
        for g in w:
            acc = ca.mul(acc, gr_generator(ca, *table.decode(g)))
        out = ca.add(out, acc, c)
    return deg, out


def top_component(ca: CurrentAlgebra, x: PbwElem) -> Tuple[int, PbwElem]:
    if not x:
        return -1, {}
    d = max(grading(ca, k) for k in x)
    return d, {k: v for k, v in x.items() if grading(ca, k) == d}


def gr_targets(gs: GaussianSet, ca: CurrentAlgebra) -> List[Tuple[str, str, AlgElem, int, PbwElem]]:
    """(id, tag, element, claimed degree, claimed gr) at r = 1 plus the
    degree-r identifications that fit the caps."""
    qb, p, n, N, K = gs.qb, gs.p, gs.n, gs.N, gs.K
    typ = gs.type
    half = ca.field.half()
    out = []

    def coeff(series_fn, r):
        # None marks a coefficient beyond the series cap
        return series_fn().coeff(r) if r <= K else None

    def Fd(i, r=0):
        # F_ii t^r for any 1 <= i <= N, using F_ii = -F_{i'i'}
        return ca.F(i, i, r)

    if p <= qb.D:
        for (i, j) in index_set_I(N):
            e1 = gs.e_ij(i, j).coeff(1)
            f1 = gs.f_ji(j, i).coeff(1)
            out.append((f"gr (e_{i}{j}^(1))^{p}", "greijrp", qb.power(e1, p), 0,
                        ca.power(ca.F(i, j), p)))
            out.append((f"gr (f_{j}{i}^(1))^{p}", "greijrp", qb.power(f1, p), 0,
                        ca.power(ca.F(j, i), p)))
            out.append((f"gr p_{i}{j}^({p})", "greijrp-1", coeff(lambda: gs.p_series(i, j), p), 0,
                        ca.power(ca.F(i, j), p)))
            out.append((f"gr q_{j}{i}^({p})", "greijrp-1", coeff(lambda: gs.q_series(j, i), p), 0,
                        ca.power(ca.F(j, i), p)))
        z1 = ca.zeta(1)
        zeta_part = ca.scale(ca.sub(ca.power(z1, p), z1), half)
        b_range = list(range(1, n + 1)) + ([n + 1] if typ == "D" else [])
        for i in b_range:
            Fi = Fd(i)
            claim = ca.add(ca.sub(ca.power(Fi, p), Fi), zeta_part)
            out.append((f"gr b_{i}^({p})", "gr birp", coeff(lambda: gs.b(i), p), 0, claim))
        out.append((f"gr bc^({p})", "gr bcrp", coeff(gs.bc_product, p), 0,
                    ca.sub(ca.power(z1, p), z1)))
        for i in range(1, n + 1):
            k0 = _k_claim(ca, gs, i, 0)
            out.append((f"gr a_{i}^({p})", "main theorem2", coeff(lambda: gs.a(i), p), 0,
                        ca.sub(ca.power(k0, p), k0)))
    for r in range(0, K):
        for i in range(1, n + 1):
            out.append((f"gr k_{i}^({r + 1})", "grkir", gs.k(i).coeff(r + 1), r,
                        _k_claim(ca, gs, i, r)))
        for i in range(1, n + 2):
            if typ == "B" and i == n + 1:
                claim = ca.scale(ca.zeta(r + 1), half)
            else:
                claim = ca.add(Fd(i, r), ca.zeta(r + 1), half)
            out.append((f"gr h_{i}^({r + 1})", "identification-2" if i == n + 1 else
                        "identification-1", gs.h(i).coeff(r + 1), r, claim))
        for (i, j) in sorted(gs.e_series):
            if i < j < N + 1 - i:
                out.append((f"gr e_{i}{j}^({r + 1})", "identification-1",
                            gs.e_ij(i, j).coeff(r + 1), r, ca.F(i, j, r)))
                out.append((f"gr f_{j}{i}^({r + 1})", "identification-1",
                            gs.f_ji(j, i).coeff(r + 1), r, ca.F(j, i, r)))
    return out


def _k_claim(ca: CurrentAlgebra, gs: GaussianSet, i: int, r: int) -> PbwElem:
    n = gs.n
    if i <= n - 1:
        return ca.sub(ca.F(i + 1, i + 1, r), ca.F(i, i, r))
    if gs.type == "B":
        return ca.scale(ca.F(n, n, r), -1)
    return ca.scale(ca.add(ca.F(n, n, r), ca.F(n - 1, n - 1, r)), -1)


def verify_gr_formulas(gs: GaussianSet, ca: Optional[CurrentAlgebra] = None) -> List[CheckReport]:
    qb = gs.qb
    if ca is None:
        ca = CurrentAlgebra(gs.N, qb.D + 1, gs.p)
    params = {"N": gs.N, "p": gs.p, "D": qb.D, "K": gs.K}
    out = []
    for rid, tag, z, deg, claim in gr_targets(gs, ca):
        t0 = time.time()
        if z is None:
            out.append(CheckReport(rid, tag, "gr", params, SKIPPED, 0, 1, None, 0.0,
                                   f"coefficient beyond series cap K={gs.K}"))
            continue
        fd, img = gr_leading(z, qb, ca)
        if z and not img:
            out.append(CheckReport(rid, tag, "gr", params, SKIPPED, 0, 1,
                                   None, time.time() - t0,
                                   f"degree-inflated representative: leading support "
                                   f"{qb.fmt(qb.leading_part(z))[:200]} maps to 0"))
            continue
        if fd != deg:
            out.append(CheckReport(rid, tag, "gr", params, FAIL, 1, 0,
                                   f"filtration degree {fd}, expected {deg}", time.time() - t0))
            continue
        diff = ca.sub(img, claim)
        status = PASS if not diff else FAIL
        out.append(CheckReport(rid, tag, "gr", params, status, 1, 0,
                               None if not diff else f"gr - claim = {ca.fmt(diff)[:300]}",
                               time.time() - t0))
    return out
