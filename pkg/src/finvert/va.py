"""Finite vertex algebras given by truncated state-field tables.

A table stores ``Y(g_i, z) g_j = sum_t S_t(d, z) g_t`` for generator pairs,
each ``S_t`` a Laurent series in ``z`` known exactly up to the window.  All
other products follow from the translation rules

    (d u)_(n) v = -n u_(n-1) v
    u_(n) (d^s v) = sum_k C(s, k) [n]_k d^(s-k) u_(n-k) v

and every verdict below holds within the window it reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Mapping, Sequence

from .cdmod import FgModule, ModElement, Submodule, membership, span, whole, zero_submodule
from .exact import (DEL, LAM, ONE, ZERO, D, L, Poly, Series, WindowError, as_fraction,
                    nullspace, power_series_inverse, truncated_exp)
from .lca import ConformalAlgebra, central_series
from .gcmat import (action_nilpotent, adjoint_matrix, candidate_weights, weight_chain)


class OddPsiError(ValueError):
    """psi(z) != psi(-z) without an explicit request to allow it."""


def falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def gbinom(m: int, j: int) -> Fraction:
    """Binomial coefficient valid for negative ``m``."""
    return Fraction(falling(m, j), factorial(j))


@dataclass(frozen=True)
class VertexTable:
    """``fields[(i, j)] = {t: Series}`` for ``Y(g_i, z) g_j``; missing pairs are 0.

    Entries involving the vacuum are filled in from the vacuum axiom when
    absent: ``Y(vac, z) v = v`` and ``Y(v, z) vac = exp(z d) v``.
    """

    base: FgModule
    vacuum: int
    fields: Mapping
    window: int = 8
    name: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        m = self.base
        vac = m.index(self.vacuum) if isinstance(self.vacuum, str) else self.vacuum
        object.__setattr__(self, "vacuum", vac)
        if not m.is_torsion_index(vac):
            raise ValueError("the vacuum must be a torsion generator")
        t = vac - m.free_rank
        if any(m.torsion_del[i][t] for i in range(m.torsion_dim)):
            raise ValueError("d must annihilate the vacuum")
        full = {}
        for (i, j), entry in dict(self.fields).items():
            i = m.index(i) if isinstance(i, str) else i
            j = m.index(j) if isinstance(j, str) else j
            clean = {}
            for tgt, s in entry.items():
                tgt = m.index(tgt) if isinstance(tgt, str) else tgt
                if s.vars != ("z",):
                    raise ValueError("field entries are series in z")
                clean[tgt] = s
            full[(i, j)] = clean
        for j in range(m.size):
            full.setdefault((vac, j), {j: Series.one()})
        for i in range(m.size):
            full.setdefault((i, vac), {i: truncated_exp(D, self.window)})
        object.__setattr__(self, "fields", full)

    @property
    def size(self):
        return self.base.size

    @property
    def vac(self) -> ModElement:
        return self.base.gen(self.vacuum)

    def pole_bound(self) -> int:
        """Largest ``n`` with a possibly nonzero ``g_i (n) g_j``."""
        out = -1
        for entry in self.fields.values():
            for s in entry.values():
                if s.coeffs:
                    out = max(out, -min(e[0] for e in s.coeffs) - 1)
        return out

    def pair_pole(self, i, j) -> int:
        out = -10 ** 9
        for s in self.fields.get((i, j), {}).values():
            if s.coeffs:
                out = max(out, -min(e[0] for e in s.coeffs) - 1)
        return out

    def gen_product(self, i: int, j: int, n: int) -> ModElement:
        key = (i, j, n)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        m = self.base
        out = m.zero()
        for t, s in self.fields.get((i, j), {}).items():
            c = s.coeff(-n - 1)
            if c:
                out = out + m.mul_poly(m.gen(t), c)
        self._cache[key] = out
        return out

    def with_entry(self, i, j, entry) -> "VertexTable":
        f = dict(self.fields)
        m = self.base
        i = m.index(i) if isinstance(i, str) else i
        j = m.index(j) if isinstance(j, str) else j
        f[(i, j)] = entry
        return VertexTable(self.base, self.vacuum, f, self.window, self.name)


def _terms(m: FgModule, e: ModElement):
    """Yield ``(generator, d-power, scalar coefficient)``."""
    for i, c in enumerate(e.free + e.tors):
        if c:
            for r, cr in c.coeffs_in(DEL).items():
                yield i, r, cr


def product(V: VertexTable, a: ModElement, b: ModElement, n: int) -> ModElement:
    """``a_(n) b``; raises :class:`WindowError` when the window is exceeded."""
    m = V.base
    out = m.zero()
    bt = list(_terms(m, b))
    for i, r, ca in _terms(m, a):
        fa = (-1) ** r * falling(n, r)
        if not fa:
            continue
        na = n - r
        for j, s, cb in bt:
            for k in range(s + 1):
                f = comb(s, k) * falling(na, k)
                if not f:
                    continue
                x = V.gen_product(i, j, na - k)
                if x.is_zero():
                    continue
                if s - k:
                    x = m.mul_poly(x, D ** (s - k))
                out = out + x.scale(ca * cb * (fa * f))
    return out


def wick(V: VertexTable, a: ModElement, b: ModElement) -> ModElement:
    """Normally ordered product ``a_(-1) b``."""
    return product(V, a, b, -1)


def pole_bound(V: VertexTable, a: ModElement, b: ModElement) -> int:
    return V.pole_bound() + max(_ddeg(a), 0) + max(_ddeg(b), 0)


def _ddeg(e: ModElement) -> int:
    return max((c.degree(DEL) for c in e.free), default=-1)


def field_coefficients(V: VertexTable, a, b, low: int, high: int) -> dict:
    """``{p: coefficient of z^p in Y(a, z) b}`` for ``low <= p <= high``."""
    return {p: product(V, a, b, -p - 1) for p in range(low, high + 1)}


def lambda_bracket(V: VertexTable, a, b) -> ModElement:
    """``[a_lam b] = sum_n lam^n/n! a_(n) b`` over ``n >= 0``."""
    out = V.base.zero()
    for n in range(pole_bound(V, a, b) + 1):
        x = product(V, a, b, n)
        if not x.is_zero():
            out = out + x.scale(Poly.var(LAM, n) / factorial(n))
    return out


# ---------------------------------------------------------------------------
# axiom checks
# ---------------------------------------------------------------------------

@dataclass
class VertexReport:
    results: dict
    witnesses: dict
    window: int
    checked: int = 0
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return all(self.results.values())


def _orders(V: VertexTable):
    return range(-V.window - 1, V.pole_bound() + 2)


def check_vertex_axioms(V: VertexTable) -> VertexReport:
    m = V.base
    vac = V.vac
    res = {"vacuum": True, "translation": True, "skew": True}
    wit: dict = {}
    checked = skipped = 0

    def fail(kind, msg):
        if res[kind]:
            res[kind] = False
            wit[kind] = msg

    for j, g in enumerate(m.gens()):
        for n in _orders(V):
            try:
                got = product(V, vac, g, n)
            except WindowError:
                skipped += 1
                continue
            checked += 1
            want = g if n == -1 else m.zero()
            if got != want:
                fail("vacuum", f"vac_({n}) {m.labels[j]} = {m.fmt(got)}")
    for i, g in enumerate(m.gens()):
        for n in _orders(V):
            try:
                got = product(V, g, vac, n)
            except WindowError:
                skipped += 1
                continue
            checked += 1
            if n >= 0 and not got.is_zero():
                fail("vacuum", f"{m.labels[i]}_({n}) vac = {m.fmt(got)}")
            if n < 0:
                k = -n - 1
                want = m.mul_poly(g, D ** k / factorial(k))
                if got != want:
                    kind = "vacuum" if k == 0 else "translation"
                    fail(kind, f"{m.labels[i]}_({n}) vac = {m.fmt(got)}, expected {m.fmt(want)}")
    # d acting on torsion generators must be compatible with the table
    for ti in range(m.torsion_dim):
        t = m.free_rank + ti
        dt = m.apply_del(m.gen(t))
        for j, g in enumerate(m.gens()):
            for n in _orders(V):
                try:
                    lhs = product(V, dt, g, n)
                    rhs = product(V, m.gen(t), g, n - 1).scale(Poly.const(-n))
                    lhs2 = product(V, g, dt, n)
                    rhs2 = m.apply_del(product(V, g, m.gen(t), n)) + \
                        product(V, g, m.gen(t), n - 1).scale(Poly.const(n))
                except WindowError:
                    skipped += 1
                    continue
                checked += 1
                if lhs != rhs:
                    fail("translation", f"(d {m.labels[t]})_({n}) {m.labels[j]}")
                if lhs2 != rhs2:
                    fail("translation", f"{m.labels[j]}_({n}) (d {m.labels[t]})")
    ok, w, c, s = _skew(V)
    checked += c
    skipped += s
    if not ok:
        fail("skew", w)
    return VertexReport(res, wit, V.window, checked, skipped)


def skew_rhs(V: VertexTable, a, b, n: int) -> ModElement:
    """``sum_k (-1)^(n+k+1) d^k/k! b_(n+k) a``."""
    m = V.base
    out = m.zero()
    top = pole_bound(V, b, a)
    for k in range(0, max(top - n, -1) + 1):
        x = product(V, b, a, n + k)
        if not x.is_zero():
            out = out + m.mul_poly(x, D ** k * Fraction(1 if (n + k + 1) % 2 == 0 else -1, factorial(k)))
    return out


def _skew(V: VertexTable):
    m = V.base
    checked = skipped = 0
    for i, a in enumerate(m.gens()):
        for j, b in enumerate(m.gens()):
            # most singular order first, so witnesses are short
            for n in reversed(_orders(V)):
                try:
                    lhs = product(V, a, b, n)
                    rhs = skew_rhs(V, a, b, n)
                except WindowError:
                    skipped += 1
                    continue
                checked += 1
                if lhs != rhs:
                    return False, (f"{m.labels[i]}_({n}) {m.labels[j]} = {m.fmt(lhs)} but skew "
                                   f"symmetry gives {m.fmt(rhs)} (z-order {-n - 1})"), checked, skipped
    return True, None, checked, skipped


# ---------------------------------------------------------------------------
# locality
# ---------------------------------------------------------------------------

@dataclass
class LocalityResult:
    status: str                 # "pass", "fail" or "inconclusive"
    order: int | None
    window: int
    per_order: dict             # N -> "zero" | "nonzero" | "unknown"
    witness: tuple | None = None


def locality_check(V: VertexTable, a, b, on, N_max: int = 8, low: int | None = None) -> LocalityResult:
    """Least ``N`` with ``(z-w)^N [Y(a,z), Y(b,w)] on = 0`` on the known window.

    The commutator coefficient at ``z^p w^q`` is
    ``a_(-p-1) b_(-q-1) on - b_(-q-1) a_(-p-1) on``; points needing products
    outside the window are unknown and skipped.
    """
    K = V.window
    if low is None:
        low = -K - V.pole_bound() - 2
    memo: dict = {}

    def C(p, q):
        if (p, q) not in memo:
            try:
                x = product(V, a, product(V, b, on, -q - 1), -p - 1) - \
                    product(V, b, product(V, a, on, -p - 1), -q - 1)
            except WindowError:
                x = None
            memo[(p, q)] = x
        return memo[(p, q)]

    per = {}
    first_nonzero = None
    for N in range(N_max + 1):
        known = 0
        bad = None
        for p in range(low + N, K + 1):
            for q in range(low + N, K + 1):
                if p + q > K:
                    continue
                acc = V.base.zero()
                ok = True
                for i in range(N + 1):
                    c = C(p - i, q - N + i)
                    if c is None:
                        ok = False
                        break
                    if not c.is_zero():
                        acc = acc + c.scale(Poly.const(comb(N, i) * (-1) ** (N - i)))
                if not ok:
                    continue
                known += 1
                if not acc.is_zero():
                    bad = (p, q)
                    break
            if bad:
                break
        if bad:
            per[N] = "nonzero"
            first_nonzero = first_nonzero or (N, bad)
        elif known:
            per[N] = "zero"
            return LocalityResult("pass", N, K, per)
        else:
            per[N] = "unknown"
            return LocalityResult("inconclusive", None, K, per, first_nonzero)
    return LocalityResult("fail", None, K, per, first_nonzero)


# ---------------------------------------------------------------------------
# commutator formula and its generating-function form
# ---------------------------------------------------------------------------

@dataclass
class IdentityResult:
    ok: bool
    witness: tuple | None
    checked: int
    skipped: int

    @property
    def status(self):
        if not self.ok:
            return "fail"
        return "pass" if self.checked else "inconclusive"


def liebracket_check(V: VertexTable, a, b, x, m_range=None, n_range=None) -> IdentityResult:
    """``[a_(m), b_(n)] x = sum_j C(m, j) (a_(j) b)_(m+n-j) x`` for admissible m, n."""
    P = V.pole_bound()
    m_range = m_range if m_range is not None else range(-V.window - 1, P + 2)
    n_range = n_range if n_range is not None else range(-V.window - 1, P + 2)
    top = pole_bound(V, a, b)
    ab = [product(V, a, b, j) for j in range(top + 1)]
    checked = skipped = 0
    for mm in m_range:
        for nn in n_range:
            try:
                lhs = product(V, a, product(V, b, x, nn), mm) - product(V, b, product(V, a, x, mm), nn)
                rhs = V.base.zero()
                for j, y in enumerate(ab):
                    if not y.is_zero():
                        rhs = rhs + product(V, y, x, mm + nn - j).scale(gbinom(mm, j))
            except WindowError:
                skipped += 1
                continue
            checked += 1
            if lhs != rhs:
                return IdentityResult(False, (mm, nn), checked, skipped)
    return IdentityResult(True, None, checked, skipped)


def genwick_check(V: VertexTable, a, b, c, orders=None) -> IdentityResult:
    """``[a_lam Y(b,z)c] = e^(lam z) Y([a_lam b], z)c + Y(b,z)[a_lam c]``
    compared as polynomials in ``lam`` for each ``z``-order."""
    m = V.base
    ab = lambda_bracket(V, a, b)
    ac = lambda_bracket(V, a, c)
    lo = -pole_bound(V, b, c) - 1
    lo_ab = -pole_bound(V, ab, c) - 1 if not ab.is_zero() else 0
    orders = orders if orders is not None else range(min(lo, lo_ab), V.window + 1)
    checked = skipped = 0
    for p in orders:
        try:
            bc = product(V, b, c, -p - 1)
            lhs = lambda_bracket(V, a, bc)
            rhs = product(V, b, ac, -p - 1)
            if not ab.is_zero():
                for i in range(0, p - lo_ab + 1):
                    y = product(V, ab, c, -(p - i) - 1)
                    if not y.is_zero():
                        rhs = rhs + y.scale(Poly.var(LAM, i) / factorial(i))
        except WindowError:
            skipped += 1
            continue
        checked += 1
        diff = lhs - rhs
        if not diff.is_zero():
            k = min(diff.coeffs_in(LAM))
            return IdentityResult(False, (k, p), checked, skipped)
    return IdentityResult(True, None, checked, skipped)


def conformal_shadow(V: VertexTable) -> ConformalAlgebra:
    """Lie conformal algebra of the non-negative products."""
    m = V.base
    table = {}
    for i in range(m.size):
        for j in range(m.size):
            e = lambda_bracket(V, m.gen(i), m.gen(j))
            if not e.is_zero():
                table[(i, j)] = e
    return ConformalAlgebra(m, table, f"shadow({V.name})" if V.name else "shadow")


# ---------------------------------------------------------------------------
# ideals
# ---------------------------------------------------------------------------

@dataclass
class IdealCandidate:
    submodule: Submodule
    closure_certified: bool


@dataclass
class ProductSpan:
    submodule: Submodule
    window_conditional: bool


def _elements(S) -> list:
    if isinstance(S, Submodule):
        return S.canonical_generators()
    return list(S)


def ideal_product(V: VertexTable, A, B, nonneg_only: bool = False) -> ProductSpan:
    """Span of ``a_(j) b`` over generators of ``A`` and ``B`` (``j >= 0`` when
    ``nonneg_only``, otherwise down to the window floor)."""
    out = []
    cond = False
    lo = 0 if nonneg_only else -V.window - 1
    for a in _elements(A):
        for b in _elements(B):
            for j in range(lo, pole_bound(V, a, b) + 1):
                try:
                    x = product(V, a, b, j)
                except WindowError:
                    cond = True
                    continue
                if not x.is_zero():
                    out.extend(x.param_free_parts())
    return ProductSpan(span(V.base, out), cond)


def bracket_span(V: VertexTable, A, B) -> Submodule:
    """``[A, B]``: span of the non-negative products."""
    return ideal_product(V, A, B, nonneg_only=True).submodule


def ideal_closure(V: VertexTable, gens: Sequence[ModElement], max_rounds: int = 20) -> IdealCandidate:
    R = whole(V.base)
    S = span(V.base, list(gens))
    certified = True
    for _ in range(max_rounds):
        prod = ideal_product(V, S, R)
        certified = not prod.window_conditional
        nxt = S + prod.submodule
        if nxt == S:
            return IdealCandidate(S, certified)
        S = nxt
    return IdealCandidate(S, False)


def is_ideal(V: VertexTable, I: Submodule) -> IdealCandidate:
    prod = ideal_product(V, I, whole(V.base))
    return IdealCandidate(I, (prod.submodule <= I) and not prod.window_conditional) \
        if prod.submodule <= I else IdealCandidate(I, False)


@dataclass
class NilResult:
    terms: list
    nil: bool
    step: int | None            # 1-based: terms[step-1] is the first zero power
    window: int
    window_conditional: bool = False

    @property
    def verdict(self) -> str:
        tag = " (within window)" if self.window_conditional else ""
        if self.nil:
            return f"nil at step {self.step}{tag}"
        return f"not shown nil{tag}"


def is_nil_ideal(V: VertexTable, I: Submodule, max_n: int = 8) -> NilResult:
    """Iterate ``I^(n+1) = I^n . I^n``."""
    terms = [I]
    cond = False
    while True:
        if terms[-1].is_zero():
            return NilResult(terms, True, len(terms), V.window, cond)
        if len(terms) >= max_n:
            break
        prod = ideal_product(V, terms[-1], terms[-1])
        cond = cond or prod.window_conditional
        terms.append(prod.submodule)
        if terms[-1] == terms[-2]:
            break
    return NilResult(terms, False, None, V.window, cond)


@dataclass
class BracketSeries:
    terms: list
    stabilized_at: int | None
    stable_nil: NilResult | None

    @property
    def reaches_zero(self):
        return self.terms[-1].is_zero()


def brackets_series(V: VertexTable, max_n: int = 8) -> BracketSeries:
    """``V^[0] = V``, ``V^[n] = [V, V^[n-1]]``."""
    R = whole(V.base)
    terms = [R]
    stab = None
    for _ in range(max_n):
        if terms[-1].is_zero():
            break
        terms.append(bracket_span(V, R, terms[-1]))
        if terms[-1] == terms[-2]:
            stab = len(terms) - 2
            break
    if stab is None and terms[-1].is_zero():
        stab = len(terms) - 1
    nil = is_nil_ideal(V, terms[-1]) if stab is not None else None
    return BracketSeries(terms, stab, nil)


@dataclass
class NilradicalReport:
    contains: Submodule
    parts: list
    window: int
    window_conditional: bool

    def describe(self) -> str:
        return f"nilradical contains {self.contains.describe()} (window {self.window})"

    @property
    def reduced_lower_bound(self) -> bool:
        return self.contains.is_zero()


def abelian_generator_ideals(V: VertexTable) -> list:
    """Ideals ``a . V`` for generators with ``a_(n) a = 0`` throughout the window."""
    m = V.base
    R = whole(m)
    out = []
    for i, a in enumerate(m.gens()):
        if i == V.vacuum:
            continue
        try:
            if any(not product(V, a, a, n).is_zero()
                   for n in range(-V.window - 1, pole_bound(V, a, a) + 1)):
                continue
        except WindowError:
            continue
        I = ideal_product(V, [a], R)
        if I.submodule.is_zero():
            continue
        cand = is_ideal(V, I.submodule)
        sq = ideal_product(V, I.submodule, I.submodule)
        if cand.closure_certified and sq.submodule.is_zero():
            out.append((m.labels[i], I.submodule))
    return out


def nilradical_lower_bound(V: VertexTable) -> NilradicalReport:
    """A nil-ideal inside the nilradical; maximality is not decided."""
    series = brackets_series(V)
    parts = []
    S = zero_submodule(V.base)
    cond = False
    if series.stable_nil and series.stable_nil.nil:
        S = series.terms[-1]
        parts.append(("bracket series", S))
        cond = series.stable_nil.window_conditional
    for lab, I in abelian_generator_ideals(V):
        parts.append((f"{lab}.V", I))
        S = S + I
    # ideals generated by a single generator that turn out nil
    m = V.base
    for i, g in enumerate(m.gens()):
        if i == V.vacuum or membership(S, g):
            continue
        cand = ideal_closure(V, [g])
        if not cand.closure_certified or membership(cand.submodule, V.vac):
            continue
        nil = is_nil_ideal(V, cand.submodule)
        if nil.nil:
            parts.append((f"ideal({m.labels[i]})", cand.submodule))
            S = S + cand.submodule
            cond = cond or nil.window_conditional
    return NilradicalReport(S, parts, V.window, cond)


def kernel_ideal_check(V: VertexTable, degree_bound: int = 2) -> dict:
    """For central generators ``c`` with ``d c = 0``: the kernel of ``c_(-1)``
    on elements of d-degree at most ``degree_bound`` is stable under products."""
    m = V.base
    out = {}
    basis = []
    for i in range(m.size):
        powers = range(degree_bound + 1) if i < m.free_rank else [0]
        for s in powers:
            basis.append(m.mul_poly(m.gen(i), D ** s))
    for ci in range(m.size):
        c = m.gen(ci)
        if not m.apply_del(c).is_zero():
            continue
        central = all(product(V, g, c, n).is_zero() and product(V, c, g, n).is_zero()
                      for g in m.gens() for n in range(0, V.pole_bound() + 2))
        if not central:
            continue
        images = [product(V, c, x, -1) for x in basis]
        keys = sorted({(pos, e) for y in images for pos, cc in enumerate(y.free + y.tors)
                       for e in cc.terms})
        rows = [[_coef(y, k) for y in images] for k in keys]
        ker = nullspace(rows, len(basis)) if keys else [
            [Fraction(int(a == b)) for b in range(len(basis))] for a in range(len(basis))]
        ok = True
        for vec in ker:
            x = m.zero()
            for v, b in zip(vec, basis):
                if v:
                    x = x + b.scale(Poly.const(v))
            for g in m.gens():
                for n in range(-2, V.pole_bound() + 2):
                    try:
                        if not product(V, c, product(V, g, x, n), -1).is_zero():
                            ok = False
                    except WindowError:
                        pass
        out[m.labels[ci]] = {"kernel_dim": len(ker), "closed": ok}
    return out


def _coef(e: ModElement, key):
    pos, exp = key
    return (e.free + e.tors)[pos].terms.get(exp, Fraction(0))


def weight_ideal_check(V: VertexTable) -> dict:
    """Nonzero weights of the shadow's adjoint actions and whether their
    generalized weight spaces are square-zero ideals.  Vacuous when no
    nonzero weight occurs."""
    A = conformal_shadow(V)
    m = V.base
    found = []
    for s in range(m.free_rank):
        F = adjoint_matrix(A, m.gen(s))
        if not F.is_triangular():
            continue
        for phi in candidate_weights(F):
            if phi.is_zero():
                continue
            W = weight_chain(F, phi).generalized
            if W.is_zero():
                continue
            ideal = is_ideal(V, W).closure_certified
            sq = ideal_product(V, W, W).submodule.is_zero()
            found.append({"generator": m.labels[s], "weight": str(phi),
                          "ideal": ideal, "square_zero": sq})
    status = "vacuous" if not found else (
        "pass" if all(f["ideal"] and f["square_zero"] for f in found) else "fail")
    return {"status": status, "weights": found}


def consequence_check(V: VertexTable) -> dict:
    """On examples whose nilradical bound is 0: every adjoint action of the
    shadow is nilpotent and its central series reaches 0."""
    nil = nilradical_lower_bound(V)
    if not nil.reduced_lower_bound:
        return {"status": "no claim", "reason": nil.describe()}
    A = conformal_shadow(V)
    m = V.base
    adj = {m.labels[s]: action_nilpotent(adjoint_matrix(A, m.gen(s))).nilpotent
           for s in range(m.free_rank)}
    cs = central_series(A)
    ok = all(adj.values()) and cs.reaches_zero
    return {"status": "pass" if ok else "fail", "adjoint_nilpotent": adj,
            "central_series": cs.verdict}


# ---------------------------------------------------------------------------
# the Virasoro obstruction
# ---------------------------------------------------------------------------

@dataclass
class NovirResult:
    c: Fraction
    K: int
    diffeq_zero: bool
    singular_ok: bool
    virL_witness: tuple | None    # (z-order, lam-power, coefficient)
    a_series: Series = field(repr=False, default=None)

    @property
    def status(self) -> str:
        if not (self.diffeq_zero and self.singular_ok):
            return "fail"
        return "refuted" if self.virL_witness else "inconclusive"


def novir_a(c, K: int) -> Series:
    """``a(d, z) = d^2 e^(zd) / (2 (e^(zd/2) - 1)^2) - c d^2/8 (1 + e^(zd))``.

    The denominator is ``z^2 d^2/4 u`` with ``u = (sum_k (zd/2)^k/(k+1)!)^2``
    invertible, so the first term is ``2 e^(zd) / (z^2 u)``.
    """
    c = as_fraction(c)
    H = K + 3
    x = Series(("z",), (0,), (H,), {(k,): (D / 2) ** k / factorial(k + 1) for k in range(H + 1)},
               (True,), (False,))
    E = truncated_exp(D, H)
    a = Series.monomial((-2,), Poly.const(2)) * E * power_series_inverse(x * x)
    return a - (Series.one() + E).scale(D ** 2 * c / 8)


def novir_verify(c=0, K: int = 8) -> NovirResult:
    if K < 4:
        raise ValueError("K must be at least 4")
    c = as_fraction(c)
    H = K + 3
    one = Series.one()
    a = novir_a(c, K)
    da = a.deriv()
    E = truncated_exp(D, H)
    Em = truncated_exp(-D / 2, H)
    El = truncated_exp(L, H)
    diff = (Em - one) * da - (Em * a).scale(D) - (E + Em).scale(D ** 3 * c / 8)
    diffeq_zero = all(diff.coeff(p).is_zero() for p in range(diff.low[0], K + 1))
    singular_ok = a.coeff(-2) == Poly.const(2) and a.coeff(-1) == D
    lhs = (El - one) * da + ((El + one).scale(2 * L) + one.scale(D)) * a
    rhs = (El + E).scale(-c * L ** 3) + a.subs({DEL: D + L}).scale(D + 2 * L)
    r = lhs - rhs
    wit = None
    for p in range(r.low[0], K + 1):
        cp = r.coeff(p)
        if cp:
            k = min(cp.coeffs_in(LAM))
            wit = (p, k, cp)
            break
    return NovirResult(c, K, diffeq_zero, singular_ok, wit, a)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def is_even(psi: Mapping[int, object]) -> bool:
    return all(not as_fraction(v) for k, v in psi.items() if k % 2)


def make_finitevertex_example(psi: Mapping[int, object], window: int = 8,
                              expect_locality_failure: bool = False) -> VertexTable:
    """``V = C[d]a + C[d]b + C vac`` with ``Y(a,z)a = e^(zd/2) psi(z) b`` and
    all other fields between ``a`` and ``b`` zero."""
    psi = {int(k): as_fraction(v) for k, v in dict(psi).items() if as_fraction(v)}
    if not is_even(psi) and not expect_locality_failure:
        raise OddPsiError("psi(z) must equal psi(-z)")
    pole = max([-k for k in psi] + [0])
    K = max(window, pole + 2)
    base = FgModule(2, 1, labels=("a", "b", "vac"))
    fields = {}
    if psi:
        s = Series.laurent_poly({k: Poly.const(v) for k, v in psi.items()})
        fields[(0, 0)] = {1: truncated_exp(D / 2, K + pole) * s}
    name = "finitevertex(" + " + ".join(f"{v}*z^{k}" for k, v in sorted(psi.items())) + ")"
    return VertexTable(base, 2, fields, K, name)


def make_holomorphic(dim: int, derivation: str = "split", window: int = 8) -> VertexTable:
    """Commutative table ``Y(a,z)b = (e^(zT) a) b``.

    ``split``: ``C^dim`` in the basis ``1, e_1, ..., e_(dim-1)`` with ``T = 0``.
    ``euler``: ``C[x]/(x^dim)`` with ``T x^k = k x^k``.
    ``zero``: ``C[x]/(x^dim)`` with ``T = 0``.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    fields = {}
    if derivation == "split":
        labels = ("vac",) + tuple(f"e{i}" for i in range(1, dim))
        base = FgModule(0, dim, labels=labels)
        for i in range(1, dim):
            fields[(i, i)] = {i: Series.one()}
    elif derivation in ("euler", "zero"):
        labels = ("vac",) + tuple(f"x{i}" for i in range(1, dim))
        euler = derivation == "euler"
        tdel = [[Fraction(0)] * dim for _ in range(dim)]
        if euler:
            for k in range(dim):
                tdel[k][k] = Fraction(k)
        base = FgModule(0, dim, tuple(tuple(r) for r in tdel), labels)
        for i in range(1, dim):
            for j in range(dim):
                if i + j < dim:
                    fields[(i, j)] = {i + j: truncated_exp(Poly.const(i if euler else 0), window)}
    else:
        raise ValueError(f"unknown derivation {derivation!r}")
    return VertexTable(base, 0, fields, window, f"holomorphic({dim},{derivation})")
