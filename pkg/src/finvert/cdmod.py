"""Finitely generated modules over Q[d].

A module is ``Q[d]^r (+) T`` with ``T`` finite dimensional and ``d`` acting on
``T`` through a rational matrix.  Elements may carry parameter content
(``lam``, ``mu``, ``alpha``) in their coefficients, which is how
``V[lambda]`` is represented; torsion coefficients never contain ``d``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import (DEL, LAM, MU, ALPHA, ONE, ZERO, Poly, as_fraction,
                    divmod_del, mat_vec, reduce_vector, rref)

PARAMS = (LAM, MU, ALPHA)


@dataclass(frozen=True)
class FgModule:
    """``free_rank`` free generators plus a torsion block.

    ``torsion_del[i][j]`` is the coefficient of torsion generator ``i`` in
    ``d`` applied to torsion generator ``j``.
    """

    free_rank: int
    torsion_dim: int = 0
    torsion_del: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        if not self.torsion_del:
            object.__setattr__(self, "torsion_del", tuple(
                tuple(Fraction(0) for _ in range(self.torsion_dim))
                for _ in range(self.torsion_dim)))
        else:
            m = tuple(tuple(as_fraction(x) for x in row) for row in self.torsion_del)
            if len(m) != self.torsion_dim or any(len(r) != self.torsion_dim for r in m):
                raise ValueError("torsion_del must be torsion_dim x torsion_dim")
            object.__setattr__(self, "torsion_del", m)
        if not self.labels:
            labs = tuple(f"g{i}" for i in range(self.free_rank)) + tuple(
                f"t{i}" for i in range(self.torsion_dim))
            object.__setattr__(self, "labels", labs)
        if len(self.labels) != self.size:
            raise ValueError("one label per generator")

    @property
    def size(self) -> int:
        return self.free_rank + self.torsion_dim

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def is_torsion_index(self, i: int) -> bool:
        return i >= self.free_rank

    def zero(self) -> "ModElement":
        return ModElement((ZERO,) * self.free_rank, (ZERO,) * self.torsion_dim)

    def gen(self, i, coeff=ONE) -> "ModElement":
        if isinstance(i, str):
            i = self.index(i)
        coeff = Poly.coerce(coeff)
        free = [ZERO] * self.free_rank
        tors = [ZERO] * self.torsion_dim
        if i < self.free_rank:
            free[i] = coeff
            return ModElement(tuple(free), tuple(tors))
        tors[i - self.free_rank] = ONE
        return self.mul_poly(ModElement(tuple(free), tuple(tors)), coeff)

    def gens(self) -> list["ModElement"]:
        return [self.gen(i) for i in range(self.size)]

    # d-action -------------------------------------------------------------
    def _del_torsion(self, tors):
        m = self.torsion_del
        n = self.torsion_dim
        return tuple(sum((tors[j] * m[i][j] for j in range(n)), ZERO) for i in range(n))

    def apply_del(self, e: "ModElement") -> "ModElement":
        self.check(e)
        return ModElement(tuple(c * Poly.var(DEL) for c in e.free), self._del_torsion(e.tors))

    def mul_poly(self, e: "ModElement", p) -> "ModElement":
        """``p(d, params) . e`` with ``d`` acting on torsion through the matrix."""
        p = Poly.coerce(p)
        free = tuple(c * p for c in e.free)
        if not self.torsion_dim:
            return ModElement(free, ())
        tors = [ZERO] * self.torsion_dim
        cur = e.tors
        by_del = p.coeffs_in(DEL)
        top = max(by_del, default=-1)
        for k in range(top + 1):
            if k in by_del:
                ck = by_del[k]
                tors = [t + c * ck for t, c in zip(tors, cur)]
            if k < top:
                cur = self._del_torsion(cur)
        return ModElement(free, tuple(tors))

    def check(self, e: "ModElement"):
        if len(e.free) != self.free_rank or len(e.tors) != self.torsion_dim:
            raise ValueError("element does not belong to this module (dimension mismatch)")

    def add(self, *es):
        out = self.zero()
        for e in es:
            out = out + e
        return out

    def fmt(self, e: "ModElement") -> str:
        parts = []
        for lab, c in zip(self.labels, e.free + e.tors):
            if c:
                parts.append(lab if c == ONE else f"({c})*{lab}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ModElement:
    free: tuple
    tors: tuple

    def __post_init__(self):
        for c in self.tors:
            if not c.free_of(DEL):
                raise ValueError("torsion coefficients are scalars, not d-polynomials")

    def __add__(self, other):
        return ModElement(tuple(a + b for a, b in zip(self.free, other.free)),
                          tuple(a + b for a, b in zip(self.tors, other.tors)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ModElement(tuple(-a for a in self.free), tuple(-a for a in self.tors))

    def scale(self, c) -> "ModElement":
        """Multiply by a scalar or a d-free polynomial."""
        c = Poly.coerce(c)
        if not c.free_of(DEL):
            raise ValueError("use FgModule.mul_poly for d-dependent factors")
        return ModElement(tuple(a * c for a in self.free), tuple(a * c for a in self.tors))

    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.tors)

    def subs(self, mapping) -> "ModElement":
        mapping = dict(mapping)
        tmap = {k: v for k, v in mapping.items() if k not in (DEL, "d")}
        return ModElement(tuple(c.subs(mapping) for c in self.free),
                          tuple(c.subs(tmap) for c in self.tors))

    def coeffs_in(self, sym) -> dict[int, "ModElement"]:
        """Split by powers of a parameter symbol."""
        n_f, n_t = len(self.free), len(self.tors)
        out: dict[int, list] = {}
        for pos, c in enumerate(self.free + self.tors):
            for k, ck in c.coeffs_in(sym).items():
                out.setdefault(k, [ZERO] * (n_f + n_t))[pos] = ck
        return {k: ModElement(tuple(v[:n_f]), tuple(v[n_f:])) for k, v in sorted(out.items())}

    def param_free_parts(self) -> list["ModElement"]:
        """All coefficients of monomials in the parameters lam, mu, alpha."""
        parts = [self]
        for sym in PARAMS:
            nxt = []
            for p in parts:
                nxt.extend(p.coeffs_in(sym).values())
            parts = nxt
        return [p for p in parts if not p.is_zero()]

    def del_degree(self) -> int:
        return max((c.degree(DEL) for c in self.free), default=-1)


def apply_del(m: FgModule, e: ModElement) -> ModElement:
    return m.apply_del(e)


# ---------------------------------------------------------------------------
# submodules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Submodule:
    """A Q[d]-submodule in Hermite-style canonical form.

    ``rows`` have nonzero free part, strictly increasing pivot columns, monic
    pivots and entries above each pivot reduced modulo it; their torsion parts
    are reduced modulo ``torsion_basis``.  ``torsion_basis`` is the RREF basis
    of the intersection with the torsion block.
    """

    module: FgModule
    rows: tuple
    pivots: tuple
    torsion_basis: tuple
    torsion_pivots: tuple
    generators: tuple = field(default=(), compare=False)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def torsion_rank(self) -> int:
        return len(self.torsion_basis)

    def is_zero(self) -> bool:
        return not self.rows and not self.torsion_basis

    def canonical_generators(self) -> list[ModElement]:
        tn = self.module.torsion_dim
        out = list(self.rows)
        for v in self.torsion_basis:
            out.append(ModElement((ZERO,) * self.module.free_rank,
                                  tuple(Poly.const(x) for x in v)))
        assert all(len(e.tors) == tn for e in out)
        return out

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return (self.module == other.module and self.rows == other.rows
                and self.torsion_basis == other.torsion_basis)

    def __hash__(self):
        return hash((self.rows, self.torsion_basis))

    def __le__(self, other: "Submodule") -> bool:
        return all(membership(other, g) for g in self.canonical_generators())

    def __add__(self, other: "Submodule") -> "Submodule":
        return span(self.module, self.canonical_generators() + other.canonical_generators())

    def describe(self) -> str:
        m = self.module
        if self.is_zero():
            return "0"
        if self == whole(m):
            return "R"
        return "<" + ", ".join(m.fmt(g) for g in self.canonical_generators()) + ">"


def _scalar_torsion(m: FgModule, e: ModElement):
    return [c.const_value() for c in e.tors]


def _torsion_closure(m: FgModule, vectors):
    """RREF basis of the smallest d-stable subspace containing ``vectors``."""
    n = m.torsion_dim
    basis, piv = [], []
    queue = [list(v) for v in vectors]
    while queue:
        v = reduce_vector(queue.pop(), basis, piv)
        if any(v):
            basis, piv = rref(basis + [v], n)
            queue.append(mat_vec([list(r) for r in m.torsion_del], v))
    return basis, piv


def span(m: FgModule, gens: Sequence[ModElement]) -> Submodule:
    """Q[d]-submodule generated by ``gens`` (parameter content split first)."""
    rows: list[ModElement] = []
    for g in gens:
        m.check(g)
        rows.extend(g.param_free_parts())
    for g in rows:
        if any(not c.is_const() for c in g.tors):
            raise ValueError("torsion coefficients must be rational after splitting")
    r = m.free_rank
    echelon: list[ModElement] = []
    pivots: list[int] = []
    work = list(rows)
    for col in range(r):
        cand = [e for e in work if e.free[col]]
        rest = [e for e in work if not e.free[col]]
        if not cand:
            work = rest
            continue
        while len(cand) > 1:
            cand.sort(key=lambda e: e.free[col].degree(DEL))
            piv = cand[0]
            nxt = [piv]
            for e in cand[1:]:
                q, _ = divmod_del(e.free[col], piv.free[col])
                e2 = e - m.mul_poly(piv, q)
                if e2.free[col]:
                    nxt.append(e2)
                else:
                    rest.append(e2)
            cand = nxt
        piv = cand[0]
        lead = piv.free[col].coefficient({DEL: piv.free[col].degree(DEL)})
        piv = piv.scale(Poly.const(1 / lead))
        echelon.append(piv)
        pivots.append(col)
        work = rest
    tvecs = [_scalar_torsion(m, e) for e in work if not e.is_zero()]
    tbasis, tpiv = _torsion_closure(m, tvecs)
    # reduce above pivots, then reduce torsion parts
    for i in range(len(echelon)):
        for k in range(i):
            col = pivots[i]
            q, _ = divmod_del(echelon[k].free[col], echelon[i].free[col])
            if q:
                echelon[k] = echelon[k] - m.mul_poly(echelon[i], q)
    final = []
    for e in echelon:
        t = reduce_vector(_scalar_torsion(m, e), tbasis, tpiv)
        final.append(ModElement(e.free, tuple(Poly.const(x) for x in t)))
    return Submodule(m, tuple(final), tuple(pivots),
                     tuple(tuple(v) for v in tbasis), tuple(tpiv), tuple(gens))


def zero_submodule(m: FgModule) -> Submodule:
    return span(m, [])


def whole(m: FgModule) -> Submodule:
    return span(m, m.gens())


def membership(s: Submodule, e: ModElement, witness: bool = False):
    """Is ``e`` in ``s``?  With ``witness=True`` also return the d-polynomial
    multipliers of the canonical rows (``None`` when not a member)."""
    m = s.module
    m.check(e)
    parts = e.param_free_parts()
    if len(parts) > 1 or (parts and parts[0] != e):
        ok = all(membership(s, p) for p in parts)
        return (ok, None) if witness else ok
    cur = e
    mult = []
    rows = dict(zip(s.pivots, s.rows))
    for col in range(m.free_rank):
        c = cur.free[col]
        if col in rows:
            q, rem = divmod_del(c, rows[col].free[col])
            if rem:
                return (False, None) if witness else False
            mult.append(q)
            if q:
                cur = cur - m.mul_poly(rows[col], q)
        elif c:
            return (False, None) if witness else False
    t = reduce_vector(_scalar_torsion(m, cur), [list(v) for v in s.torsion_basis],
                      list(s.torsion_pivots))
    ok = not any(t)
    if witness:
        return ok, (mult if ok else None)
    return ok


def torsion_part(s: Submodule) -> Submodule:
    m = s.module
    return span(m, [ModElement((ZERO,) * m.free_rank, tuple(Poly.const(x) for x in v))
                    for v in s.torsion_basis])


def contains(big: Submodule, small: Submodule) -> bool:
    return small <= big
