"""Lie conformal algebras given by structure constants over an FgModule."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .cdmod import (FgModule, ModElement, Submodule, membership, span,
                    whole, zero_submodule)
from .exact import DEL, LAM, MU, ONE, ZERO, D, L, M, Poly, nullspace


class TableError(ValueError):
    """Inconsistent structure-constant table."""


@dataclass(frozen=True)
class ConformalAlgebra:
    """``table[(i, j)]`` is ``[g_i lambda g_j]`` for free generators i, j.

    Brackets involving a torsion generator are zero; a table that says
    otherwise is rejected.
    """

    base: FgModule
    table: Mapping
    name: str = ""

    def __post_init__(self):
        m = self.base
        full = {}
        for (i, j), v in dict(self.table).items():
            if isinstance(i, str):
                i = m.index(i)
            if isinstance(j, str):
                j = m.index(j)
            m.check(v)
            if m.is_torsion_index(i) or m.is_torsion_index(j):
                if not v.is_zero():
                    raise TableError(
                        f"bracket [{m.labels[i]} lambda {m.labels[j]}] involves a torsion "
                        "generator and must vanish")
                continue
            for c in v.free + v.tors:
                if not c.free_of(MU, "alpha"):
                    raise TableError("table entries may only depend on d and lambda")
            full[(i, j)] = v
        for i in range(m.free_rank):
            for j in range(m.free_rank):
                full.setdefault((i, j), m.zero())
        object.__setattr__(self, "table", full)

    def entry(self, i, j) -> ModElement:
        m = self.base
        i = m.index(i) if isinstance(i, str) else i
        j = m.index(j) if isinstance(j, str) else j
        if m.is_torsion_index(i) or m.is_torsion_index(j):
            return m.zero()
        return self.table[(i, j)]

    def table_degree(self) -> int:
        deg = 0
        for v in self.table.values():
            for c in v.free + v.tors:
                deg = max(deg, c.degree())
        return deg

    def gens(self):
        return self.base.gens()


def bracket(A: ConformalAlgebra, x: ModElement, y: ModElement, lam: Poly = L) -> ModElement:
    """``[x_lam y]`` extended from the table by sesquilinearity.

    ``x`` and ``y`` may carry parameters other than the one used for
    ``lam``; ``d`` on the left becomes ``-lam`` and ``d`` on the right becomes
    ``d + lam`` acting on the output.
    """
    m = A.base
    lam = Poly.coerce(lam)
    out = m.zero()
    for i, p in enumerate(x.free):
        if not p:
            continue
        p_left = p.subs({DEL: -lam})
        for j, q in enumerate(y.free):
            if not q:
                continue
            entry = A.table[(i, j)]
            if entry.is_zero():
                continue
            if lam != L:
                entry = entry.subs({LAM: lam})
            term = m.mul_poly(entry, q.shift_del(lam))
            out = out + m.mul_poly(term, p_left)
    return out


def lambda_coefficients(e: ModElement) -> list[ModElement]:
    return e.param_free_parts()


# ---------------------------------------------------------------------------
# axioms
# ---------------------------------------------------------------------------

@dataclass
class AxiomReport:
    results: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def __getitem__(self, k):
        return self.results[k]


def skew_partner(A: ConformalAlgebra, e: ModElement) -> ModElement:
    """``-[b_{-d-lam} a]`` from ``e = [b_lam a]``: substitute lam -> -d-lam
    with ``d`` acting on the output coefficients."""
    m = A.base
    out = m.zero()
    for k, ek in e.coeffs_in(LAM).items():
        out = out + m.mul_poly(ek, (-D - L) ** k)
    return -out


def check_axioms(A: ConformalAlgebra) -> AxiomReport:
    m = A.base
    rep = AxiomReport()
    free = range(m.free_rank)
    g = m.gens()

    rep.results["C2"] = True
    for i, j in itertools.product(free, free):
        base = bracket(A, g[i], g[j])
        left = bracket(A, m.apply_del(g[i]), g[j])
        right = bracket(A, g[i], m.apply_del(g[j]))
        if left != base.scale(-L) or right != m.mul_poly(base, D + L):
            rep.results["C2"] = False
            rep.witnesses["C2"] = (m.labels[i], m.labels[j])
            break
    for t in range(m.free_rank, m.size):
        for j in range(m.size):
            if not bracket(A, g[t], g[j]).is_zero() or not bracket(A, g[j], g[t]).is_zero():
                rep.results["C2"] = False
                rep.witnesses["C2"] = (m.labels[t], m.labels[j])

    rep.results["C3"] = True
    for i, j in itertools.product(free, free):
        lhs = A.table[(i, j)]
        rhs = skew_partner(A, A.table[(j, i)])
        if lhs != rhs:
            rep.results["C3"] = False
            rep.witnesses["C3"] = {
                "pair": (m.labels[i], m.labels[j]),
                "lhs": m.fmt(lhs), "rhs": m.fmt(rhs)}
            break

    rep.results["C4"] = True
    for i, j, k in itertools.product(free, free, free):
        lhs = (bracket(A, g[i], bracket(A, g[j], g[k], M), L)
               - bracket(A, g[j], bracket(A, g[i], g[k], L), M))
        rhs = bracket(A, bracket(A, g[i], g[j], L), g[k], L + M)
        if lhs != rhs:
            rep.results["C4"] = False
            rep.witnesses["C4"] = {
                "triple": (m.labels[i], m.labels[j], m.labels[k]),
                "residual": m.fmt(lhs - rhs)}
            break
    return rep


# ---------------------------------------------------------------------------
# subspace brackets and series
# ---------------------------------------------------------------------------

def subspace_bracket(A: ConformalAlgebra, X: Submodule, Y: Submodule) -> Submodule:
    out = []
    for x in X.canonical_generators():
        for y in Y.canonical_generators():
            out.extend(lambda_coefficients(bracket(A, x, y)))
    return span(A.base, out)


@dataclass
class SeriesResult:
    terms: list
    reaches_zero: bool
    step: int | None          # first n with term n == 0
    stabilized_at: int | None  # first n with term n == term n+1
    kind: str = "derived"

    @property
    def verdict(self) -> str:
        word = "solvable" if self.kind == "derived" else "nilpotent"
        if self.reaches_zero:
            return f"{word} at step {self.step}"
        return "not stabilized to 0"


def default_max_steps(A: ConformalAlgebra) -> int:
    return 2 * (A.base.free_rank + A.base.torsion_dim) + 2


def _series(A, max_steps, nxt, kind):
    if max_steps is None:
        max_steps = default_max_steps(A)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    terms = [whole(A.base)]
    for n in range(1, max_steps + 1):
        if terms[-1].is_zero():
            break
        t = nxt(terms[-1])
        terms.append(t)
        if t == terms[-2]:
            break
    step = next((n for n, t in enumerate(terms) if t.is_zero()), None)
    stab = next((n for n in range(len(terms) - 1) if terms[n] == terms[n + 1]), None)
    return SeriesResult(terms, step is not None, step, stab, kind)


def derived_series(A: ConformalAlgebra, max_steps: int | None = None) -> SeriesResult:
    """``R^(0) = R``, ``R^(n+1) = [R^(n), R^(n)]``."""
    return _series(A, max_steps, lambda t: subspace_bracket(A, t, t), "derived")


def central_series(A: ConformalAlgebra, max_steps: int | None = None) -> SeriesResult:
    """``R^[0] = R``, ``R^[n+1] = [R, R^[n]]``."""
    R = whole(A.base)
    return _series(A, max_steps, lambda t: subspace_bracket(A, R, t), "central")


def is_ideal(A: ConformalAlgebra, I: Submodule) -> bool:
    return subspace_bracket(A, whole(A.base), I) <= I


def _flatten(e: ModElement) -> dict:
    out = {}
    for pos, c in enumerate(e.free + e.tors):
        for exp, v in c.terms.items():
            out[(pos, exp)] = v
    return out


def center_degree_bound(A: ConformalAlgebra) -> int:
    return A.table_degree() + A.base.free_rank


def center(A: ConformalAlgebra, degree_bound: int | None = None) -> Submodule:
    """Centre, searched among elements of d-degree at most ``degree_bound``
    (default :func:`center_degree_bound`); torsion is always included."""
    m = A.base
    if degree_bound is None:
        degree_bound = center_degree_bound(A)
    basis = [(i, k) for i in range(m.free_rank) for k in range(degree_bound + 1)]
    images = []
    for i, k in basis:
        x = m.gen(i, D ** k)
        img = {}
        for j in range(m.free_rank):
            for key, v in _flatten(bracket(A, x, m.gen(j))).items():
                img[(j,) + key] = v
        images.append(img)
    keys = sorted({key for img in images for key in img})
    rows = [[img.get(key, Fraction(0)) for img in images] for key in keys]
    sols = nullspace(rows, len(basis)) if basis else []
    elems = []
    for v in sols:
        e = m.zero()
        for (i, k), c in zip(basis, v):
            if c:
                e = e + m.gen(i, D ** k * c)
        elems.append(e)
    elems.extend(m.gen(t) for t in range(m.free_rank, m.size))
    return span(m, elems)


def strongly_simple_on_generators(A: ConformalAlgebra) -> dict:
    """Heuristic: checks ``[C g, R] = R`` for each free generator only."""
    m = A.base
    R = whole(m)
    out = {}
    for i in range(m.free_rank):
        imgs = []
        for y in R.canonical_generators():
            imgs.extend(lambda_coefficients(bracket(A, m.gen(i), y)))
        out[m.labels[i]] = span(m, imgs) == R
    return out


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """``values[i]`` is ``phi_{g_i}(lambda)`` on the free generators of the
    acting algebra; torsion generators have weight zero."""

    values: tuple

    def __post_init__(self):
        vals = tuple(Poly.coerce(v) for v in self.values)
        for v in vals:
            if not v.free_of(DEL, MU, "alpha"):
                raise ValueError("weights are polynomials in lambda only")
        object.__setattr__(self, "values", vals)

    def of(self, e: ModElement) -> Poly:
        """``phi(p(d) g) = p(-lambda) phi(g)``."""
        out = ZERO
        for p, v in zip(e.free, self.values):
            if p:
                out = out + p.subs({DEL: -L}) * v
        return out

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def make_virasoro(deformation: int = 2) -> ConformalAlgebra:
    """``[L_lam L] = (d + deformation*lam) L``; only 2 gives a conformal algebra."""
    m = FgModule(1, labels=("L",))
    return ConformalAlgebra(m, {(0, 0): m.gen(0, D + deformation * L)}, name="vir")


def _shift_matrix(n):
    return tuple(tuple(Fraction(1) if i == j + 1 else Fraction(0) for j in range(n))
                 for i in range(n))


def make_virasoro_ext(c, N: int) -> ConformalAlgebra:
    """``[L_lam L] = (d + 2 lam) L + c lam^3 d^N k`` over ``C[d]/(d^(N+1))``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    c = Fraction(c)
    labels = ("L",) + tuple("k" if j == 0 else f"k{j}" for j in range(N + 1))
    m = FgModule(1, N + 1, _shift_matrix(N + 1), labels)
    top = m.gen(N + 1).scale(c * L ** 3)
    return ConformalAlgebra(m, {(0, 0): m.gen(0, D + 2 * L) + top},
                            name=f"vir-ext({c},{N})")


def lie_algebra_check(consts, n) -> tuple | None:
    """First triple violating antisymmetry or Jacobi, or None."""
    def br(x, y):
        out = [Fraction(0)] * n
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k in range(n):
                    out[k] += a * b * consts[i][j][k]
        return out

    e = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        if any(consts[i][j][k] + consts[j][i][k] for k in range(n)):
            return ("antisymmetry", i, j)
    for i, j, k in itertools.product(range(n), repeat=3):
        a = br(e[i], br(e[j], e[k]))
        b = br(e[j], br(e[k], e[i]))
        c = br(e[k], br(e[i], e[j]))
        if any(x + y + z for x, y, z in zip(a, b, c)):
            return ("jacobi", i, j, k)
    return None


def make_current(structure_constants: Sequence, labels: Sequence[str] | None = None,
                 name: str = "current") -> ConformalAlgebra:
    """Current algebra ``C[d] (x) g`` with ``[a_lam b] = [a, b]``.

    ``structure_constants[i][j][k]`` is the coefficient of ``e_k`` in
    ``[e_i, e_j]``.
    """
    n = len(structure_constants)
    consts = [[[Fraction(x) for x in row] for row in mat] for mat in structure_constants]
    bad = lie_algebra_check(consts, n)
    if bad is not None:
        raise TableError(f"bad Lie structure constants: {bad[0]} fails at {bad[1:]}")
    labels = tuple(labels) if labels else tuple(f"e{i}" for i in range(n))
    m = FgModule(n, labels=labels)
    table = {}
    for i in range(n):
        for j in range(n):
            table[(i, j)] = ModElement(tuple(Poly.const(consts[i][j][k]) for k in range(n)), ())
    return ConformalAlgebra(m, table, name=name)


SL2_CONSTANTS = [
    # basis e, h, f
    [[0, 0, 0], [-2, 0, 0], [0, 1, 0]],
    [[2, 0, 0], [0, 0, 0], [0, 0, -2]],
    [[0, -1, 0], [0, 0, 2], [0, 0, 0]],
]


def make_current_sl2() -> ConformalAlgebra:
    return make_current(SL2_CONSTANTS, ("e", "h", "f"), name="current-sl2")


def make_abelian(free_rank: int = 1, torsion_dim: int = 0) -> ConformalAlgebra:
    return ConformalAlgebra(FgModule(free_rank, torsion_dim), {}, name="abelian")


def with_trivial_torsion(A: ConformalAlgebra, labels=("k",)) -> ConformalAlgebra:
    """Adjoin torsion lines with ``d = 0`` and zero brackets."""
    m = A.base
    t = len(labels)
    big = FgModule(m.free_rank, m.torsion_dim + t,
                   tuple(tuple(m.torsion_del[i][j] if i < m.torsion_dim and j < m.torsion_dim
                               else Fraction(0) for j in range(m.torsion_dim + t))
                         for i in range(m.torsion_dim + t)),
                   m.labels + tuple(labels))
    table = {k: ModElement(v.free, v.tors + (ZERO,) * t) for k, v in A.table.items()}
    return ConformalAlgebra(big, table, name=A.name + "+k")
