"""Central extensions of the Virasoro conformal algebra by finite torsion modules.

A 2-cocycle is ``p(d, lam)`` with values in a coefficient module ``C`` on which
``d`` acts by a rational matrix, subject to

    (lam - mu) p(lam + mu) = (d + lam + 2 mu) p(lam) - (d + 2 lam + mu) p(mu)

and coboundaries are ``(d + 2 lam) q``.  Two solvers are provided: a flat
linear solve over all unknowns, and a structured one that splits ``C`` into
its invertible part and nilpotent Jordan blocks and solves each block degree
by degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cdmod import FgModule, ModElement
from .exact import (LAM, MU, ZERO, D, L, M, Poly, as_fraction, identity, mat_mul,
                    mat_vec, nullspace, rank, reduce_vector, rref)


@dataclass(frozen=True)
class CoefficientModule:
    dim: int
    del_action: tuple

    def __post_init__(self):
        m = tuple(tuple(as_fraction(x) for x in row) for row in self.del_action)
        if len(m) != self.dim or any(len(r) != self.dim for r in m):
            raise ValueError("del_action must be dim x dim")
        object.__setattr__(self, "del_action", m)

    @classmethod
    def scalar(cls, alpha) -> "CoefficientModule":
        """``C_alpha``: one dimension, ``d`` acts as ``alpha``."""
        return cls(1, ((as_fraction(alpha),),))

    @classmethod
    def jordan(cls, N: int) -> "CoefficientModule":
        """``C[d]/(d^(N+1))`` in the basis ``1, d, ..., d^N``."""
        n = N + 1
        return cls(n, tuple(tuple(Fraction(int(i == j + 1)) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls) -> "CoefficientModule":
        return cls(0, ())

    @property
    def module(self) -> FgModule:
        return FgModule(0, self.dim, self.del_action, tuple(f"c{i}" for i in range(self.dim)))

    def matrix(self):
        return [list(r) for r in self.del_action]

    def is_shift(self) -> bool:
        return self == CoefficientModule.jordan(self.dim - 1) if self.dim else False


@dataclass(frozen=True)
class Cocycle:
    """``coeffs[k]`` is the vector multiplying ``lam**k``."""

    coeffs: tuple

    @classmethod
    def from_flat(cls, vec, dim, D):
        return cls(tuple(tuple(vec[k * dim:(k + 1) * dim]) for k in range(D + 1)))

    def flat(self):
        return [x for v in self.coeffs for x in v]

    def element(self, C: CoefficientModule) -> ModElement:
        tors = [ZERO] * C.dim
        for k, v in enumerate(self.coeffs):
            for i, x in enumerate(v):
                if x:
                    tors[i] = tors[i] + Poly.var(LAM, k) * x
        return ModElement((), tuple(tors))

    def render(self, C: CoefficientModule) -> str:
        terms = []
        for k in reversed(range(len(self.coeffs))):
            for i in reversed(range(C.dim)):
                x = self.coeffs[k][i]
                if not x:
                    continue
                mono = []
                if k:
                    mono.append("lambda" + (f"^{k}" if k > 1 else ""))
                if C.is_shift():
                    if i:
                        mono.append("del" + (f"^{i}" if i > 1 else ""))
                elif C.dim > 1:
                    mono.append(f"c{i}")
                body = "*".join(mono) or "1"
                if x == 1:
                    terms.append(body)
                else:
                    terms.append(f"{x}*{body}" if mono else str(x))
        return " + ".join(terms) if terms else "0"


def _check(p: ModElement, C: CoefficientModule) -> ModElement:
    mod = C.module
    lhs = mod.mul_poly(p.subs({LAM: L + M}), L - M)
    rhs = mod.mul_poly(p, D + L + 2 * M) - mod.mul_poly(p.subs({LAM: M}), D + 2 * L + M)
    return lhs - rhs


def cocycle_residual(C: CoefficientModule, c: Cocycle) -> ModElement:
    return _check(c.element(C), C)


def is_cocycle(C: CoefficientModule, c: Cocycle) -> bool:
    return cocycle_residual(C, c).is_zero()


def _flatten(e: ModElement) -> dict:
    out = {}
    for i, c in enumerate(e.tors):
        for exp, v in c.terms.items():
            out[(i, exp)] = v
    return out


def _solve(C: CoefficientModule, unknowns: Sequence[tuple], D: int):
    """Nullspace of the cocycle identity restricted to the given unknowns
    ``(lam_power, component)``; returns flat vectors of length ``dim*(D+1)``."""
    cols = []
    for k, i in unknowns:
        vec = [Fraction(0)] * (C.dim * (D + 1))
        vec[k * C.dim + i] = Fraction(1)
        cols.append(_flatten(cocycle_residual(C, Cocycle.from_flat(vec, C.dim, D))))
    keys = sorted({key for col in cols for key in col})
    rows = [[col.get(key, Fraction(0)) for col in cols] for key in keys]
    out = []
    for sol in nullspace(rows, len(unknowns)):
        vec = [Fraction(0)] * (C.dim * (D + 1))
        for (k, i), x in zip(unknowns, sol):
            vec[k * C.dim + i] = x
        out.append(vec)
    return out


def _ordered(C, D):
    """Coordinate order: descending (lam-power, component)."""
    return [k * C.dim + i for k in reversed(range(D + 1)) for i in reversed(range(C.dim))]


def _canonical_basis(vectors, C, D):
    if not vectors:
        return []
    order = _ordered(C, D)
    perm = [[v[j] for j in order] for v in vectors]
    red, _ = rref(perm, len(order))
    out = []
    for row in red:
        vec = [Fraction(0)] * len(order)
        for pos, j in enumerate(order):
            vec[j] = row[pos]
        out.append(vec)
    return out


def cocycle_space_flat(C: CoefficientModule, D: int = 6) -> list[Cocycle]:
    """Brute force: every coefficient of every lam-power is an unknown."""
    if D < 3:
        raise ValueError("lambda-degree bound must be at least 3")
    unknowns = [(k, i) for k in range(D + 1) for i in range(C.dim)]
    return [Cocycle.from_flat(v, C.dim, D)
            for v in _canonical_basis(_solve(C, unknowns, D), C, D)]


# ---------------------------------------------------------------------------
# structure of the coefficient module
# ---------------------------------------------------------------------------

def _kernel(mat, n):
    return nullspace(mat, n) if n else []


def _mat_pow(mat, k, n):
    out = identity(n)
    for _ in range(k):
        out = mat_mul(out, mat)
    return out


@dataclass
class Decomposition:
    invertible_basis: list         # vectors spanning the part where d is invertible
    jordan_chains: list            # each chain [v, Mv, ..., M^N v]

    @property
    def jordan_sizes(self):
        return [len(c) for c in self.jordan_chains]


def decompose(C: CoefficientModule) -> Decomposition:
    """Fitting split ``C = ker d^n (+) im d^n`` and rational Jordan chains of
    the nilpotent part."""
    n = C.dim
    if n == 0:
        return Decomposition([], [])
    mat = C.matrix()
    Mn = _mat_pow(mat, n, n)
    cols = [[Mn[i][j] for i in range(n)] for j in range(n)]
    inv_basis, _ = rref(cols, n) if any(any(c) for c in cols) else ([], [])
    kers = [[]] + [_kernel(_mat_pow(mat, k, n), n) for k in range(1, n + 1)]
    top = next((k for k in range(n + 1) if len(kers[k]) == len(kers[n])), n)
    chains: list[list] = []
    for k in range(top, 0, -1):
        S = list(kers[k - 1])
        for ch in chains:
            S.extend(ch[len(ch) - k:])
        r = rank(S, n) if S else 0
        for v in kers[k]:
            if rank(S + [v], n) > r:
                chain = [v]
                for _ in range(k - 1):
                    chain.append(mat_vec(mat, chain[-1]))
                chains.append(chain)
                S.extend(chain)
                r = rank(S, n)
    return Decomposition([list(v) for v in inv_basis], chains)


def _block_structured(N: int, D: int) -> list[list]:
    """Cocycles on one Jordan block ``C[d]/(d^(N+1))`` solved by homogeneous
    degree, ``lam`` and ``d`` both of degree one."""
    C = CoefficientModule.jordan(N)
    out = []
    for t in range(D + N + 1):
        unknowns = [(k, t - k) for k in range(D + 1) if 0 <= t - k <= N]
        if unknowns:
            out.extend(_solve(C, unknowns, D))
    return out


def _invertible_structured(Cinv: CoefficientModule, D: int) -> list[list]:
    """Setting ``mu = 0`` gives ``d p(lam) = (d + 2 lam) p(0)``; with ``d``
    invertible each ``p(0)`` determines one candidate, verified in full."""
    n = Cinv.dim
    mat = Cinv.matrix()
    inv = _inverse(mat)
    out = []
    for i in range(n):
        p0 = [Fraction(int(j == i)) for j in range(n)]
        # p(lam) = d^{-1} (d + 2 lam) p0 = p0 + 2 lam d^{-1} p0
        vec = [Fraction(0)] * (n * (D + 1))
        vec[:n] = p0
        vec[n:2 * n] = [2 * x for x in mat_vec(inv, p0)]
        c = Cocycle.from_flat(vec, n, D)
        if is_cocycle(Cinv, c):
            out.append(vec)
    return out


def _inverse(mat):
    n = len(mat)
    aug = [list(mat[i]) + identity(n)[i] for i in range(n)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is not invertible")
    return [row[n:] for row in red]


def _restrict(mat, basis):
    """Matrix of ``mat`` on the invariant subspace spanned by ``basis``."""
    n = len(basis)
    dim = len(mat)
    out = [[Fraction(0)] * n for _ in range(n)]
    cols = [[basis[j][i] for j in range(n)] for i in range(dim)]
    for j, b in enumerate(basis):
        img = mat_vec(mat, b)
        aug = [cols[i] + [img[i]] for i in range(dim)]
        red, piv = rref(aug, n + 1)
        if n in piv:
            raise ValueError("subspace is not invariant")
        for r, p in zip(red, piv):
            out[p][j] = r[n]
    return out


def cocycle_space(C: CoefficientModule, D: int = 6) -> list[Cocycle]:
    """Structured solver; agrees with :func:`cocycle_space_flat`."""
    if D < 3:
        raise ValueError("lambda-degree bound must be at least 3")
    dec = decompose(C)
    n = C.dim
    vectors = []

    def lift(block_vec, basis):
        m = len(basis)
        vec = [Fraction(0)] * (n * (D + 1))
        for k in range(D + 1):
            coeffs = block_vec[k * m:(k + 1) * m]
            for b, x in zip(basis, coeffs):
                if x:
                    for i in range(n):
                        vec[k * n + i] += x * b[i]
        return vec

    for chain in dec.jordan_chains:
        for v in _block_structured(len(chain) - 1, D):
            vectors.append(lift(v, chain))
    if dec.invertible_basis:
        basis = dec.invertible_basis
        Cinv = CoefficientModule(len(basis), tuple(tuple(r) for r in _restrict(C.matrix(), basis)))
        for v in _invertible_structured(Cinv, D):
            vectors.append(lift(v, basis))
    return [Cocycle.from_flat(v, n, D) for v in _canonical_basis(vectors, C, D)]


def coboundary_space(C: CoefficientModule, D: int = 6) -> list[Cocycle]:
    """Span of ``(d + 2 lam) q`` over ``q`` in ``C``."""
    n = C.dim
    mat = C.matrix()
    vectors = []
    for i in range(n):
        q = [Fraction(int(j == i)) for j in range(n)]
        vec = [Fraction(0)] * (n * (D + 1))
        vec[:n] = mat_vec(mat, q)
        vec[n:2 * n] = [2 * x for x in q]
        vectors.append(vec)
    return [Cocycle.from_flat(v, n, D) for v in _canonical_basis(vectors, C, D)]


@dataclass
class H2Result:
    dimension: int
    representatives: list
    cocycle_dim: int
    coboundary_dim: int
    degree_bound: int


def _quotient(C, D, cocycles, coboundaries):
    order = _ordered(C, D)
    perm = lambda v: [v[j] for j in order]
    cb = [perm(c.flat()) for c in coboundaries]
    red, piv = rref(cb, len(order)) if cb else ([], [])
    residues = [reduce_vector(perm(c.flat()), red, piv) for c in cocycles]
    residues = [r for r in residues if any(r)]
    if not residues:
        return []
    rr, _ = rref(residues, len(order))
    out = []
    for row in rr:
        vec = [Fraction(0)] * len(order)
        for pos, j in enumerate(order):
            vec[j] = row[pos]
        out.append(Cocycle.from_flat(vec, C.dim, D))
    return out


def h2(C: CoefficientModule, D: int = 6, solver: str = "structured") -> H2Result:
    if D < 3:
        raise ValueError("lambda-degree bound must be at least 3")
    cocycles = cocycle_space(C, D) if solver == "structured" else cocycle_space_flat(C, D)
    cobs = coboundary_space(C, D)
    n = C.dim * (D + 1)
    both = rank([c.flat() for c in cocycles] + [c.flat() for c in cobs], n) if cocycles or cobs else 0
    if both != len(cocycles):
        raise AssertionError("coboundaries are not contained in the cocycle space")
    reps = _quotient(C, D, cocycles, cobs)
    return H2Result(len(reps), reps, len(cocycles), len(cobs), D)


@dataclass
class ExtensionReport:
    invertible_dim: int
    jordan_sizes: list
    classes_per_block: list      # (block size, h2 dim, representative)
    irreducible_exists: bool
    irreducible_class: str | None
    notes: list = field(default_factory=list)


def classify_irreducible(C: CoefficientModule, D: int = 6) -> ExtensionReport:
    dec = decompose(C)
    notes = []
    blocks = []
    for size in dec.jordan_sizes:
        r = h2(CoefficientModule.jordan(size - 1), D)
        rep = r.representatives[0].render(CoefficientModule.jordan(size - 1)) if r.representatives else None
        blocks.append((size, r.dimension, rep))
    if dec.invertible_basis:
        notes.append(f"d acts invertibly on a {len(dec.invertible_basis)}-dimensional summand: "
                     "its extensions are trivial")
    # an irreducible extension needs C = C c with d c = 0 and the class lam^3
    exists = C.dim == 1 and C.del_action[0][0] == 0
    cls = None
    if exists:
        r = h2(C, D)
        cls = r.representatives[0].render(C) if r.dimension == 1 else None
        if cls != "lambda^3":
            notes.append("cross-check failed: expected the class lambda^3")
            exists = False
    elif C.dim == 0:
        notes.append("only the zero extension")
    elif any(s for s in dec.jordan_sizes):
        notes.append("nontrivial classes exist but the extension is not irreducible: "
                     "its derived algebra misses part of the centre")
    return ExtensionReport(len(dec.invertible_basis), dec.jordan_sizes, blocks, exists, cls, notes)
