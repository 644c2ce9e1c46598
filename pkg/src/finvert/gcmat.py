"""Matrix calculus of conformal linear maps.

A conformal linear map ``f`` is stored through the images of the generators:
column ``j`` is ``f_lam(g_j)`` written in the target base, so entries are
polynomials in ``d`` and ``lam`` (``lam`` only on torsion rows).  On a
coefficient ``g(d)`` the action is ``f_lam(g(d) v) = g(d + lam) f_lam(v)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .cdmod import FgModule, ModElement, Submodule, span, whole, zero_submodule
from .exact import (ALPHA, DEL, LAM, MU, ONE, ZERO, A as ALPHA_P, D, L, Poly,
                    nullspace, rank, rref)
from .lca import ConformalAlgebra, bracket


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ConformalMatrix:
    source: FgModule
    target: FgModule
    entries: tuple  # rows = target generators, cols = source generators

    def __post_init__(self):
        ent = tuple(tuple(Poly.coerce(x) for x in row) for row in self.entries)
        if len(ent) != self.target.size or any(len(r) != self.source.size for r in ent):
            raise ValueError("entries must be target.size x source.size")
        for i in range(self.target.free_rank, self.target.size):
            for x in ent[i]:
                if not x.free_of(DEL):
                    raise ValueError("torsion rows must not depend on d")
        for j in range(self.source.free_rank, self.source.size):
            for i in range(self.target.size):
                if ent[i][j]:
                    raise ValueError("torsion columns must vanish")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def from_columns(cls, source, target, cols: Sequence[ModElement]):
        n = target.size
        ent = [[ZERO] * source.size for _ in range(n)]
        for j, c in enumerate(cols):
            for i, x in enumerate(c.free + c.tors):
                ent[i][j] = x
        return cls(source, target, tuple(tuple(r) for r in ent))

    @classmethod
    def zero(cls, module: FgModule):
        return cls(module, module, tuple((ZERO,) * module.size for _ in range(module.size)))

    def column(self, j) -> ModElement:
        t = self.target
        col = [self.entries[i][j] for i in range(t.size)]
        return ModElement(tuple(col[:t.free_rank]), tuple(col[t.free_rank:]))

    def columns(self) -> list[ModElement]:
        return [self.column(j) for j in range(self.source.size)]

    def at(self, p) -> list[ModElement]:
        """Columns with the map parameter ``lam`` replaced by ``p``."""
        p = Poly.coerce(p)
        cols = self.columns()
        if p == L:
            return cols
        return [c.subs({LAM: p}) for c in cols]

    def is_zero(self) -> bool:
        return not any(x for row in self.entries for x in row)

    def max_del_degree(self) -> int:
        return max((x.degree(DEL) for row in self.entries for x in row), default=-1)

    def is_triangular(self) -> bool:
        n = self.source.free_rank
        if self.source != self.target:
            return False
        upper = all(not self.entries[i][j] for i in range(n) for j in range(i))
        lower = all(not self.entries[i][j] for i in range(n) for j in range(i + 1, n))
        return upper or lower

    def diagonal(self) -> list[Poly]:
        return [self.entries[i][i] for i in range(min(self.source.size, self.target.size))]

    def __str__(self):
        return "[" + "; ".join(", ".join(str(x) for x in row) for row in self.entries) + "]"


def apply_columns(target: FgModule, cols: Sequence[ModElement], e: ModElement, p) -> ModElement:
    """Apply the map whose generator images are ``cols`` (already at parameter
    ``p``) to ``e``; torsion components of ``e`` are annihilated."""
    out = target.zero()
    for j, g in enumerate(e.free):
        if g:
            out = out + target.mul_poly(cols[j], g.shift_del(p))
    return out


def apply(F: ConformalMatrix, e: ModElement, lam=L) -> ModElement:
    return apply_columns(F.target, F.at(lam), e, Poly.coerce(lam))


def _bracket_at(module: FgModule, F_at: Callable, G_at: Callable, x: Poly, y: Poly):
    """Columns of ``[f_x g]_y``: ``f_x(g_{y-x} v) - g_{y-x}(f_x v)``."""
    fx = F_at(x)
    gyx = G_at(y - x)
    cols = []
    for j in range(module.size):
        v = module.gen(j)
        left = apply_columns(module, fx, apply_columns(module, gyx, v, y - x), x)
        right = apply_columns(module, gyx, apply_columns(module, fx, v, x), y - x)
        cols.append(left - right)
    return cols


def _at_fn(F: ConformalMatrix):
    return F.at


def gc_bracket(F: ConformalMatrix, G: ConformalMatrix) -> ConformalMatrix:
    """``[F_alpha G]`` as a matrix in ``d``, ``lam`` (map parameter) and ``alpha``."""
    if F.source != G.source or F.source != F.target or G.source != G.target:
        raise ValueError("gc_bracket needs endomorphisms of one base")
    m = F.source
    cols = _bracket_at(m, F.at, G.at, ALPHA_P, L)
    return ConformalMatrix.from_columns(m, m, cols)


def gc_bracket_formula(F: ConformalMatrix, G: ConformalMatrix) -> ConformalMatrix:
    """Row-by-column formula ``F(d,a)G(d+a,l-a) - G(d,l-a)F(d+l-a,a)``.

    Valid on free modules only; kept as an independent cross-check.
    """
    m = F.source
    if m.torsion_dim:
        raise ValueError("the matrix formula needs a free base")
    n = m.size
    a, lam = ALPHA_P, L
    F1 = [[x.subs({LAM: a}) for x in row] for row in F.entries]
    G1 = [[x.subs({DEL: D + a, LAM: lam - a}) for x in row] for row in G.entries]
    G2 = [[x.subs({LAM: lam - a}) for x in row] for row in G.entries]
    F2 = [[x.subs({DEL: D + lam - a, LAM: a}) for x in row] for row in F.entries]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = ZERO
            for k in range(n):
                s = s + F1[i][k] * G1[k][j] - G2[i][k] * F2[k][j]
            row.append(s)
        out.append(tuple(row))
    return ConformalMatrix(m, m, tuple(out))


def adjoint_matrix(A: ConformalAlgebra, s: ModElement) -> ConformalMatrix:
    """Matrix of ``x -> [s_lam x]`` in the base of ``A``."""
    m = A.base
    cols = [bracket(A, s, m.gen(j)) if j < m.free_rank else m.zero() for j in range(m.size)]
    return ConformalMatrix.from_columns(m, m, cols)


# ---------------------------------------------------------------------------
# nilpotency of a single action
# ---------------------------------------------------------------------------

@dataclass
class NilpotencyResult:
    nilpotent: bool
    step: int | None
    chain: list
    bound: int

    @property
    def verdict(self):
        return f"nilpotent at step {self.step}" if self.nilpotent else "not nilpotent"


def action_step_bound(F: ConformalMatrix) -> int:
    m = F.source
    return m.free_rank * (max(F.max_del_degree(), 0) + 2) + m.torsion_dim + 1


def image(F: ConformalMatrix, W: Submodule) -> Submodule:
    out = []
    for w in W.canonical_generators():
        out.extend(apply(F, w).param_free_parts())
    return span(F.target, out)


def action_nilpotent(F: ConformalMatrix) -> NilpotencyResult:
    """Iterate ``W_{k+1}`` = span of lam-coefficients of ``F(W_k)`` from ``W_0 = V``."""
    bound = action_step_bound(F)
    chain = [whole(F.source)]
    for n in range(1, bound + 1):
        nxt = image(F, chain[-1])
        chain.append(nxt)
        if nxt.is_zero():
            return NilpotencyResult(True, n, chain, bound)
        if nxt == chain[-2]:
            break
    return NilpotencyResult(False, None, chain, bound)


# ---------------------------------------------------------------------------
# weight spaces
# ---------------------------------------------------------------------------

@dataclass
class WeightSpaceChain:
    weight: Poly
    chain: list            # d-spans of V^phi_i, i = 0, 1, ...
    dims: list             # Q-dimensions of V^phi_i inside the degree-bounded ansatz
    stabilized: bool
    degree_bound: int
    vectors: list = field(default_factory=list, repr=False)

    @property
    def weight_space(self) -> Submodule:
        return self.chain[1] if len(self.chain) > 1 else self.chain[0]

    @property
    def generalized(self) -> Submodule:
        return self.chain[-1]


def _coords(m: FgModule, dmax: int):
    keys = [(i, k) for i in range(m.free_rank) for k in range(dmax + 1)]
    keys += [(i, 0) for i in range(m.free_rank, m.size)]
    return keys, {k: n for n, k in enumerate(keys)}


def _vector(e: ModElement, index: dict, size: int):
    v = [Fraction(0)] * size
    for pos, c in enumerate(e.free + e.tors):
        for exp, x in c.terms.items():
            if any(exp[1:]):
                raise ValueError("parameter content left in coordinate vector")
            key = (pos, exp[0])
            if key not in index:
                raise ValueError("degree bound too small for coordinate vector")
            v[index[key]] = x
    return v


def _element(m: FgModule, keys, vec) -> ModElement:
    free = [ZERO] * m.free_rank
    tors = [ZERO] * m.torsion_dim
    for (pos, k), x in zip(keys, vec):
        if not x:
            continue
        if pos < m.free_rank:
            free[pos] = free[pos] + Poly.var(DEL, k) * x
        else:
            tors[pos - m.free_rank] = tors[pos - m.free_rank] + Poly.const(x)
    return ModElement(tuple(free), tuple(tors))


def default_weight_degree(F: ConformalMatrix) -> int:
    return F.source.free_rank + max(F.max_del_degree(), 0)


def weight_chain(F: ConformalMatrix, phi, degree_bound: int | None = None) -> WeightSpaceChain:
    """``V^phi_{i+1} = {v : F_lam v - phi(lam) v in V^phi_i}`` inside the space
    of elements with d-degree at most ``degree_bound``."""
    phi = Poly.coerce(phi)
    if not phi.free_of(DEL, MU, ALPHA):
        raise ValueError("a weight is a polynomial in lambda only")
    m = F.source
    if degree_bound is None:
        degree_bound = default_weight_degree(F)
    small_keys, _ = _coords(m, degree_bound)
    big_deg = degree_bound + max(F.max_del_degree(), 0) + 1
    big_keys, big_index = _coords(m, big_deg)
    nb = len(big_keys)
    # images of basis vectors split by lambda power
    per_power: dict[int, list] = {}
    for col, (pos, k) in enumerate(small_keys):
        b = m.gen(pos, Poly.var(DEL, k)) if pos < m.free_rank else m.gen(pos)
        img = apply(F, b) - b.scale(phi)
        for p, part in img.coeffs_in(LAM).items():
            per_power.setdefault(p, [[Fraction(0)] * len(small_keys) for _ in range(nb)])
            vec = _vector(part, big_index, nb)
            for r in range(nb):
                per_power[p][r][col] = vec[r]
    n = len(small_keys)
    spaces = [[]]  # bases (vectors in small coordinates)
    chain = [zero_submodule(m)]
    dims = [0]
    stabilized = False
    for _ in range(n + 1):
        cur = spaces[-1]
        # annihilator of the current space, in big coordinates
        emb = []
        for v in cur:
            e = _element(m, small_keys, v)
            emb.append(_vector(e, big_index, nb))
        ann = nullspace(emb, nb) if emb else [[Fraction(int(i == j)) for j in range(nb)]
                                               for i in range(nb)]
        rows = []
        for mat in per_power.values():
            for a in ann:
                rows.append([sum((a[r] * mat[r][c] for r in range(nb) if a[r]), Fraction(0))
                             for c in range(n)])
        nxt = nullspace(rows, n) if rows else [[Fraction(int(i == j)) for j in range(n)]
                                               for i in range(n)]
        if len(nxt) == len(cur):
            stabilized = True
            break
        spaces.append(nxt)
        dims.append(len(nxt))
        chain.append(span(m, [_element(m, small_keys, v) for v in nxt]))
    if len(chain) == 1:
        chain.append(chain[0])
        dims.append(0)
    return WeightSpaceChain(phi, chain, dims, stabilized, degree_bound, spaces[-1])


def candidate_weights(F: ConformalMatrix) -> list[Poly]:
    """Weights read off the diagonal of a triangular matrix (zero always included)."""
    if not F.is_triangular():
        raise PreconditionError("auto weights need a triangular matrix")
    out = [ZERO]
    for x in F.diagonal():
        if x.free_of(DEL, MU, ALPHA) and x not in out:
            out.append(x)
    return out


@dataclass
class WeightReport:
    chains: list
    direct: bool
    diagnostics: list


def is_direct(subs: Sequence[Submodule]) -> bool:
    subs = [s for s in subs if not s.is_zero()]
    if not subs:
        return True
    m = subs[0].module
    total = span(m, [g for s in subs for g in s.canonical_generators()])
    return (total.rank == sum(s.rank for s in subs)
            and total.torsion_rank == sum(s.torsion_rank for s in subs))


def weight_spaces(F: ConformalMatrix, candidates=None, degree_bound=None) -> WeightReport:
    diags = []
    if candidates is None or candidates == "auto":
        candidates = candidate_weights(F)
        skipped = [x for x in F.diagonal() if not x.free_of(DEL)]
        if skipped:
            diags.append("diagonal entries depending on d are not weights: "
                         + ", ".join(str(x) for x in skipped))
    chains = []
    for phi in candidates:
        ch = weight_chain(F, phi, degree_bound)
        if not ch.stabilized:
            diags.append(f"chain for weight {phi} did not stabilize within the degree bound")
        chains.append(ch)
    direct = is_direct([c.generalized for c in chains])
    return WeightReport(chains, direct, diags)


def is_weight_vector(F: ConformalMatrix, v: ModElement, phi) -> bool:
    """Verification half of the weight-vector search."""
    return not v.is_zero() and apply(F, v) == v.scale(Poly.coerce(phi))


# ---------------------------------------------------------------------------
# Fitting decomposition
# ---------------------------------------------------------------------------

def _flat(cols):
    out = {}
    for j, c in enumerate(cols):
        for i, x in enumerate(c.free + c.tors):
            for e, v in x.terms.items():
                out[(i, j, e)] = v
    return out


def generated_nilpotent(F: ConformalMatrix, max_steps: int = 6, max_maps: int = 200):
    """Bounded check that the conformal subalgebra generated by ``F`` is
    nilpotent: left-normed brackets ``[F, [F, ... F]]`` must vanish."""
    m = F.source
    level = [F.columns()]
    for step in range(1, max_steps + 1):
        new = []
        for X in level:
            x_at = (lambda cols: (lambda p: [c.subs({LAM: p}) if p != L else c for c in cols]))(X)
            cols = _bracket_at(m, F.at, x_at, ALPHA_P, L)
            split: dict[int, list] = {}
            for j, c in enumerate(cols):
                for k, part in c.coeffs_in(ALPHA).items():
                    split.setdefault(k, [m.zero()] * m.size)[j] = part
            new.extend(split.values())
        new = [X for X in new if any(not c.is_zero() for c in X)]
        if not new:
            return True, step
        # keep a linearly independent subset
        keys = sorted({k for X in new for k in _flat(X)})
        vecs = [[_flat(X).get(k, Fraction(0)) for k in keys] for X in new]
        keep, basis = [], []
        for X, v in zip(new, vecs):
            if rank(basis + [v], len(keys)) > len(basis):
                basis.append(v)
                keep.append(X)
        level = keep[:max_maps]
    return False, None


@dataclass
class FittingReport:
    zero_part: Submodule
    chains: list
    spans_module: bool
    direct: bool
    diagnostics: list


def fitting_decomposition(F: ConformalMatrix, degree_bound=None) -> FittingReport:
    ok, _ = generated_nilpotent(F)
    if not ok:
        raise PreconditionError("F does not generate a nilpotent conformal subalgebra "
                                "within the step bound")
    diags = []
    try:
        cands = candidate_weights(F)
    except PreconditionError:
        cands = [ZERO]
        diags.append("matrix not triangular: only the zero weight was examined")
    rep = weight_spaces(F, cands, degree_bound)
    diags.extend(rep.diagnostics)
    m = F.source
    total = span(m, [g for c in rep.chains for g in c.generalized.canonical_generators()])
    spans = total == whole(m)
    if not spans:
        diags.append("incomplete decomposition within the degree bounds")
    zero_chain = next(c for c in rep.chains if c.weight.is_zero())
    return FittingReport(zero_chain.generalized, [c for c in rep.chains if not c.weight.is_zero()],
                         spans, rep.direct, diags)
