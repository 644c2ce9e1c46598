import pytest
from hypothesis import given, settings, strategies as st

from conftest import polys
from finvert.cdmod import FgModule, membership, span
from finvert.exact import ALPHA, DEL, LAM, MU, A, D, L, M, ONE, ZERO, Poly
from finvert.gcmat import (ConformalMatrix, PreconditionError, _bracket_at, action_nilpotent,
                           adjoint_matrix, apply, candidate_weights, fitting_decomposition,
                           gc_bracket, gc_bracket_formula, is_direct, is_weight_vector,
                           weight_chain, weight_spaces)
from finvert.lca import make_virasoro

entries = polys(syms=(0, 1), max_deg=3, max_terms=3)


def square(n):
    m = FgModule(n)
    return st.lists(entries, min_size=n * n, max_size=n * n).map(
        lambda xs: ConformalMatrix(m, m, tuple(tuple(xs[i * n:(i + 1) * n]) for i in range(n))))


sizes = st.sampled_from([1, 2])
triples = sizes.flatmap(lambda n: st.tuples(square(n), square(n), square(n)))


def subs_cols(cols, mapping):
    return [c.subs(mapping) for c in cols]


def at_fn(F):
    return lambda p: subs_cols(F.columns(), {LAM: p}) if p != L else F.columns()


def flip(X: ConformalMatrix):
    """Entries E(d, alpha, lam) -> E(d, lam - alpha, lam)."""
    return tuple(tuple(x.subs({ALPHA: L - A}) for x in row) for row in X.entries)


@settings(max_examples=50)
@given(triples)
def test_bracket_matches_row_column_formula(t):
    F, G, _ = t
    assert gc_bracket(F, G) == gc_bracket_formula(F, G)


@settings(max_examples=50)
@given(triples)
def test_antisymmetry(t):
    F, G, _ = t
    # [F_alpha G]_lam = -[G_{lam-alpha} F]_lam
    fg = gc_bracket(F, G).entries
    gf = flip(gc_bracket(G, F))
    assert fg == tuple(tuple(-x for x in row) for row in gf)


@settings(max_examples=50)
@given(triples)
def test_conformal_jacobi(t):
    F, G, H = t
    m = F.source
    # [F_alpha [G_mu H]] = [[F_alpha G]_{alpha+mu} H] + [G_mu [F_alpha H]], maps at lam
    X = gc_bracket(G, H)
    X_mu = [c.subs({ALPHA: M}) for c in X.columns()]
    lhs = _bracket_at(m, F.at, lambda p: subs_cols(X_mu, {LAM: p}), A, L)
    Y = gc_bracket(F, G)
    r1 = _bracket_at(m, at_fn(Y), H.at, A + M, L)
    Z = gc_bracket(F, H)
    r2 = _bracket_at(m, G.at, at_fn(Z), M, L)
    assert lhs == [a + b for a, b in zip(r1, r2)]


def test_worked_value():
    m = FgModule(1)
    F = ConformalMatrix(m, m, ((D,),))
    assert gc_bracket(F, F).entries == ((D * (2 * A - L),),)


@given(entries, polys(syms=(0,), max_deg=3))
def test_apply_is_sesquilinear(x, p):
    m = FgModule(1)
    F = ConformalMatrix(m, m, ((x,),))
    assert apply(F, m.gen(0, p)).free[0] == p.shift_del(L) * x


def test_adjoint_of_virasoro():
    V = make_virasoro()
    assert adjoint_matrix(V, V.base.gen(0)).entries == ((D + 2 * L,),)


def test_weights_of_diagonal():
    m = FgModule(2)
    F = ConformalMatrix(m, m, ((L, ZERO), (ZERO, ZERO)))
    rep = weight_spaces(F)
    by = {str(c.weight): c for c in rep.chains}
    assert set(by) == {"0", "lambda"}
    assert by["lambda"].generalized.rank == 1 and by["0"].generalized.rank == 1
    assert membership(by["lambda"].weight_space, m.gen(0))
    assert membership(by["0"].weight_space, m.gen(1))
    assert rep.direct
    assert is_weight_vector(F, m.gen(0), L)
    assert not is_weight_vector(F, m.gen(1), L)
    fit = fitting_decomposition(F)
    assert fit.spans_module and fit.direct


@given(entries)
def test_strictly_triangular(p):
    m = FgModule(2)
    F = ConformalMatrix(m, m, ((ZERO, p), (ZERO, ZERO)))
    assert candidate_weights(F) == [ZERO]
    assert action_nilpotent(F).nilpotent
    ch = weight_chain(F, ZERO)
    assert ch.generalized.rank == 2


def test_non_triangular_needs_explicit_weights():
    m = FgModule(2)
    F = ConformalMatrix(m, m, ((ZERO, ONE), (ONE, ZERO)))
    with pytest.raises(PreconditionError):
        candidate_weights(F)
    assert not action_nilpotent(F).nilpotent


@given(entries, entries)
def test_torsion_in_first_zero_weight_space(x, y):
    m = FgModule(1, 2, ((0, 0), (1, 0)), ("a", "s", "t"))
    x = x.subs({DEL: ZERO})
    F = ConformalMatrix(m, m, ((D * y, ZERO, ZERO), (x, ZERO, ZERO), (ONE, ZERO, ZERO)))
    ch = weight_chain(F, ZERO)
    first = ch.chain[1]
    assert membership(first, m.gen("s")) and membership(first, m.gen("t"))


def test_torsion_rows_reject_del():
    m = FgModule(1, 1)
    with pytest.raises(ValueError):
        ConformalMatrix(m, m, ((ZERO, ZERO), (D, ZERO)))


def test_is_direct():
    m = FgModule(2)
    a, b = m.gen(0), m.gen(1)
    assert is_direct([span(m, [a]), span(m, [b])])
    assert not is_direct([span(m, [a]), span(m, [a + b]), span(m, [b])])
