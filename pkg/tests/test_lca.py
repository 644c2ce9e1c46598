import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import from_sympy, polys, sd, slam, to_sympy
from finvert.cdmod import FgModule, membership, span, whole
from finvert.exact import D, L, M, ONE, Poly
from finvert.lca import (ConformalAlgebra, TableError, bracket, center, central_series,
                         check_axioms, derived_series, is_ideal, make_abelian, make_current,
                         make_current_sl2, make_virasoro, make_virasoro_ext, skew_partner,
                         strongly_simple_on_generators, with_trivial_torsion)
from finvert.va import conformal_shadow, make_finitevertex_example

dpolys = polys(syms=(0,), max_deg=2, max_terms=3)
VIR = make_virasoro()


@pytest.mark.parametrize("A", [VIR, make_current_sl2(), make_abelian(2, 1)]
                         + [make_virasoro_ext(c, N) for c in (0, 1) for N in (0, 1, 2)],
                         ids=lambda A: A.name)
def test_axioms_pass(A):
    rep = check_axioms(A)
    assert rep.ok, rep.witnesses


def test_shadow_axioms_pass():
    assert check_axioms(conformal_shadow(make_finitevertex_example({-2: 1}))).ok


@pytest.mark.parametrize("k", [1, 3, 4])
def test_deformed_virasoro_fails_skew(k):
    rep = check_axioms(make_virasoro(k))
    assert not rep["C3"]
    assert rep.witnesses["C3"]["pair"] == ("L", "L")
    assert rep["C2"]


@given(dpolys, dpolys)
def test_virasoro_bracket_formula(p, q):
    # [p(d)L_lam q(d)L] = p(-lam) q(d+lam) (d+2lam) L, computed in sympy
    m = VIR.base
    got = bracket(VIR, m.gen(0, p), m.gen(0, q)).free[0]
    sp, sq = to_sympy(p), to_sympy(q)
    want = sp.subs(sd, -slam) * sq.subs(sd, sd + slam) * (sd + 2 * slam)
    assert got == from_sympy(want)


@given(dpolys, dpolys)
def test_skew_on_arbitrary_elements(p, q):
    A = make_virasoro_ext(1, 2)
    m = A.base
    x, y = m.gen(0, p), m.gen(0, q)
    assert bracket(A, x, y) == skew_partner(A, bracket(A, y, x))


@given(dpolys, dpolys, dpolys)
def test_jacobi_on_arbitrary_elements(p, q, r):
    m = VIR.base
    a, b, c = m.gen(0, p), m.gen(0, q), m.gen(0, r)
    lhs = bracket(VIR, a, bracket(VIR, b, c, M), L) - bracket(VIR, b, bracket(VIR, a, c, L), M)
    assert lhs == bracket(VIR, bracket(VIR, a, b, L), c, L + M)


def test_torsion_brackets_rejected():
    m = FgModule(1, 1, labels=("L", "k"))
    with pytest.raises(TableError):
        ConformalAlgebra(m, {(0, 1): m.gen(0)})


def test_current_rejects_bad_constants():
    bad = [[[0, 1], [0, 0]], [[0, 0], [0, 0]]]
    with pytest.raises(TableError):
        make_current(bad)


def test_series_verdicts():
    d, c = derived_series(VIR), central_series(VIR)
    assert not d.reaches_zero and d.stabilized_at == 0
    assert not c.reaches_zero and c.stabilized_at == 0
    ab = central_series(make_abelian(2))
    assert ab.reaches_zero and ab.step == 1
    sh = conformal_shadow(make_finitevertex_example({-2: 1}))
    assert derived_series(sh).step == 2
    assert central_series(sh).step == 2
    # sl2 currents are perfect
    assert derived_series(make_current_sl2()).stabilized_at == 0


def test_virasoro_ext_derived_algebra():
    A = make_virasoro_ext(1, 1)
    d = derived_series(A)
    # the bracket reaches L and the top torsion line d k = k1, but not k itself
    m = A.base
    assert membership(d.terms[1], m.gen("L")) and membership(d.terms[1], m.gen("k1"))
    assert not membership(d.terms[1], m.gen("k"))
    A0 = make_virasoro_ext(0, 1)
    assert not membership(derived_series(A0).terms[1], A0.base.gen("k"))


def test_center():
    assert center(VIR).is_zero()
    A = with_trivial_torsion(VIR)
    Z = center(A)
    assert Z.rank == 0 and Z.torsion_rank == 1
    ab = make_abelian(2)
    assert center(ab) == whole(ab.base)
    assert center(make_current_sl2()).is_zero()


def test_ideals():
    A = make_virasoro_ext(1, 1)
    m = A.base
    assert is_ideal(A, span(m, [m.gen("k")]))
    assert is_ideal(A, whole(m))
    assert not is_ideal(make_current_sl2(), span(make_current_sl2().base,
                                                  [make_current_sl2().base.gen("e")]))


def test_strongly_simple_heuristic():
    assert strongly_simple_on_generators(VIR) == {"L": True}
    # ad e on sl2 only reaches e and h
    assert strongly_simple_on_generators(make_current_sl2()) == {"e": False, "h": False, "f": False}
