from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import from_sympy, sd, sz
from finvert.cdmod import membership, span, whole
from finvert.exact import LAM, D, L, ONE, ZERO, Poly, Series, WindowError, truncated_exp
from finvert.lca import central_series, check_axioms, derived_series
from finvert.va import (OddPsiError, brackets_series, check_vertex_axioms, conformal_shadow,
                        consequence_check, falling, gbinom, genwick_check, ideal_closure,
                        ideal_product, is_ideal, is_nil_ideal, kernel_ideal_check,
                        lambda_bracket, liebracket_check, locality_check,
                        make_finitevertex_example, make_holomorphic, nilradical_lower_bound,
                        novir_a, novir_verify, product, skew_rhs, weight_ideal_check, wick)

FV = make_finitevertex_example({-2: 1})
m = FV.base
a, b, vac = m.gen("a"), m.gen("b"), m.gen("vac")
HOLO = [make_holomorphic(3, d) for d in ("split", "euler", "zero")]


def test_gbinom_and_falling():
    assert falling(5, 2) == 20 and falling(3, 0) == 1
    assert gbinom(-1, 3) == -1
    assert gbinom(Fraction(1, 2).numerator, 2) == 0
    for n in range(-4, 5):
        for j in range(5):
            assert gbinom(n, j) == sympy.binomial(n, j)


@pytest.mark.parametrize("psi", [{-2: 1}, {-4: 1, -2: 1}, {-2: Fraction(1, 3), 0: 2}])
def test_products_against_sympy_series(psi):
    V = make_finitevertex_example(psi)
    expr = sympy.exp(sz * sd / 2) * sum(sympy.Rational(v.numerator, v.denominator) * sz ** k
                                       for k, v in psi.items())
    ser = sympy.expand(sympy.series(expr, sz, 0, 4).removeO())
    for n in range(-4, 4):
        want = from_sympy(ser.coeff(sz, -n - 1))
        got = product(V, a, a, n)
        assert got == V.base.gen("b", want)


def test_named_products():
    assert product(FV, a, a, 1) == b
    assert product(FV, a, a, 0) == m.gen("b", D / 2)
    assert wick(FV, a, a) == m.gen("b", D ** 2 / 8)
    assert product(FV, b, a, 0).is_zero()
    assert product(FV, vac, a, -1) == a
    assert product(FV, a, vac, -3) == m.gen("a", D ** 2 / 2)


def test_window_errors():
    with pytest.raises(WindowError):
        product(FV, a, a, -FV.window - 5)


def test_translation_rule():
    # (d a)_(n) a = -n a_(n-1) a
    da = m.apply_del(a)
    for n in range(-3, 3):
        assert product(FV, da, a, n) == product(FV, a, a, n - 1).scale(Poly.const(-n))


def test_axioms_and_skew():
    rep = check_vertex_axioms(FV)
    assert rep.ok, rep.witnesses
    for n in range(-2, 3):
        assert product(FV, a, a, n) == skew_rhs(FV, a, a, n)


def test_corruption_is_caught():
    bad = FV.with_entry("a", "a", {"b": Series.laurent_poly({-2: ONE, -1: ONE})})
    rep = check_vertex_axioms(bad)
    assert not rep.ok
    assert rep.witnesses


def test_locality_orders():
    r = locality_check(FV, a, a, vac)
    assert r.status == "pass" and r.order == 2
    V4 = make_finitevertex_example({-4: 1, -2: 1})
    assert locality_check(V4, a, a, vac).order == 4


def test_odd_psi():
    with pytest.raises(OddPsiError):
        make_finitevertex_example({-3: 1})
    V = make_finitevertex_example({-3: 1}, expect_locality_failure=True)
    r = locality_check(V, a, a, vac, N_max=8)
    assert r.status == "fail"
    assert all(v == "nonzero" for v in r.per_order.values())
    assert set(r.per_order) == set(range(9))


def test_shadow():
    A = conformal_shadow(FV)
    assert check_axioms(A).ok
    assert A.entry("a", "a") == m.gen("b", D / 2 + L)
    assert derived_series(A).step == 2 and central_series(A).step == 2


def test_lambda_bracket():
    assert lambda_bracket(FV, a, a) == m.gen("b", D / 2 + L)


def test_nil_series():
    I = span(m, [a, b])
    res = is_nil_ideal(FV, I)
    assert res.nil and res.step == 3
    assert res.terms[1] == span(m, [b])
    bs = brackets_series(FV)
    assert bs.reaches_zero and bs.terms[1] == span(m, [b])
    nil = nilradical_lower_bound(FV)
    assert nil.contains == I
    assert not nil.reduced_lower_bound


def test_ideal_calculus():
    c = ideal_closure(FV, [a])
    assert c.submodule == span(m, [a, b]) and c.closure_certified
    assert is_ideal(FV, span(m, [b])).closure_certified
    assert not membership(ideal_closure(FV, [b]).submodule, a)


@pytest.mark.parametrize("V", [FV] + HOLO, ids=lambda V: V.name)
def test_products_of_submodules_skew(V):
    # A.B lies in B.A by skew-symmetry
    gens = V.base.gens()
    for i, g in enumerate(gens):
        for h in gens[i:]:
            A, B = span(V.base, [g]), span(V.base, [h])
            ab, ba = ideal_product(V, A, B), ideal_product(V, B, A)
            if not (ab.window_conditional or ba.window_conditional):
                assert ab.submodule <= ba.submodule


def test_liebracket_suite():
    for x in (a, b, vac):
        for y in (a, b, vac):
            for w in (a, b, vac):
                r = liebracket_check(FV, x, y, w)
                assert r.ok, (x, y, w, r.witness)
                assert r.checked


@pytest.mark.parametrize("V", [FV] + HOLO, ids=lambda V: V.name)
def test_genwick(V):
    gens = V.base.gens()
    for x in gens:
        for y in gens:
            for w in gens:
                r = genwick_check(V, x, y, w)
                assert r.ok and r.checked


def test_genwick_detects_corruption():
    # Y(a,z)a = z^-2 a makes a_(1)a = a, which breaks the generalized Wick identity
    bad = FV.with_entry("a", "a", {"a": Series.laurent_poly({-2: ONE})})
    r = genwick_check(bad, a, a, a)
    assert not r.ok
    assert r.witness == (1, -2)   # (lambda-power, z-order)


@pytest.mark.parametrize("V", HOLO, ids=lambda V: V.name)
def test_holomorphic(V):
    assert check_vertex_axioms(V).ok
    assert weight_ideal_check(V)["status"] == "vacuous"
    nil = nilradical_lower_bound(V)
    if V.name.endswith("split)"):
        # C^3 with idempotents is reduced
        assert nil.reduced_lower_bound
        assert consequence_check(V)["status"] == "pass"
    else:
        # C[x]/(x^3): x generates a nil ideal
        x1, x2 = V.base.gen("x1"), V.base.gen("x2")
        assert nil.contains == span(V.base, [x1, x2])
        assert consequence_check(V)["status"] == "no claim"


def test_kernel_ideal_check():
    out = kernel_ideal_check(make_holomorphic(3, "split"))
    assert out and all(v["closed"] for v in out.values())


def test_consequence_check_no_claim_when_nil():
    assert consequence_check(FV)["status"] == "no claim"


@pytest.mark.parametrize("c", [0, 1, Fraction(-1, 2)])
def test_novir_series_against_sympy(c):
    K = 5
    ser = novir_a(c, K)
    cc = sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
    expr = (sd ** 2 * sympy.exp(sz * sd) / (2 * (sympy.exp(sz * sd / 2) - 1) ** 2)
            - cc * sd ** 2 / 8 * (1 + sympy.exp(sz * sd)))
    want = sympy.expand(sympy.series(expr, sz, 0, K + 1).removeO())
    for p in range(-2, K + 1):
        assert ser.coeff(p) == from_sympy(sympy.simplify(want.coeff(sz, p)))


@pytest.mark.parametrize("c", [0, 1])
def test_novir(c):
    r = novir_verify(c, 8)
    assert r.diffeq_zero and r.singular_ok
    assert r.status == "refuted"
    p, k, coeff = r.virL_witness
    assert not coeff.is_zero() and k in coeff.coeffs_in(LAM)
