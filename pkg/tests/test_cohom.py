from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import slam, smu
from finvert.cohom import (CoefficientModule, Cocycle, classify_irreducible, coboundary_space,
                           cocycle_space, cocycle_space_flat, decompose, h2, is_cocycle)

C0 = CoefficientModule.scalar(0)


def sympy_cocycle_dim(mat, D):
    """Dimension of the cocycle space computed independently in sympy."""
    n = len(mat)
    Dm = sympy.Matrix(mat)
    xs = sympy.symbols(f"x0:{n * (D + 1)}")
    v = lambda k: sympy.Matrix(xs[k * n:(k + 1) * n])

    def p(t):
        return sum((t ** k * v(k) for k in range(D + 1)), sympy.zeros(n, 1))

    def act(poly_in_d, vec):
        # poly_in_d is (a + b*d); d acts through the matrix
        a, b = poly_in_d
        return a * vec + b * (Dm * vec)

    lhs = (slam - smu) * p(slam + smu)
    rhs = act((slam + 2 * smu, 1), p(slam)) - act((2 * slam + smu, 1), p(smu))
    eqs = []
    for e in lhs - rhs:
        eqs.extend(sympy.Poly(sympy.expand(e), slam, smu).coeffs())
    if not eqs:
        return n * (D + 1)
    A, _ = sympy.linear_eq_to_matrix(eqs, xs)
    return n * (D + 1) - A.rank()


@pytest.mark.parametrize("alpha", [0, 1, -2, Fraction(1, 3), 5])
def test_scalar_cocycles_against_sympy(alpha):
    C = CoefficientModule.scalar(alpha)
    assert len(cocycle_space(C, 6)) == sympy_cocycle_dim([[alpha]], 6)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_jordan_cocycles_against_sympy(N):
    C = CoefficientModule.jordan(N)
    assert len(cocycle_space(C, 5)) == sympy_cocycle_dim(C.matrix(), 5)


def test_c0_cocycles_are_lambda_and_lambda_cubed():
    sp = cocycle_space(C0, 6)
    assert sorted(c.render(C0) for c in sp) == ["lambda", "lambda^3"]
    r = h2(C0, 6)
    assert r.dimension == 1
    assert r.representatives[0].render(C0) == "lambda^3"


@pytest.mark.parametrize("alpha", [1, -2, Fraction(1, 3)])
def test_scalar_nonzero_has_no_classes(alpha):
    assert h2(CoefficientModule.scalar(alpha), 6).dimension == 0


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_jordan_class(N):
    C = CoefficientModule.jordan(N)
    r = h2(C, 6)
    assert r.dimension == 1
    exp = "del" if N == 1 else f"del^{N}"
    assert r.representatives[0].render(C) == f"lambda^3*{exp}"


def test_invertible_block_is_trivial():
    assert h2(CoefficientModule(2, ((1, 1), (0, 1))), 6).dimension == 0


small = st.integers(-2, 2)
mats = st.sampled_from([1, 2]).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=25)
@given(mats, st.sampled_from([4, 5]))
def test_structured_agrees_with_flat(mat, D):
    C = CoefficientModule(len(mat), tuple(tuple(r) for r in mat))
    a = cocycle_space(C, D)
    b = cocycle_space_flat(C, D)
    assert all(is_cocycle(C, c) for c in a)
    n = C.dim * (D + 1)
    both = sympy.Matrix([c.flat() for c in a] + [c.flat() for c in b]).rank()
    assert len(a) == len(b) == both


@settings(max_examples=25)
@given(mats)
def test_coboundaries_are_cocycles(mat):
    C = CoefficientModule(len(mat), tuple(tuple(r) for r in mat))
    for c in coboundary_space(C, 5):
        assert is_cocycle(C, c)


def test_decompose():
    C = CoefficientModule(3, ((0, 0, 0), (1, 0, 0), (0, 0, 2)))
    dec = decompose(C)
    assert dec.jordan_sizes == [2]
    assert len(dec.invertible_basis) == 1


def test_non_cocycle_detected():
    assert not is_cocycle(C0, Cocycle(((0,), (0,), (1,))))


def test_degree_bound_validation():
    with pytest.raises(ValueError):
        h2(C0, 2)


def test_classify_irreducible():
    rep = classify_irreducible(C0)
    assert rep.irreducible_exists and rep.irreducible_class == "lambda^3"
    assert not classify_irreducible(CoefficientModule.jordan(1)).irreducible_exists
