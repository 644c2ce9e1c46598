from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from finvert.cohom import CoefficientModule
from finvert.exact import D, L, Poly
from finvert.gcmat import ConformalMatrix
from finvert.lang import (BUILTINS, DefinitionError, build, builtin_source, fmt_definition,
                          fmt_expr, load, parse, parse_expr, psi_coefficients)
from finvert.lca import ConformalAlgebra, make_current_sl2, make_virasoro, make_virasoro_ext
from finvert.va import VertexTable, make_finitevertex_example, make_holomorphic

DEFS = sorted((Path(__file__).parent.parent / "defs").glob("*.fv"))

CORPUS = ["vir", "current-sl2", "finitevertex(z^-2)", "finitevertex(z^-4 + z^-2)",
          "finitevertex(1/3*z^-2 + 2)", "scalar(0)", "scalar(-1/2)", "jordan(3)"] + \
    [f"vir-ext({c},{N})" for c in (0, 1) for N in (0, 1, 2)] + \
    [f"holomorphic(3,{d})" for d in ("split", "euler", "zero")]


def corpus_texts():
    out = [(s, builtin_source(s)) for s in CORPUS]
    out.append(("odd", builtin_source("finitevertex(z^-3)", expect_locality_failure=True)))
    out += [(str(p), p.read_text()) for p in DEFS]
    return out


@pytest.mark.parametrize("name,text", corpus_texts(), ids=lambda x: x if len(x) < 40 else "")
def test_round_trip(name, text):
    d = parse(text, name)
    printed = fmt_definition(d)
    assert parse(printed) == d
    assert fmt_definition(parse(printed)) == printed


def test_documented_examples():
    d = parse("conformal Vir { gen L; bracket L L = (del + 2*lambda)*L; }")
    A, V = build(d), make_virasoro()
    assert A.base == V.base and A.table == V.table
    c = build(parse("coeff C0 { dim 1; del [[0]]; }"))
    assert c == CoefficientModule.scalar(0)


@pytest.mark.parametrize("ident,obj", [
    ("vir", make_virasoro()),
    ("current-sl2", make_current_sl2()),
    ("vir-ext(1,2)", make_virasoro_ext(1, 2)),
    ("jordan(2)", CoefficientModule.jordan(2)),
])
def test_builtins_match_constructors(ident, obj):
    built = build(load(ident))
    if isinstance(obj, ConformalAlgebra):
        assert built.base == obj.base and built.table == obj.table
    else:
        assert built == obj


@pytest.mark.parametrize("ident,obj", [
    ("finitevertex(z^-2)", make_finitevertex_example({-2: 1})),
    ("holomorphic(3,euler)", make_holomorphic(3, "euler")),
    ("holomorphic(3,split)", make_holomorphic(3, "split")),
])
def test_vertex_builtins_match_constructors(ident, obj):
    built = build(load(ident))
    assert isinstance(built, VertexTable)
    assert built.base == obj.base and built.vacuum == obj.vacuum
    for key in obj.fields:
        for t, s in obj.fields[key].items():
            assert built.fields[key][t].equals_on_window(s)


def test_gcmatrix_block():
    F = build(load(str(next(p for p in DEFS if p.name == "gc.fv"))))
    assert isinstance(F, ConformalMatrix)
    assert F.entries[0][0] == L and F.entries[1][0] == Poly()


def test_builtin_list():
    assert set(BUILTINS) >= {"vir", "vir-ext", "current-sl2", "finitevertex", "holomorphic"}


def test_psi_coefficients():
    assert psi_coefficients("z^-4 + 3*z^-2") == {-4: 1, -2: 3}


# --- generated expressions ----------------------------------------------------

atoms = st.sampled_from(["del", "lambda", "z", "1", "2", "3/4", "L", "x1"])


def combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(
            lambda t: f"{t[0]} {t[1]} {t[2]}"),
        children.map(lambda c: f"({c})"),
        children.map(lambda c: f"-{c}"),
        st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        st.integers(-3, 3).map(lambda k: f"z^{k}"),
        children.map(lambda c: f"exp({c})"),
    )


exprs = st.recursive(atoms, combine, max_leaves=8)


@given(exprs)
def test_expression_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(fmt_expr(e)) == e


# --- diagnostics ---------------------------------------------------------------

ERRORS = [
    # (source, line, col, fragment)
    ("conformal V { gen L; bracket L L = (del + 2*lambda)*L +", 1, 56, "end of input"),
    ("conformal V {\n  gen L;\n  bracket L L = (del + 2*lambda*L;\n}", 3, 34, "expected ')'"),
    ("conformal V { gens L; }", 1, 15, "unknown statement"),
    ("conformal V { gen L; torsion k; bracket L k = k; }", 1, 33, "torsion"),
    ("conformal V { gen L; bracket L M = L; }", 1, 22, "unknown generator"),
    ("conformal V { gen L; bracket L L = del^-1*L; }", 1, 39, "negative"),
    ("vertex W { gen a; torsion vac; vacuum vac; field a a = exp(z*del)*a; }", 1, 56, "window"),
    ("vertex W { gen a; torsion vac; window 4; }", 1, 1, "vacuum"),
    ("coeff C { dim 2; del [[0]]; }", 1, 18, "del"),
    ("blah X { }", 1, 1, "expected one of"),
    ("conformal V { gen L; bracket L L = L @ L; }", 1, 38, "unexpected character"),
]


@pytest.mark.parametrize("src,line,col,frag", ERRORS)
def test_positioned_errors(src, line, col, frag):
    with pytest.raises(DefinitionError) as ei:
        build(parse(src, "t.fv"))
    err = ei.value
    assert (err.line, err.col) == (line, col), err.render()
    assert frag in err.msg
    assert err.render().startswith(f"t.fv:{line}:{col}:")


def test_odd_psi_needs_flag():
    with pytest.raises(DefinitionError) as ei:
        builtin_source("finitevertex(z^-3)")
    assert ei.value.col == 14
    assert "even" in ei.value.msg


@pytest.mark.parametrize("ident", ["nosuch", "vir-ext(1)", "jordan(-1)", "holomorphic(3,odd)",
                                  "vir-ext(1/, 2)"])
def test_bad_builtins(ident):
    with pytest.raises(DefinitionError):
        builtin_source(ident)
