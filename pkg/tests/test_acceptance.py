"""The nine acceptance criteria, each with its stated runtime budget.

Every criterion prints one ``criterion N: PASS|FAIL`` line (visible with
``pytest -s``; a summary is also added to the terminal report).
"""
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from finvert.cdmod import FgModule, span
from finvert.cli import main
from finvert.cohom import CoefficientModule, cocycle_space, cocycle_space_flat, h2
from finvert.exact import ALPHA, LAM, A, D, L, M, ZERO, Poly, rank
from finvert.gcmat import (ConformalMatrix, _bracket_at, action_nilpotent, adjoint_matrix,
                           candidate_weights, gc_bracket, weight_chain, weight_spaces)
from finvert.lang import builtin_source, fmt_definition, parse
from finvert.lca import (central_series, check_axioms, derived_series, make_abelian,
                         make_current_sl2, make_virasoro, make_virasoro_ext)
from finvert.va import (brackets_series, check_vertex_axioms, conformal_shadow,
                        consequence_check, genwick_check, is_nil_ideal, liebracket_check,
                        locality_check, make_finitevertex_example, make_holomorphic,
                        novir_verify, product)

RESULTS = {}


@pytest.fixture
def criterion(request):
    """Times the body, records and prints the verdict line."""
    state = {}

    def start(num, budget):
        state.update(num=num, budget=budget, t0=time.perf_counter())

    yield start
    elapsed = time.perf_counter() - state["t0"]
    failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
    over = elapsed >= state["budget"]
    ok = not failed and not over
    line = (f"criterion {state['num']}: {'PASS' if ok else 'FAIL'} "
            f"({elapsed:.2f}s, budget {state['budget']}s)")
    RESULTS[state["num"]] = line
    print(line)
    assert not over, f"criterion {state['num']} exceeded its runtime budget: {elapsed:.2f}s"


def test_criterion_1_axioms(criterion):
    criterion(1, 1.0)
    algebras = [make_virasoro(), make_current_sl2(),
                conformal_shadow(make_finitevertex_example({-2: 1}))]
    algebras += [make_virasoro_ext(c, N) for c in (0, 1) for N in (0, 1, 2)]
    for alg in algebras:
        rep = check_axioms(alg)
        assert rep.ok, (alg.name, rep.witnesses)
    bad = check_axioms(make_virasoro(3))
    assert not bad["C3"] and bad.witnesses["C3"]["pair"] == ("L", "L")


def test_criterion_2_cohomology(criterion):
    criterion(2, 5.0)
    C0 = CoefficientModule.scalar(0)
    r = h2(C0)
    assert r.dimension == 1 and r.representatives[0].render(C0) == "lambda^3"
    assert sorted(c.render(C0) for c in cocycle_space(C0)) == ["lambda", "lambda^3"]
    for alpha in (1, -2, Fraction(1, 3)):
        assert h2(CoefficientModule.scalar(alpha)).dimension == 0
    for N in range(1, 5):
        C = CoefficientModule.jordan(N)
        r = h2(C)
        exp = "del" if N == 1 else f"del^{N}"
        assert r.dimension == 1 and r.representatives[0].render(C) == f"lambda^3*{exp}"
    assert h2(CoefficientModule(2, ((1, 1), (0, 1)))).dimension == 0
    modules = [C0, CoefficientModule.scalar(1), CoefficientModule.jordan(2),
               CoefficientModule(2, ((1, 1), (0, 1)))]
    for C in modules:
        for Dg in (4, 6, 8):
            s, f = cocycle_space(C, Dg), cocycle_space_flat(C, Dg)
            n = C.dim * (Dg + 1)
            assert len(s) == len(f) == rank([c.flat() for c in s + f], n)


def test_criterion_3_novir(criterion):
    criterion(3, 10.0)
    for c in (0, 1):
        r = novir_verify(c, 8)
        assert r.diffeq_zero and r.singular_ok
        assert r.virL_witness is not None
        p, k, coeff = r.virL_witness
        assert not coeff.coeffs_in(LAM)[k].is_zero()
        assert r.status == "refuted"


def test_criterion_4_finitevertex(criterion):
    criterion(4, 2.0)
    V = make_finitevertex_example({-2: 1})
    m = V.base
    a, b, vac = m.gens()
    loc = locality_check(V, a, a, vac)
    assert loc.status == "pass" and loc.order == 2
    assert check_vertex_axioms(V).ok
    assert product(V, a, a, 1) == b
    assert product(V, a, a, 0) == m.gen("b", D / 2)
    nil = is_nil_ideal(V, span(m, [a, b]))
    assert [t.describe() for t in nil.terms] == ["<a, b>", "<b>", "0"]
    bs = brackets_series(V)
    assert len(bs.terms) == 3 and bs.terms[2].is_zero()
    odd = make_finitevertex_example({-3: 1}, expect_locality_failure=True)
    r = locality_check(odd, a, a, vac, N_max=8)
    assert r.status == "fail"
    assert [r.per_order[N] for N in range(9)] == ["nonzero"] * 9


def test_criterion_5_series(criterion):
    criterion(5, 1.0)
    vir = make_virasoro()
    d, c = derived_series(vir), central_series(vir)
    assert not d.reaches_zero and not c.reaches_zero
    assert d.stabilized_at == 0 and c.stabilized_at == 0
    for ab in (make_abelian(1), make_abelian(3), make_abelian(2, 1)):
        cs = central_series(ab)
        assert cs.reaches_zero and cs.step == 1
    sh = conformal_shadow(make_finitevertex_example({-2: 1}))
    assert derived_series(sh).step == 2
    assert central_series(sh).step == 2


def _random_poly(rng):
    terms = {}
    for _ in range(rng.randint(0, 3)):
        e = (rng.randint(0, 3), rng.randint(0, 3), 0, 0)
        if e[0] + e[1] <= 3:
            terms[e] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return Poly(terms)


def _random_matrix(rng, n):
    m = FgModule(n)
    return ConformalMatrix(m, m, tuple(tuple(_random_poly(rng) for _ in range(n))
                                       for _ in range(n)))


def test_criterion_6_gc(criterion):
    criterion(6, 5.0)
    rng = random.Random(20261017)
    for trial in range(50):
        n = 1 if trial % 2 else 2
        F, G, H = (_random_matrix(rng, n) for _ in range(3))
        m = F.source
        fg = gc_bracket(F, G)
        gf = gc_bracket(G, F)
        assert fg.entries == tuple(tuple(-x.subs({ALPHA: L - A}) for x in row)
                                   for row in gf.entries)
        X = [c.subs({ALPHA: M}) for c in gc_bracket(G, H).columns()]
        lhs = _bracket_at(m, F.at, lambda p: [c.subs({LAM: p}) for c in X], A, L)
        Y = fg.columns()
        r1 = _bracket_at(m, lambda p: [c.subs({LAM: p}) for c in Y], H.at, A + M, L)
        Z = gc_bracket(F, H).columns()
        r2 = _bracket_at(m, G.at, lambda p: [c.subs({LAM: p}) for c in Z], M, L)
        assert lhs == [x + y for x, y in zip(r1, r2)]
    one = FgModule(1)
    Fd = ConformalMatrix(one, one, ((D,),))
    assert gc_bracket(Fd, Fd).entries == ((D * (2 * A - L),),)


def test_criterion_7_weights(criterion):
    criterion(7, 5.0)
    m = FgModule(2)
    F = ConformalMatrix(m, m, ((L, ZERO), (ZERO, ZERO)))
    rep = weight_spaces(F)
    ranks = {str(c.weight): c.generalized.rank for c in rep.chains}
    assert ranks == {"0": 1, "lambda": 1} and rep.direct
    rng = random.Random(7)
    for _ in range(10):
        T = ConformalMatrix(m, m, ((ZERO, _random_poly(rng)), (ZERO, ZERO)))
        assert candidate_weights(T) == [ZERO]
        assert action_nilpotent(T).nilpotent
    mt = FgModule(1, 2, ((0, 0), (1, 0)), ("a", "s", "t"))
    for _ in range(5):
        x = _random_poly(rng).subs({0: ZERO})
        G = ConformalMatrix(mt, mt, ((_random_poly(rng), ZERO, ZERO), (x, ZERO, ZERO),
                                     (x, ZERO, ZERO)))
        first = weight_chain(G, ZERO).chain[1]
        assert first.torsion_rank == 2
    V = make_finitevertex_example({-2: 1})
    gens = V.base.gens()
    for p in gens:
        for q in gens:
            for r in gens:
                res = liebracket_check(V, p, q, r)
                assert res.ok and res.checked, res.witness


BUILTIN_VERTEX = [make_finitevertex_example({-2: 1}), make_finitevertex_example({-4: 1, -2: 1})] + [
    make_holomorphic(d, kind) for d in (2, 3) for kind in ("split", "euler", "zero")]


def test_criterion_8_consequences(criterion):
    criterion(8, 10.0)
    reduced = [make_holomorphic(d, "split") for d in (1, 2, 3, 4)]
    for V in reduced:
        out = consequence_check(V)
        assert out["status"] == "pass", (V.name, out)
    for V in BUILTIN_VERTEX:
        gens = V.base.gens()
        for p in gens:
            for q in gens:
                for r in gens:
                    res = genwick_check(V, p, q, r)
                    assert res.ok, (V.name, res.witness)


CORPUS = ["vir", "current-sl2", "finitevertex(z^-2)", "finitevertex(z^-4 + z^-2)",
          "scalar(0)", "scalar(1/3)", "jordan(4)"] + \
    [f"vir-ext({c},{N})" for c in (0, 1) for N in (0, 1, 2)] + \
    [f"holomorphic({d},{k})" for d in (2, 3) for k in ("split", "euler", "zero")]

ERROR_FILES = [
    ("check-axioms", "conformal V { gen L; bracket L L = (del + 2*lambda)*L +", 1, 56),
    ("check-axioms", "conformal V { gen L; torsion k; bracket L k = k; }", 1, 33),
    ("check-axioms", "conformal V { gen L; bracket L L = del^-1*L; }", 1, 39),
    ("vertex-check", "vertex W { gen a; torsion vac; vacuum vac; field a a = exp(z*del)*a; }", 1, 56),
    ("h2", "coeff C { dim 2; del [[0]]; }", 1, 18),
]


def test_criterion_9_parser(criterion, tmp_path, capsys):
    criterion(9, 10.0)
    texts = [builtin_source(s) for s in CORPUS]
    texts.append(builtin_source("finitevertex(z^-3)", expect_locality_failure=True))
    texts += [p.read_text() for p in sorted((Path(__file__).parent.parent / "defs").glob("*.fv"))]
    for t in texts:
        d = parse(t)
        assert parse(fmt_definition(d)) == d
    for i, (cmd, src, line, col) in enumerate(ERROR_FILES):
        f = tmp_path / f"bad{i}.fv"
        f.write_text(src)
        assert main([cmd, str(f)]) == 3
        assert f"{f}:{line}:{col}:" in capsys.readouterr().err
    assert main(["check-axioms", "finitevertex(z^-3)"]) == 3
    assert ":1:14:" in capsys.readouterr().err
