"""Command-line front end.

Exit codes: 0 all checks pass (or informational output), 1 a check failed,
2 inconclusive within the window or bound, 3 input error.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass, field

from . import cohom, gcmat, lca, va
from .exact import WindowError
from .lang import DefinitionError, build, fmt_definition, load, psi_coefficients

SCHEMA = "finvert-report/1"
EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3


@dataclass
class Report:
    command: str
    inputs: list = field(default_factory=list)      # (source, digest)
    window: int | None = None
    degree: int | None = None
    verdicts: list = field(default_factory=list)    # (key, value)
    witnesses: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    exit_code: int = EXIT_PASS

    def add(self, key, value):
        self.verdicts.append((key, value))

    def witness(self, key, value):
        self.witnesses.append((key, value))

    def worst(self, code):
        # fail outranks inconclusive
        if code == EXIT_FAIL or self.exit_code == EXIT_FAIL:
            self.exit_code = EXIT_FAIL
        else:
            self.exit_code = max(self.exit_code, code)

    def human(self, timings=False) -> str:
        head = f"{self.command}"
        if self.inputs:
            head += " " + ", ".join(src for src, _ in self.inputs)
        bounds = []
        if self.window is not None:
            bounds.append(f"window {self.window}")
        if self.degree is not None:
            bounds.append(f"lambda-degree {self.degree}")
        if bounds:
            head += "  [" + ", ".join(bounds) + "]"
        lines = [head]
        lines += [f"  {k}: {v}" for k, v in self.verdicts]
        lines += [f"  witness {k}: {v}" for k, v in self.witnesses]
        if timings:
            lines += [f"  time {k}: {v:.3f}s" for k, v in self.timings.items()]
        lines.append(f"  exit: {self.exit_code}")
        return "\n".join(lines)

    def machine(self, timings=False) -> str:
        lines = [f"schema={SCHEMA}", f"command={self.command}"]
        for n, (src, dig) in enumerate(self.inputs):
            lines += [f"input.{n}={src}", f"input.{n}.digest={dig}"]
        if self.window is not None:
            lines.append(f"window={self.window}")
        if self.degree is not None:
            lines.append(f"lambda_degree={self.degree}")
        lines += [f"verdict.{_key(k)}={_val(v)}" for k, v in self.verdicts]
        lines += [f"witness.{_key(k)}={_val(v)}" for k, v in self.witnesses]
        if timings:
            lines += [f"time.{_key(k)}={v:.3f}" for k, v in self.timings.items()]
        lines.append(f"exit={self.exit_code}")
        return "\n".join(lines)


def _key(k) -> str:
    return str(k).replace(" ", "_").replace("=", "-")


def _val(v) -> str:
    return str(v).replace("\n", " ")


def digest(d) -> str:
    return hashlib.sha256(fmt_definition(d).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def _load(args, rep: Report, kinds):
    d = load(args.source, args.window, args.expect_locality_failure)
    rep.inputs.append((args.source, digest(d)))
    return build(d, args.name, kinds)


def _conformal(args, rep):
    obj = _load(args, rep, ("conformal", "vertex"))
    if isinstance(obj, va.VertexTable):
        rep.window = obj.window
        return va.conformal_shadow(obj)
    return obj


def _vertex(args, rep) -> va.VertexTable:
    V = _load(args, rep, ("vertex",))
    rep.window = V.window
    return V


def _gen(m, label):
    if label not in m.labels:
        raise DefinitionError(f"unknown generator {label!r}")
    return m.gen(label)


def _pair(m, text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise DefinitionError("--pair expects two generator names separated by a comma")
    return [_gen(m, p) for p in parts], parts


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_check_axioms(args, rep):
    A = _conformal(args, rep)
    r = lca.check_axioms(A)
    for k, ok in r.results.items():
        rep.add(k, "pass" if ok else "fail")
    for k, w in r.witnesses.items():
        rep.witness(k, w)
    rep.worst(EXIT_PASS if r.ok else EXIT_FAIL)


def _series(args, rep, kind):
    A = _conformal(args, rep)
    fn = lca.derived_series if kind == "derived" else lca.central_series
    res = fn(A, args.max_steps)
    sym = ("(", ")") if kind == "derived" else ("[", "]")
    for n, t in enumerate(res.terms):
        rep.add(f"R^{sym[0]}{n}{sym[1]}", t.describe())
    word = "solvable" if kind == "derived" else "nilpotent"
    if res.reaches_zero:
        label = "length" if kind == "derived" else "class"
        rep.add("verdict", f"{word} of {label} {res.step}")
    elif res.stabilized_at is not None:
        s = res.stabilized_at
        rep.add("verdict", f"not {word}: R^{sym[0]}{s + 1}{sym[1]} = "
                           f"{res.terms[s].describe()}")
    else:
        rep.add("verdict", f"undecided after {len(res.terms) - 1} steps")
        rep.worst(EXIT_INCONCLUSIVE)


def cmd_derived_series(args, rep):
    _series(args, rep, "derived")


def cmd_central_series(args, rep):
    _series(args, rep, "central")


def cmd_center(args, rep):
    A = _conformal(args, rep)
    bound = lca.center_degree_bound(A)
    rep.add("degree_bound", bound)
    rep.add("center", lca.center(A, bound).describe())


def _gens_of(A, args):
    m = A.base
    if args.gen:
        return [(args.gen, _gen(m, args.gen))]
    return [(m.labels[i], m.gen(i)) for i in range(m.free_rank)]


def cmd_adjoint(args, rep):
    A = _conformal(args, rep)
    for lab, g in _gens_of(A, args):
        rep.add(f"ad({lab})", str(gcmat.adjoint_matrix(A, g)))


def cmd_nilpotent_action(args, rep):
    A = _conformal(args, rep)
    for lab, g in _gens_of(A, args):
        res = gcmat.action_nilpotent(gcmat.adjoint_matrix(A, g))
        rep.add(f"ad({lab})", res.verdict)


def cmd_weights(args, rep):
    obj = _load(args, rep, ("conformal", "gcmatrix", "vertex"))
    if isinstance(obj, va.VertexTable):
        rep.window = obj.window
        obj = va.conformal_shadow(obj)
    if isinstance(obj, gcmat.ConformalMatrix):
        mats = [("matrix", obj)]
    else:
        mats = [(f"ad({lab})", gcmat.adjoint_matrix(obj, g)) for lab, g in _gens_of(obj, args)]
    for lab, F in mats:
        try:
            wr = gcmat.weight_spaces(F, "auto")
        except gcmat.PreconditionError as exc:
            rep.add(lab, f"inconclusive: {exc}")
            rep.worst(EXIT_INCONCLUSIVE)
            continue
        for ch in wr.chains:
            rep.add(f"{lab} V^{ch.weight}", f"{ch.generalized.describe()} dims={ch.dims} "
                                            f"degree_bound={ch.degree_bound}")
        rep.add(f"{lab} direct", "yes" if wr.direct else "no")
        for dg in wr.diagnostics:
            rep.add(f"{lab} note", dg)
        if not wr.direct:
            rep.worst(EXIT_FAIL)


def _coeff(args, rep) -> cohom.CoefficientModule:
    return _load(args, rep, ("coeff",))


def cmd_h2(args, rep):
    C = _coeff(args, rep)
    rep.degree = args.lambda_degree
    r = cohom.h2(C, args.lambda_degree)
    rep.add("cocycle_dim", r.cocycle_dim)
    rep.add("coboundary_dim", r.coboundary_dim)
    rep.add("dimension", r.dimension)
    rep.add("representatives", "; ".join(c.render(C) for c in r.representatives) or "none")


def cmd_classify_ext(args, rep):
    C = _coeff(args, rep)
    rep.degree = args.lambda_degree
    r = cohom.classify_irreducible(C, args.lambda_degree)
    rep.add("invertible_dim", r.invertible_dim)
    rep.add("jordan_sizes", r.jordan_sizes)
    for size, dim, rp in r.classes_per_block:
        rep.add(f"block {size}", f"h2={dim} representative={rp}")
    rep.add("irreducible", f"yes, class {r.irreducible_class}" if r.irreducible_exists else "no")
    for n in r.notes:
        rep.add("note", n)


def cmd_vertex_check(args, rep):
    V = _vertex(args, rep)
    r = va.check_vertex_axioms(V)
    for k, ok in r.results.items():
        rep.add(k, "pass" if ok else "fail")
    rep.add("checked", r.checked)
    rep.add("skipped_outside_window", r.skipped)
    for k, w in r.witnesses.items():
        rep.witness(k, w)
    rep.worst(EXIT_PASS if r.ok else EXIT_FAIL)


def cmd_locality(args, rep):
    V = _vertex(args, rep)
    m = V.base
    on = _gen(m, args.on) if args.on else V.vac
    on_lab = args.on or m.labels[V.vacuum]
    if args.pair:
        (a, b), labs = _pair(m, args.pair)
        pairs = [((a, b), labs)]
    else:
        pairs = [((m.gen(i), m.gen(j)), (m.labels[i], m.labels[j]))
                 for i in range(m.free_rank) for j in range(m.free_rank)]
    for (a, b), (la, lb) in pairs:
        r = va.locality_check(V, a, b, on, args.max_n)
        key = f"({la},{lb}) on {on_lab}"
        if r.status == "pass":
            rep.add(key, f"N = {r.order}")
        elif r.status == "fail":
            rep.add(key, f"fail for all N <= {args.max_n}")
            if r.witness:
                rep.witness(key, f"N={r.witness[0]} nonzero at z^{r.witness[1][0]} w^{r.witness[1][1]}")
        else:
            rep.add(key, f"inconclusive {r.per_order}")
        if r.status == "inconclusive":
            rep.worst(EXIT_INCONCLUSIVE)
        elif r.status == "fail" and not args.expect_locality_failure:
            rep.worst(EXIT_FAIL)
    if args.expect_locality_failure:
        fails = sum(1 for k, v in rep.verdicts if str(v).startswith("fail"))
        rep.add("expected_failure_seen", "yes" if fails else "no")
        rep.exit_code = EXIT_PASS if fails else EXIT_FAIL


def cmd_genwick(args, rep):
    V = _vertex(args, rep)
    m = V.base
    gens = list(zip(m.labels, m.gens()))
    checked = 0
    for la, a in gens:
        for lb, b in gens:
            for lc, c in gens:
                r = va.genwick_check(V, a, b, c)
                checked += r.checked
                if not r.ok:
                    rep.witness(f"({la},{lb},{lc})", f"lambda^{r.witness[0]} z^{r.witness[1]}")
                    rep.worst(EXIT_FAIL)
    rep.add("orders_checked", checked)
    rep.add("genwick", "fail" if rep.exit_code == EXIT_FAIL else "pass")
    if not checked:
        rep.worst(EXIT_INCONCLUSIVE)


def cmd_products(args, rep):
    V = _vertex(args, rep)
    m = V.base
    if args.pair:
        (a, b), (la, lb) = _pair(m, args.pair)
        pairs = [(a, b, la, lb)]
    else:
        pairs = [(m.gen(i), m.gen(j), m.labels[i], m.labels[j])
                 for i in range(m.size) for j in range(m.size)]
    for a, b, la, lb in pairs:
        top = va.pole_bound(V, a, b)
        for n in range(top, args.lowest - 1, -1):
            try:
                x = va.product(V, a, b, n)
            except WindowError:
                rep.add(f"{la}_({n}){lb}", "outside window")
                continue
            if not x.is_zero() or args.pair:
                rep.add(f"{la}_({n}){lb}", m.fmt(x))


def cmd_nil_series(args, rep):
    V = _vertex(args, rep)
    m = V.base
    bs = va.brackets_series(V, args.max_steps or 8)
    for n, t in enumerate(bs.terms):
        rep.add(f"V^[{n}]", t.describe())
    if bs.stable_nil:
        rep.add("stable term", f"{bs.terms[-1].describe()} {bs.stable_nil.verdict}")
    if args.ideal:
        gens = [_gen(m, x.strip()) for x in args.ideal.split(",")]
        nr = va.is_nil_ideal(V, va.span(m, gens), args.max_steps or 8)
        for n, t in enumerate(nr.terms):
            rep.add(f"I^{n + 1}", t.describe())
        rep.add("ideal", nr.verdict)
    rep.add("nilradical", va.nilradical_lower_bound(V).describe())


def cmd_novir(args, rep):
    rep.window = args.window
    r = va.novir_verify(args.c, args.window)
    rep.add("c", r.c)
    rep.add("singular_part", "2/z^2 + del/z" if r.singular_ok else "wrong")
    rep.add("diffeq_residual", f"zero through z^{r.K}" if r.diffeq_zero else "nonzero")
    if r.virL_witness:
        p, k, coeff = r.virL_witness
        rep.add("virL", "fails")
        rep.witness("virL", f"z^{p} lambda^{k}: {coeff}")
    else:
        rep.add("virL", f"no failure through z^{r.K}; raise --window")
    rep.worst({"refuted": EXIT_PASS, "fail": EXIT_FAIL}.get(r.status, EXIT_INCONCLUSIVE))


def cmd_example_finitevertex(args, rep):
    psi = psi_coefficients(args.psi)
    V = va.make_finitevertex_example(psi, args.window, args.expect_locality_failure)
    rep.inputs.append((f"finitevertex({args.psi})", V.name))
    rep.window = V.window
    m = V.base
    a, b, vac = m.gens()
    for n in (1, 0, -1):
        rep.add(f"a_({n})a", m.fmt(va.product(V, a, a, n)))
    ax = va.check_vertex_axioms(V)
    rep.add("axioms", "pass" if ax.ok else f"fail {ax.witnesses}")
    loc = va.locality_check(V, a, a, vac, args.max_n)
    rep.add("locality (a,a) on vac", f"N = {loc.order}" if loc.status == "pass" else loc.status)
    nil = va.is_nil_ideal(V, va.span(m, [a, b]))
    rep.add("I = <a,b>", " -> ".join(t.describe() for t in nil.terms) + f" ({nil.verdict})")
    bs = va.brackets_series(V)
    rep.add("V^[n]", " -> ".join(t.describe() for t in bs.terms))
    if not ax.ok and not args.expect_locality_failure:
        rep.worst(EXIT_FAIL)
    if args.expect_locality_failure:
        rep.worst(EXIT_PASS if loc.status == "fail" else EXIT_FAIL)
    elif loc.status != "pass":
        rep.worst(EXIT_FAIL if loc.status == "fail" else EXIT_INCONCLUSIVE)


COMMANDS = {
    "check-axioms": (cmd_check_axioms, "check the conformal algebra axioms"),
    "derived-series": (cmd_derived_series, "derived series and solvability"),
    "central-series": (cmd_central_series, "lower central series and nilpotency"),
    "center": (cmd_center, "centre of a conformal algebra"),
    "adjoint": (cmd_adjoint, "adjoint matrices of generators"),
    "nilpotent-action": (cmd_nilpotent_action, "nilpotency of adjoint actions"),
    "weights": (cmd_weights, "generalized weight spaces"),
    "h2": (cmd_h2, "second cohomology of Virasoro with coefficients"),
    "classify-ext": (cmd_classify_ext, "irreducible central extensions"),
    "vertex-check": (cmd_vertex_check, "vacuum, translation and skew-symmetry checks"),
    "locality": (cmd_locality, "locality order of field pairs"),
    "genwick": (cmd_genwick, "generalized Wick identity on generator triples"),
    "products": (cmd_products, "table of n-th products"),
    "nil-series": (cmd_nil_series, "bracket series, nil-ideals, nilradical bound"),
    "novir": (cmd_novir, "the Virasoro vertex algebra obstruction"),
    "example-finitevertex": (cmd_example_finitevertex, "the finite non-commutative example"),
}

NO_SOURCE = ("novir", "example-finitevertex")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=int, default=8, metavar="K",
                        help="truncation order for series (default 8)")
    common.add_argument("--lambda-degree", type=int, default=6, metavar="D",
                        help="lambda-degree bound for cocycles (default 6)")
    common.add_argument("--max-steps", type=int, default=None, metavar="N")
    common.add_argument("--machine", action="store_true", help="key=value output")
    common.add_argument("--timings", action="store_true")
    common.add_argument("--expect-locality-failure", action="store_true")
    common.add_argument("--name", default=None, help="block to use from a file")

    p = argparse.ArgumentParser(prog="finvert", description="finite vertex and conformal algebra toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        if name not in NO_SOURCE:
            sp.add_argument("source", help="definition file or built-in, e.g. vir-ext(1,2)")
        if name in ("adjoint", "nilpotent-action", "weights"):
            sp.add_argument("--gen", default=None)
        if name in ("locality", "products"):
            sp.add_argument("--pair", default=None, metavar="A,B")
        if name == "locality":
            sp.add_argument("--on", default=None)
        if name in ("locality", "example-finitevertex"):
            sp.add_argument("--max-n", type=int, default=8)
        if name == "products":
            sp.add_argument("--lowest", type=int, default=-3)
        if name == "nil-series":
            sp.add_argument("--ideal", default=None, metavar="A,B")
        if name == "novir":
            sp.add_argument("--c", default="0")
        if name == "example-finitevertex":
            sp.add_argument("--psi", default="z^-2")
    return p


def run(argv) -> tuple[Report, argparse.Namespace]:
    p = build_parser()
    args = p.parse_args(argv)
    if args.window < 1:
        raise ValueError("--window must be at least 1")
    if args.lambda_degree < 3:
        raise ValueError("--lambda-degree must be at least 3")
    if args.max_steps is not None and args.max_steps < 1:
        raise ValueError("--max-steps must be at least 1")
    rep = Report(args.command)
    fn = COMMANDS[args.command][0]
    t0 = time.perf_counter()
    fn(args, rep)
    rep.timings["total"] = time.perf_counter() - t0
    return rep, args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        rep, args = run(argv)
    except WindowError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (DefinitionError, va.OddPsiError, lca.TableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:
        # argparse usage errors
        return EXIT_INPUT if exc.code not in (0, None) else 0
    out = rep.machine(args.timings) if args.machine else rep.human(args.timings)
    print(out)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
