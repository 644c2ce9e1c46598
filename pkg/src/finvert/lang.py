"""Definition language for conformal algebras, vertex tables, coefficient
modules and conformal matrices.

    file   := block*
    block  := ("conformal" | "vertex" | "coeff" | "gcmatrix") NAME "{" stmt* "}"
    stmt   := "gen" names ";" | "torsion" names ";" | "del" matrix ";"
            | "dim" INT ";" | "vacuum" NAME ";" | "window" INT ";" | "flag" NAME ";"
            | "bracket" NAME NAME "=" expr ";" | "field" NAME NAME "=" expr ";"
            | "entry" NAME NAME "=" expr ";"
    matrix := "[" row ("," row)* "]"      row := "[" expr ("," expr)* "]"
    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" "-"? INT)?
    atom   := INT | "del" | "lambda" | "z" | "exp" "(" expr ")" | NAME | "(" expr ")"
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .cdmod import FgModule, ModElement
from .cohom import CoefficientModule
from .exact import ONE, ZERO, D, L, Poly, Series, truncated_exp
from .gcmat import ConformalMatrix
from .lca import ConformalAlgebra, TableError
from .va import VertexTable, is_even

KINDS = ("conformal", "vertex", "coeff", "gcmatrix")
SYMS = ("del", "lambda", "z")


class DefinitionError(ValueError):
    def __init__(self, msg, line=None, col=None, source_name="<input>"):
        self.msg = msg
        self.line = line
        self.col = col
        self.source_name = source_name
        super().__init__(self.render())

    def render(self):
        if self.line is None:
            return f"{self.source_name}: {self.msg}"
        return f"{self.source_name}:{self.line}:{self.col}: {self.msg}"


# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}()\[\];,=+\-*/^])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str       # int, name, punct, eof
    text: str
    line: int
    col: int


def tokenize(src: str, source_name="<input>") -> list[Token]:
    out = []
    line, start, i = 1, 0, 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if not m:
            raise DefinitionError(f"unexpected character {src[i]!r}", line, i - start + 1, source_name)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, i - start + 1))
        i = m.end()
    out.append(Token("eof", "", line, i - start + 1))
    return out


# ---------------------------------------------------------------------------
# syntax tree
# ---------------------------------------------------------------------------

def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: tuple = _pos()


@dataclass(frozen=True)
class Sym:
    name: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class Gen:
    name: str
    pos: tuple = _pos()


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: tuple = _pos()


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object
    pos: tuple = _pos()


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    pos: tuple = _pos()


@dataclass(frozen=True)
class Exp:
    arg: object
    pos: tuple = _pos()


@dataclass(frozen=True)
class Stmt:
    kind: str
    args: tuple
    expr: object = None
    pos: tuple = _pos()


@dataclass(frozen=True)
class Block:
    kind: str
    name: str
    stmts: tuple
    pos: tuple = _pos()

    def find(self, kind):
        return [s for s in self.stmts if s.kind == kind]


@dataclass(frozen=True)
class Definition:
    blocks: tuple
    source_name: str = field(default="<input>", compare=False)

    def block(self, name=None, kinds=KINDS) -> Block:
        for b in self.blocks:
            if b.kind in kinds and (name is None or b.name == name):
                return b
        want = f"block {name!r}" if name else "/".join(kinds) + " block"
        raise DefinitionError(f"no {want} in definition", source_name=self.source_name)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class Parser:
    def __init__(self, src: str, source_name="<input>"):
        self.toks = tokenize(src, source_name)
        self.i = 0
        self.source_name = source_name

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        where = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise DefinitionError(f"{msg} at {where}", tok.line, tok.col, self.source_name)

    def at(self, text):
        return self.tok.kind in ("punct", "name") and self.tok.text == text

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text):
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.next()

    def expect_kind(self, kind, what):
        if self.tok.kind != kind:
            self.error(f"expected {what}")
        return self.next()

    def name(self):
        t = self.expect_kind("name", "a name")
        if t.text in SYMS or t.text == "exp":
            self.error("reserved word used as a name", t)
        return t.text

    # blocks
    def parse(self) -> Definition:
        blocks = []
        while self.tok.kind != "eof":
            blocks.append(self.block())
        if not blocks:
            self.error("expected a block")
        return Definition(tuple(blocks), self.source_name)

    def block(self):
        t = self.tok
        if t.text not in KINDS:
            self.error("expected one of " + ", ".join(KINDS))
        self.next()
        name = self.name()
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("expected '}'")
            stmts.append(self.stmt())
        self.expect("}")
        return Block(t.text, name, tuple(stmts), (t.line, t.col))

    def stmt(self):
        t = self.tok
        pos = (t.line, t.col)
        kw = t.text
        if t.kind != "name":
            self.error("expected a statement")
        self.next()
        if kw in ("gen", "torsion"):
            names = [self.name()]
            while self.at(","):
                self.next()
                names.append(self.name())
            out = Stmt(kw, tuple(names), None, pos)
        elif kw == "del":
            out = Stmt(kw, (), self.matrix(), pos)
        elif kw in ("dim", "window"):
            out = Stmt(kw, (int(self.expect_kind("int", "an integer").text),), None, pos)
        elif kw in ("vacuum", "flag"):
            out = Stmt(kw, (self.name(),), None, pos)
        elif kw in ("bracket", "field", "entry"):
            a = self.name()
            b = self.name()
            self.expect("=")
            out = Stmt(kw, (a, b), self.expr(), pos)
        else:
            self.error("unknown statement", t)
        self.expect(";")
        return out

    def matrix(self):
        self.expect("[")
        rows = [self.row()]
        while self.at(","):
            self.next()
            rows.append(self.row())
        self.expect("]")
        return tuple(rows)

    def row(self):
        self.expect("[")
        xs = [self.expr()]
        while self.at(","):
            self.next()
            xs.append(self.expr())
        self.expect("]")
        return tuple(xs)

    # expressions
    def expr(self):
        left = self.term()
        while self.at("+") or self.at("-"):
            t = self.next()
            left = Bin(t.text, left, self.term(), (t.line, t.col))
        return left

    def term(self):
        left = self.unary()
        while self.at("*") or self.at("/"):
            t = self.next()
            right = self.unary()
            if t.text == "/" and isinstance(left, Num) and isinstance(right, Num) and right.value:
                left = Num(left.value / right.value, left.pos)
            else:
                left = Bin(t.text, left, right, (t.line, t.col))
        return left

    def unary(self):
        if self.at("-"):
            t = self.next()
            arg = self.unary()
            if isinstance(arg, Num):
                return Num(-arg.value, (t.line, t.col))
            return Neg(arg, (t.line, t.col))
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            t = self.next()
            sign = 1
            if self.at("-"):
                self.next()
                sign = -1
            k = int(self.expect_kind("int", "an integer exponent").text) * sign
            return Pow(base, k, (t.line, t.col))
        return base

    def atom(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "int":
            self.next()
            return Num(Fraction(int(t.text)), pos)
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "name":
            self.next()
            if t.text in SYMS:
                return Sym(t.text, pos)
            if t.text == "exp":
                self.expect("(")
                e = self.expr()
                self.expect(")")
                return Exp(e, pos)
            return Gen(t.text, pos)
        self.error("expected an expression")


def parse(src: str, source_name="<input>") -> Definition:
    return Parser(src, source_name).parse()


def parse_expr(src: str, source_name="<input>"):
    p = Parser(src, source_name)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("unexpected input")
    return e


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------

def fmt_expr(e) -> str:
    if isinstance(e, Num):
        v = e.value
        if v.denominator == 1 and v >= 0:
            return str(v.numerator)
        return f"({v})"
    if isinstance(e, (Sym, Gen)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{fmt_expr(e.arg)})"
    if isinstance(e, Bin):
        return f"({fmt_expr(e.left)} {e.op} {fmt_expr(e.right)})"
    if isinstance(e, Pow):
        b = fmt_expr(e.base)
        if isinstance(e.base, Pow):
            b = f"({b})"
        return f"{b}^{e.exp}"
    if isinstance(e, Exp):
        return f"exp({fmt_expr(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


def fmt_definition(d: Definition) -> str:
    out = []
    for b in d.blocks:
        out.append(f"{b.kind} {b.name} {{")
        for s in b.stmts:
            if s.kind in ("gen", "torsion"):
                out.append(f"  {s.kind} {', '.join(s.args)};")
            elif s.kind == "del":
                rows = ", ".join("[" + ", ".join(fmt_expr(x) for x in r) + "]" for r in s.expr)
                out.append(f"  del [{rows}];")
            elif s.kind in ("dim", "window", "vacuum", "flag"):
                out.append(f"  {s.kind} {s.args[0]};")
            else:
                out.append(f"  {s.kind} {s.args[0]} {s.args[1]} = {fmt_expr(s.expr)};")
        out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _const(p) -> Series:
    return Series.laurent_poly({0: Poly.coerce(p)})


class Evaluator:
    """Evaluates expressions to ``{generator index or None: Series in z}``."""

    def __init__(self, labels, exp_order=None, source_name="<input>", allow_z=True):
        self.labels = tuple(labels)
        self.exp_order = exp_order
        self.source_name = source_name
        self.allow_z = allow_z

    def error(self, msg, node):
        line, col = node.pos if node is not None and node.pos else (None, None)
        raise DefinitionError(msg, line, col, self.source_name)

    def eval(self, e) -> dict:
        if isinstance(e, Num):
            return {None: _const(e.value)}
        if isinstance(e, Sym):
            if e.name == "del":
                return {None: _const(D)}
            if e.name == "lambda":
                return {None: _const(L)}
            if not self.allow_z:
                self.error("z is not allowed here", e)
            return {None: Series.monomial((1,))}
        if isinstance(e, Gen):
            if e.name not in self.labels:
                self.error(f"unknown generator {e.name!r}", e)
            return {self.labels.index(e.name): _const(ONE)}
        if isinstance(e, Neg):
            return {k: -v for k, v in self.eval(e.arg).items()}
        if isinstance(e, Pow):
            if e.exp < 0:
                if not (isinstance(e.base, Sym) and e.base.name == "z"):
                    self.error("negative exponents are only allowed on z", e)
                if not self.allow_z:
                    self.error("z is not allowed here", e)
                return {None: Series.monomial((e.exp,))}
            base = self.scalar(self.eval(e.base), e)
            out = _const(ONE)
            for _ in range(e.exp):
                out = out * base
            return {None: out}
        if isinstance(e, Exp):
            arg = self.scalar(self.eval(e.arg), e)
            if self.exp_order is None:
                self.error("exp(...) needs a window directive", e)
            if not (arg.closed_low[0] and arg.closed_high[0]) or any(k != (1,) for k in arg.coeffs):
                self.error("exp argument must be z times a z-free expression", e)
            return {None: truncated_exp(arg.coeff(1), self.exp_order)}
        if isinstance(e, Bin):
            a = self.eval(e.left)
            b = self.eval(e.right)
            if e.op in "+-":
                out = dict(a)
                for k, v in b.items():
                    v = v if e.op == "+" else -v
                    out[k] = out[k] + v if k in out else v
                return out
            if e.op == "*":
                if None in a and len(a) == 1:
                    s, other = a[None], b
                elif None in b and len(b) == 1:
                    s, other = b[None], a
                else:
                    self.error("cannot multiply two generator expressions", e)
                return {k: s * v for k, v in other.items()}
            if e.op == "/":
                d = self.scalar(b, e)
                if not (d.closed_low[0] and d.closed_high[0]) or set(d.coeffs) - {(0,)} \
                        or not d.coeff(0).is_const() or d.coeff(0).is_zero():
                    self.error("can only divide by a nonzero rational", e)
                inv = 1 / d.coeff(0).const_value()
                return {k: v.scale(Poly.const(inv)) for k, v in a.items()}
        raise TypeError(f"not an expression: {e!r}")

    def scalar(self, val: dict, node) -> Series:
        if set(val) - {None}:
            self.error("expected an expression without generators", node)
        return val.get(None, _const(ZERO))

    def z_free(self, s: Series, node) -> Poly:
        if not (s.closed_low[0] and s.closed_high[0]) or set(s.coeffs) - {(0,)}:
            self.error("z is not allowed here", node)
        return s.coeff(0)

    def rational(self, e) -> Fraction:
        p = self.z_free(self.scalar(self.eval(e), e), e)
        if not p.is_const():
            self.error("expected a rational number", e)
        return p.const_value()


def _max_pole(e) -> int:
    """Sum of negative z exponents; bounds the pole order of any product."""
    if isinstance(e, Pow):
        return -e.exp if e.exp < 0 else e.exp * _max_pole(e.base)
    if isinstance(e, (Neg, Exp)):
        return _max_pole(e.arg)
    if isinstance(e, Bin):
        return _max_pole(e.left) + _max_pole(e.right)
    return 0


def _module(b: Block, name: str) -> FgModule:
    free = [n for s in b.find("gen") for n in s.args]
    tors = [n for s in b.find("torsion") for n in s.args]
    labels = free + tors
    seen = set()
    for s in b.find("gen") + b.find("torsion"):
        for n in s.args:
            if n in seen:
                raise DefinitionError(f"generator {n!r} declared twice", *s.pos, name)
            seen.add(n)
    dels = b.find("del")
    mat = ()
    if dels:
        ev = Evaluator(labels, source_name=name, allow_z=False)
        rows = dels[0].expr
        if len(rows) != len(tors) or any(len(r) != len(tors) for r in rows):
            raise DefinitionError(f"del matrix must be {len(tors)}x{len(tors)}", *dels[0].pos, name)
        mat = tuple(tuple(ev.rational(x) for x in r) for r in rows)
    return FgModule(len(free), len(tors), mat, tuple(labels))


def _flags(b: Block):
    return {s.args[0] for s in b.find("flag")}


def build(d: Definition, name=None, kinds=KINDS):
    """Turn one block into the matching domain object."""
    b = d.block(name, kinds)
    src = d.source_name
    if b.kind == "coeff":
        return _build_coeff(b, src)
    m = _module(b, src)
    if b.kind == "conformal":
        return _build_conformal(b, m, src)
    if b.kind == "vertex":
        return _build_vertex(b, m, src)
    return _build_gcmatrix(b, m, src)


def _build_coeff(b: Block, src):
    dims = b.find("dim")
    if not dims:
        raise DefinitionError("coeff block needs a dim statement", *b.pos, src)
    n = dims[0].args[0]
    dels = b.find("del")
    ev = Evaluator((), source_name=src, allow_z=False)
    if not dels:
        mat = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    else:
        rows = dels[0].expr
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DefinitionError(f"del matrix must be {n}x{n}", *dels[0].pos, src)
        mat = tuple(tuple(ev.rational(x) for x in r) for r in rows)
    return CoefficientModule(n, mat)


def _element(m: FgModule, val: dict, ev: Evaluator, node) -> ModElement:
    if None in val and not _zero_series(val[None]):
        ev.error("bracket values must be combinations of generators", node)
    out = m.zero()
    for k, s in val.items():
        if k is None:
            continue
        out = out + m.mul_poly(m.gen(k), ev.z_free(s, node))
    return out


def _zero_series(s: Series) -> bool:
    return not s.coeffs


def _build_conformal(b: Block, m: FgModule, src):
    ev = Evaluator(m.labels, source_name=src, allow_z=False)
    table = {}
    for s in b.find("bracket"):
        i, j = (_label(m, x, s, src) for x in s.args)
        val = _element(m, ev.eval(s.expr), ev, s.expr)
        if (m.is_torsion_index(i) or m.is_torsion_index(j)) and not val.is_zero():
            raise DefinitionError("brackets with a torsion generator must vanish", *s.pos, src)
        table[(i, j)] = val
    try:
        return ConformalAlgebra(m, table, b.name)
    except TableError as exc:
        raise DefinitionError(str(exc), *b.pos, src)


def _label(m: FgModule, x, s, src) -> int:
    if x not in m.labels:
        raise DefinitionError(f"unknown generator {x!r}", *s.pos, src)
    return m.index(x)


def _build_vertex(b: Block, m: FgModule, src):
    vac = b.find("vacuum")
    if not vac:
        raise DefinitionError("vertex block needs a vacuum statement", *b.pos, src)
    win = b.find("window")
    K = win[0].args[0] if win else None
    fields = {}
    for s in b.find("field"):
        i, j = (_label(m, x, s, src) for x in s.args)
        order = None if K is None else K + _max_pole(s.expr)
        ev = Evaluator(m.labels, order, src)
        val = ev.eval(s.expr)
        if None in val and not _zero_series(val[None]):
            ev.error("field values must be combinations of generators", s.expr)
        fields[(i, j)] = {k: v for k, v in val.items() if k is not None}
    if K is None:
        raise DefinitionError("vertex block needs a window statement", *b.pos, src)
    try:
        return VertexTable(m, _label(m, vac[0].args[0], vac[0], src), fields, K, b.name)
    except ValueError as exc:
        raise DefinitionError(str(exc), *vac[0].pos, src)


def _build_gcmatrix(b: Block, m: FgModule, src):
    ev = Evaluator(m.labels, source_name=src, allow_z=False)
    ent = [[ZERO] * m.size for _ in range(m.size)]
    for s in b.find("entry"):
        i, j = (_label(m, x, s, src) for x in s.args)
        ent[i][j] = ev.z_free(ev.scalar(ev.eval(s.expr), s.expr), s.expr)
    try:
        return ConformalMatrix(m, m, tuple(tuple(r) for r in ent))
    except ValueError as exc:
        raise DefinitionError(str(exc), *b.pos, src)


# ---------------------------------------------------------------------------
# built-in definitions
# ---------------------------------------------------------------------------

def _q(x) -> str:
    x = Fraction(x)
    return str(x) if x.denominator == 1 and x >= 0 else f"({x})"


def src_vir() -> str:
    return "conformal vir {\n  gen L;\n  bracket L L = (del + 2*lambda)*L;\n}\n"


def src_vir_ext(c, N: int) -> str:
    labels = ["k" if j == 0 else f"k{j}" for j in range(N + 1)]
    rows = ", ".join("[" + ", ".join("1" if i == j + 1 else "0" for j in range(N + 1)) + "]"
                     for i in range(N + 1))
    return (f"conformal vir_ext {{\n  gen L;\n  torsion {', '.join(labels)};\n"
            f"  del [{rows}];\n"
            f"  bracket L L = (del + 2*lambda)*L + {_q(c)}*lambda^3*{labels[-1]};\n}}\n")


def src_current_sl2() -> str:
    return ("conformal current_sl2 {\n  gen e, h, f;\n"
            "  bracket e h = -2*e;\n  bracket e f = h;\n"
            "  bracket h e = 2*e;\n  bracket h f = -2*f;\n"
            "  bracket f e = -h;\n  bracket f h = 2*f;\n}\n")


def src_finitevertex(psi: str, window: int = 8, odd_ok: bool = False) -> str:
    flag = "  flag expect_locality_failure;\n" if odd_ok else ""
    return (f"vertex finitevertex {{\n  gen a, b;\n  torsion vac;\n  vacuum vac;\n"
            f"  window {window};\n{flag}"
            f"  field a a = exp(z*del/2)*({psi})*b;\n}}\n")


def src_holomorphic(dim: int, derivation: str = "split", window: int = 8) -> str:
    lines = []
    if derivation == "split":
        labels = ["vac"] + [f"e{i}" for i in range(1, dim)]
        for i in range(1, dim):
            lines.append(f"  field e{i} e{i} = e{i};")
        mat = None
    elif derivation in ("euler", "zero"):
        labels = ["vac"] + [f"x{i}" for i in range(1, dim)]
        mat = [[(k if derivation == "euler" else 0) if r == k else 0 for k in range(dim)]
               for r in range(dim)]
        for i in range(1, dim):
            for j in range(dim):
                if i + j < dim:
                    f = f"exp({i}*z)" if derivation == "euler" else "1"
                    lines.append(f"  field x{i} {labels[j]} = {f}*{labels[i + j]};")
    else:
        raise ValueError(f"unknown derivation {derivation!r}")
    out = [f"vertex holomorphic {{", f"  torsion {', '.join(labels)};"]
    if mat is not None:
        out.append("  del [" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in mat) + "];")
    out += ["  vacuum vac;", f"  window {window};"] + lines + ["}"]
    return "\n".join(out) + "\n"


def src_scalar(alpha) -> str:
    return f"coeff C {{\n  dim 1;\n  del [[{_q(alpha)}]];\n}}\n"


def src_jordan(N: int) -> str:
    n = N + 1
    rows = ", ".join("[" + ", ".join("1" if i == j + 1 else "0" for j in range(n)) + "]"
                     for i in range(n))
    return f"coeff jordan {{\n  dim {n};\n  del [{rows}];\n}}\n"


BUILTINS = ("vir", "vir-ext", "current-sl2", "finitevertex", "holomorphic", "scalar", "jordan")

_BUILTIN_RE = re.compile(r"^\s*([a-z][a-z0-9\-]*)\s*(?:\((.*)\))?\s*$", re.S)


def _split_args(text: str, offset: int):
    args, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            args.append((text[start:i], offset + start))
            start = i + 1
    if text.strip():
        args.append((text[start:], offset + start))
    return args


def builtin_source(ident: str, window: int = 8, expect_locality_failure: bool = False) -> str:
    """Source text for a built-in such as ``vir-ext(1,2)`` or ``finitevertex(z^-2)``."""
    name = "<builtin>"
    m = _BUILTIN_RE.match(ident)
    if not m or m.group(1) not in BUILTINS:
        raise DefinitionError(f"unknown built-in {ident.strip()!r}; known: " + ", ".join(BUILTINS),
                              1, 1, name)
    kind = m.group(1)
    raw = m.group(2)
    args = _split_args(raw, m.start(2) + 1) if raw is not None else []

    def need(n):
        if len(args) != n:
            raise DefinitionError(f"{kind} takes {n} argument(s)", 1, 1, name)

    def rational(a):
        text, col = a
        try:
            e = parse_expr(text, name)
            return Evaluator((), source_name=name, allow_z=False).rational(e)
        except DefinitionError as exc:
            raise DefinitionError(exc.msg, 1, col + (exc.col or 1) - 1, name)

    def integer(a):
        v = rational(a)
        if v.denominator != 1 or v < 0:
            raise DefinitionError("expected a non-negative integer", 1, a[1], name)
        return int(v)

    if kind == "vir":
        need(0)
        return src_vir()
    if kind == "current-sl2":
        need(0)
        return src_current_sl2()
    if kind == "vir-ext":
        need(2)
        return src_vir_ext(rational(args[0]), integer(args[1]))
    if kind == "scalar":
        need(1)
        return src_scalar(rational(args[0]))
    if kind == "jordan":
        need(1)
        return src_jordan(integer(args[0]))
    if kind == "holomorphic":
        need(2)
        deriv = args[1][0].strip()
        if deriv not in ("split", "euler", "zero"):
            raise DefinitionError("derivation must be split, euler or zero", 1, args[1][1], name)
        return src_holomorphic(integer(args[0]), deriv, window)
    need(1)
    text, col = args[0]
    psi = psi_coefficients(text, col)
    odd = not is_even(psi)
    if odd and not expect_locality_failure:
        raise DefinitionError("psi(z) must be even (use --expect-locality-failure to allow it)",
                              1, col, name)
    return src_finitevertex(fmt_expr(parse_expr(text, name)), window, odd)


def psi_coefficients(text: str, col: int = 1) -> dict:
    name = "<builtin>"
    try:
        e = parse_expr(text, name)
        val = Evaluator((), source_name=name).eval(e)
        s = Evaluator((), source_name=name).scalar(val, e)
    except DefinitionError as exc:
        raise DefinitionError(exc.msg, 1, col + (exc.col or 1) - 1, name)
    if not (s.closed_low[0] and s.closed_high[0]):
        raise DefinitionError("psi must be a Laurent polynomial in z", 1, col, name)
    out = {}
    for (k,), c in s.coeffs.items():
        if not c.is_const():
            raise DefinitionError("psi must have rational coefficients", 1, col, name)
        out[k] = c.const_value()
    return out


def load(source: str, window: int = 8, expect_locality_failure: bool = False) -> Definition:
    """Parse a file path or a built-in name such as ``vir-ext(1,2)``."""
    import os
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return parse(fh.read(), source)
    return parse(builtin_source(source, window, expect_locality_failure), source)
