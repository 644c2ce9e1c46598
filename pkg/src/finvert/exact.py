"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction`.  :class:`Poly` is a sparse
polynomial in the fixed ordered symbol set ``(d, lam, mu, alpha)``, where
``d`` is the derivation.  :class:`Series` is a truncated Laurent series in
``z`` or ``(z, w)`` that carries its window with it.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

SYMBOLS = ("d", "lam", "mu", "alpha")
NSYM = len(SYMBOLS)
DEL, LAM, MU, ALPHA = range(NSYM)
_PRETTY = {"d": "del", "lam": "lambda", "mu": "mu", "alpha": "alpha"}
_ZERO_EXP = (0,) * NSYM


def _idx(sym) -> int:
    if isinstance(sym, int):
        return sym
    return SYMBOLS.index(sym)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    clean[e] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = clean
        self._hash = None

    # constructors
    @classmethod
    def const(cls, c) -> "Poly":
        c = as_fraction(c)
        return cls({_ZERO_EXP: c}) if c else ZERO

    @classmethod
    def var(cls, sym, power: int = 1) -> "Poly":
        e = [0] * NSYM
        e[_idx(sym)] = power
        return cls({tuple(e): Fraction(1)})

    @classmethod
    def coerce(cls, x) -> "Poly":
        return x if isinstance(x, Poly) else cls.const(x)

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self) -> bool:
        return all(e == _ZERO_EXP for e in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get(_ZERO_EXP, Fraction(0))

    def degree(self, sym=None) -> int:
        """Degree in one symbol (total degree if ``sym`` is None); -1 for zero."""
        if not self.terms:
            return -1
        if sym is None:
            return max(sum(e) for e in self.terms)
        i = _idx(sym)
        return max(e[i] for e in self.terms)

    def free_of(self, *syms) -> bool:
        idx = [_idx(s) for s in syms]
        return all(e[i] == 0 for e in self.terms for i in idx)

    def symbols(self) -> set:
        return {SYMBOLS[i] for e in self.terms for i in range(NSYM) if e[i]}

    def coeffs_in(self, sym) -> dict[int, "Poly"]:
        """Split as ``sum_k sym**k * c_k``; returns ``{k: c_k}``."""
        i = _idx(sym)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: Poly(v) for k, v in sorted(out.items())}

    def coefficient(self, exps: Mapping) -> Fraction:
        e = [0] * NSYM
        for s, k in exps.items():
            e[_idx(s)] = k
        return self.terms.get(tuple(e), Fraction(0))

    # arithmetic
    def __add__(self, other):
        other = Poly.coerce(other)
        if not other.terms:
            return self
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Poly(t)

    __radd__ = __add__

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_fraction(other)
            if not c:
                return ZERO
            return Poly({e: v * c for e, v in self.terms.items()})
        if not self.terms or not other.terms:
            return ZERO
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        return self * (1 / c)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def subs(self, mapping: Mapping) -> "Poly":
        """Simultaneous substitution ``{symbol: Poly}``."""
        m = {_idx(k): Poly.coerce(v) for k, v in mapping.items()}
        if not m:
            return self
        powers: dict = {}

        def pw(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = m[i] ** k
            return powers[key]

        acc: dict = {}
        for e, c in self.terms.items():
            kept = list(e)
            factor = None
            for i in m:
                if e[i]:
                    p = pw(i, e[i])
                    factor = p if factor is None else factor * p
                    kept[i] = 0
            mono = Poly({tuple(kept): c})
            term = mono if factor is None else mono * factor
            for e2, c2 in term.terms.items():
                acc[e2] = acc.get(e2, 0) + c2
        return Poly(acc)

    def shift_del(self, by: "Poly") -> "Poly":
        """Substitute ``d -> d + by``."""
        return self.subs({DEL: Poly.var(DEL) + by})

    def sort_key(self):
        return tuple(sorted(((tuple(e), c) for e, c in self.terms.items())))

    def __repr__(self):
        return f"Poly({str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[e]
            mono = "*".join(
                _PRETTY[SYMBOLS[i]] + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e) if k
            )
            if not mono:
                s = _fmt_frac(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{_fmt_frac(abs(c))}*{mono}"
            parts.append(("-" if c < 0 else "+", s))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out


def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


ZERO = Poly()
ONE = Poly({_ZERO_EXP: Fraction(1)})
D = Poly.var(DEL)
L = Poly.var(LAM)
M = Poly.var(MU)
A = Poly.var(ALPHA)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def divmod_del(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Euclidean division of polynomials in ``d`` alone."""
    if not (a.free_of(LAM, MU, ALPHA) and b.free_of(LAM, MU, ALPHA)):
        raise ValueError("divmod_del needs polynomials in d only")
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    db = b.degree(DEL)
    lead = b.coefficient({DEL: db})
    q, r = ZERO, a
    while r and r.degree(DEL) >= db:
        dr = r.degree(DEL)
        t = Poly.var(DEL, dr - db) * (r.coefficient({DEL: dr}) / lead)
        q = q + t
        r = r - t * b
    return q, r


# ---------------------------------------------------------------------------
# rational linear algebra
# ---------------------------------------------------------------------------

def rref(rows: Sequence[Sequence[Fraction]], ncols: int | None = None):
    """Reduced row echelon form; returns ``(rows, pivot_columns)``."""
    m = [[as_fraction(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : rows @ x = 0}``."""
    red, piv = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def rank(rows, ncols=None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def reduce_vector(vec, basis_rref, pivots):
    """Reduce ``vec`` against an RREF basis."""
    v = list(vec)
    for row, p in zip(basis_rref, pivots):
        if v[p]:
            f = v[p]
            v = [x - f * y for x, y in zip(v, row)]
    return v


def mat_mul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0))
             for j in range(len(b[0]))] for i in range(len(a))]


def mat_vec(a, v):
    return [sum((a[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(a))]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# truncated Laurent series
# ---------------------------------------------------------------------------

class WindowError(ValueError):
    """A requested coefficient lies outside the tracked window."""


class EmptyWindowError(WindowError):
    """An operation produced no coefficient that is determined."""


class Series:
    """Laurent series in ``z`` (or ``z, w``) with ``Poly`` coefficients.

    Per variable the coefficients are known exactly on ``[low, high]``.
    ``closed_low`` says every coefficient below ``low`` is exactly zero,
    ``closed_high`` likewise above ``high``; an open side means unknown.
    A truncated power series is closed below and open above; a Laurent
    polynomial is closed on both sides.
    """

    __slots__ = ("vars", "low", "high", "closed_low", "closed_high", "coeffs")

    def __init__(self, vars, low, high, coeffs=None, closed_low=None, closed_high=None):
        self.vars = tuple(vars)
        n = len(self.vars)
        self.low = tuple(low)
        self.high = tuple(high)
        self.closed_low = tuple(closed_low) if closed_low is not None else (True,) * n
        self.closed_high = tuple(closed_high) if closed_high is not None else (False,) * n
        clean = {}
        for e, c in (coeffs or {}).items():
            c = Poly.coerce(c)
            if c and all(lo <= x <= hi for x, lo, hi in zip(e, self.low, self.high)):
                clean[tuple(e)] = c
        self.coeffs = clean

    # constructors
    @classmethod
    def laurent_poly(cls, coeffs: Mapping[int, Poly], var="z") -> "Series":
        """Exact finite Laurent polynomial in one variable."""
        keys = [k for k, v in coeffs.items() if Poly.coerce(v)]
        lo = min(keys, default=0)
        hi = max(keys, default=0)
        return cls((var,), (lo,), (hi,), {(k,): v for k, v in coeffs.items()},
                   (True,), (True,))

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=ONE, vars=("z",)) -> "Series":
        return cls(vars, exps, exps, {tuple(exps): coeff}, (True,) * len(vars),
                   (True,) * len(vars))

    @classmethod
    def one(cls, vars=("z",)) -> "Series":
        return cls.monomial((0,) * len(vars), ONE, vars)

    # queries
    def coeff(self, *e) -> Poly:
        for x, lo, hi, cl, ch in zip(e, self.low, self.high, self.closed_low, self.closed_high):
            if x < lo:
                if cl:
                    return ZERO
                raise WindowError(f"exponent {x} below window [{lo}, {hi}]")
            if x > hi:
                if ch:
                    return ZERO
                raise WindowError(f"exponent {x} above window [{lo}, {hi}]")
        return self.coeffs.get(tuple(e), ZERO)

    def window(self):
        return tuple(zip(self.low, self.high))

    def is_zero_on_window(self) -> bool:
        return not self.coeffs

    def first_nonzero(self):
        if not self.coeffs:
            return None
        return min(self.coeffs)

    def _ext(self, i):
        lo = -math.inf if self.closed_low[i] else self.low[i]
        hi = math.inf if self.closed_high[i] else self.high[i]
        return lo, hi

    # arithmetic
    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError(f"incompatible variables {self.vars} vs {other.vars}")

    def _combine(self, other, sign):
        self._check(other)
        low, high, cl, ch = [], [], [], []
        for i in range(len(self.vars)):
            a_lo, a_hi = self._ext(i)
            b_lo, b_hi = other._ext(i)
            lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
            if lo == -math.inf:
                lo = min(self.low[i], other.low[i])
            if hi == math.inf:
                hi = max(self.high[i], other.high[i])
            if lo > hi:
                raise EmptyWindowError("sum has an empty window")
            low.append(lo)
            high.append(hi)
            cl.append(self.closed_low[i] and other.closed_low[i])
            ch.append(self.closed_high[i] and other.closed_high[i])
        t = dict(self.coeffs)
        for e, c in other.coeffs.items():
            t[e] = t.get(e, ZERO) + (c if sign > 0 else -c)
        return Series(self.vars, low, high, t, cl, ch)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(Poly.const(-1))

    def scale(self, p) -> "Series":
        p = Poly.coerce(p)
        return Series(self.vars, self.low, self.high,
                      {e: c * p for e, c in self.coeffs.items()},
                      self.closed_low, self.closed_high)

    def map_coeffs(self, f) -> "Series":
        return Series(self.vars, self.low, self.high,
                      {e: f(c) for e, c in self.coeffs.items()},
                      self.closed_low, self.closed_high)

    def subs(self, mapping) -> "Series":
        return self.map_coeffs(lambda c: c.subs(mapping))

    def _mul_range(self, other, i):
        la, ha = self.low[i], self.high[i]
        lb, hb = other.low[i], other.high[i]
        acl, ach = self.closed_low[i], self.closed_high[i]
        bcl, bch = other.closed_low[i], other.closed_high[i]
        good = []
        for p in range(la + lb, ha + hb + 1):
            low_ok = (acl or (bch and p >= la + hb)) and (bch or (acl and p <= la + hb))
            high_ok = (ach or (bcl and p <= ha + lb)) and (bcl or (ach and p >= ha + lb))
            if low_ok and high_ok:
                good.append(p)
        if not good:
            raise EmptyWindowError(
                f"product in {self.vars[i]} has no determined coefficient")
        return good[0], good[-1], acl and bcl, ach and bch

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        self._check(other)
        ranges = [self._mul_range(other, i) for i in range(len(self.vars))]
        low = [r[0] for r in ranges]
        high = [r[1] for r in ranges]
        t: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if all(lo <= x <= hi for x, lo, hi in zip(e, low, high)):
                    t[e] = t.get(e, ZERO) + c1 * c2
        return Series(self.vars, low, high, t,
                      [r[2] for r in ranges], [r[3] for r in ranges])

    __rmul__ = __mul__

    def deriv(self, var_index: int = 0) -> "Series":
        t = {}
        for e, c in self.coeffs.items():
            k = e[var_index]
            if k:
                e2 = list(e)
                e2[var_index] -= 1
                t[tuple(e2)] = c * k
        low = list(self.low)
        high = list(self.high)
        low[var_index] -= 1
        high[var_index] -= 1
        return Series(self.vars, low, high, t, self.closed_low, self.closed_high)

    def truncate(self, high) -> "Series":
        high = tuple(min(h, x) for h, x in zip(self.high, high))
        return Series(self.vars, self.low, high, self.coeffs, self.closed_low,
                      tuple(False for _ in high))

    def equals_on_window(self, other) -> bool:
        return (self - other).is_zero_on_window()

    def __repr__(self):
        terms = " + ".join(f"({c})*{self._mono(e)}" for e, c in sorted(self.coeffs.items()))
        return f"Series[{self.window()}]({terms or '0'})"

    def _mono(self, e):
        return "*".join(f"{v}^{k}" for v, k in zip(self.vars, e))


def truncated_exp(expr: Poly, order: int, var: str = "z") -> Series:
    """Taylor expansion of ``exp(var * expr)`` through ``var**order``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    expr = Poly.coerce(expr)
    coeffs = {}
    term = ONE
    for k in range(order + 1):
        if k:
            term = term * expr / k
        coeffs[(k,)] = term
    closed = expr.is_zero()
    return Series((var,), (0,), (order,), coeffs, (True,), (closed,))


def power_series_inverse(s: Series) -> Series:
    """Inverse of a power series with unit constant term, to ``s``'s order."""
    c0 = s.coeff(0)
    if not c0.is_const() or c0.is_zero():
        raise ValueError("constant term must be a nonzero rational")
    inv0 = 1 / c0.const_value()
    n = s.high[0]
    out = [Poly.const(inv0)]
    for k in range(1, n + 1):
        acc = ZERO
        for j in range(1, k + 1):
            acc = acc + s.coeff(j) * out[k - j]
        out.append(-acc * inv0)
    return Series(s.vars, (0,), (n,), {(k,): c for k, c in enumerate(out)},
                  (True,), (False,))


def iota_expand(numerator: Poly, k: int, region: str, low: int, high: int) -> Series:
    """Expansion of ``numerator * (z - w)**(-k)`` in ``|z|>|w|`` or ``|w|>|z|``.

    Coefficients are kept for exponents in ``[low, high]`` in both variables.
    ``region`` is ``"z>w"`` or ``"w>z"``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    numerator = Poly.coerce(numerator)
    vars = ("z", "w")
    if k == 0:
        s = Series.monomial((0, 0), numerator, vars)
        return s
    coeffs = {}
    if region == "z>w":
        # (z-w)^-k = z^-k sum_j C(k+j-1, j) (w/z)^j
        if -k < low:
            raise WindowError("window too small to hold the leading term")
        for j in range(0, high - low + 1):
            e = (-k - j, j)
            if low <= e[0] and e[1] <= high:
                coeffs[e] = numerator * math.comb(k + j - 1, j)
        return Series(vars, (low, 0), (-k, high), coeffs, (False, True), (True, False))
    if region == "w>z":
        # (z-w)^-k = (-1)^k w^-k sum_j C(k+j-1, j) (z/w)^j
        if -k < low:
            raise WindowError("window too small to hold the leading term")
        sign = -1 if k % 2 else 1
        for j in range(0, high - low + 1):
            e = (j, -k - j)
            if e[0] <= high and low <= e[1]:
                coeffs[e] = numerator * (sign * math.comb(k + j - 1, j))
        return Series(vars, (0, low), (high, -k), coeffs, (True, False), (False, True))
    raise ValueError(f"unknown region {region!r}")


def window_mul(a: Series, b: Series) -> Series:
    return a * b
