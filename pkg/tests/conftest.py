from fractions import Fraction

import sympy
from hypothesis import HealthCheck, settings, strategies as st

from finvert.exact import NSYM, Poly

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=15,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# sympy is only an oracle here; the package itself never imports it
sd, slam, smu, salpha, sz, sw = sympy.symbols("d lam mu alpha z w")
SYMS = (sd, slam, smu, salpha)


def to_sympy(p: Poly):
    out = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(SYMS, e):
            term *= s ** k
        out += term
    return sympy.expand(out)


def from_sympy(expr) -> Poly:
    expr = sympy.expand(expr)
    if expr == 0:
        return Poly()
    terms = {}
    for monom, c in sympy.Poly(expr, *SYMS).terms():
        terms[tuple(monom)] = Fraction(int(c.p), int(c.q))
    return Poly(terms)


small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def polys(syms=(0, 1), max_deg=3, max_terms=4):
    """Random Poly in the given symbol indices (0 = d, 1 = lam, 2 = mu, 3 = alpha)."""
    exps = st.tuples(*[st.integers(0, max_deg) if i in syms else st.just(0)
                       for i in range(NSYM)])
    return st.dictionaries(exps, small_fracs, max_size=max_terms).map(Poly)


# --- acceptance reporting -------------------------------------------------------

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
