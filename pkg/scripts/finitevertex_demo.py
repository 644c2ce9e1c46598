"""Walk through the finite non-commutative vertex table for several choices
of psi(z): products, locality order, nil-ideal series and the shadow."""
import argparse
from dataclasses import dataclass, field

from finvert.cdmod import span
from finvert.lca import central_series, derived_series
from finvert.va import (brackets_series, check_vertex_axioms, conformal_shadow, is_even,
                        is_nil_ideal, locality_check, make_finitevertex_example,
                        nilradical_lower_bound, product)


@dataclass
class Config:
    psis: list = field(default_factory=lambda: [{-2: 1}, {-4: 1, -2: 1}, {-6: 1}, {-3: 1}])
    window: int = 8
    max_n: int = 8


def run(psi, cfg: Config):
    odd = not is_even(psi)
    V = make_finitevertex_example(psi, cfg.window, expect_locality_failure=odd)
    m = V.base
    a, b, vac = m.gens()
    print(V.name)
    for n in range(V.pair_pole(0, 0), -3, -1):
        print(f"  a_({n})a = {m.fmt(product(V, a, a, n))}")
    ax = check_vertex_axioms(V)
    print(f"  axioms: {'pass' if ax.ok else ax.witnesses}")
    loc = locality_check(V, a, a, vac, cfg.max_n)
    print(f"  locality: {loc.status}" + (f", N = {loc.order}" if loc.order is not None else ""))
    if odd:
        return
    nil = is_nil_ideal(V, span(m, [a, b]))
    print("  I^n:", " -> ".join(t.describe() for t in nil.terms))
    print("  V^[n]:", " -> ".join(t.describe() for t in brackets_series(V).terms))
    A = conformal_shadow(V)
    print(f"  shadow: {derived_series(A).verdict}, {central_series(A).verdict}")
    print(f"  {nilradical_lower_bound(V).describe()}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--window", type=int, default=8)
    a = p.parse_args()
    cfg = Config(window=a.window)
    for psi in cfg.psis:
        run(psi, cfg)
