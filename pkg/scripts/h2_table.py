"""Tabulate H^2 of the Virasoro conformal algebra with coefficients in small
modules, comparing the structured and brute-force solvers."""
import argparse
import time
from dataclasses import dataclass
from fractions import Fraction

from finvert.cohom import CoefficientModule, decompose, h2


@dataclass
class Config:
    degree: int = 6
    max_jordan: int = 5


def modules(cfg: Config):
    for a in (0, 1, -1, 2, -2, Fraction(1, 3)):
        yield f"C_{a}", CoefficientModule.scalar(a)
    for N in range(1, cfg.max_jordan + 1):
        yield f"C[d]/d^{N + 1}", CoefficientModule.jordan(N)
    yield "2x2 unipotent", CoefficientModule(2, ((1, 1), (0, 1)))
    yield "jordan(1) + C_3", CoefficientModule(3, ((0, 0, 0), (1, 0, 0), (0, 0, 3)))


def main(cfg: Config):
    print(f"{'module':>18} {'blocks':>10} {'Z':>3} {'B':>3} {'H2':>3} {'flat':>5}  class")
    for name, C in modules(cfg):
        t0 = time.perf_counter()
        r = h2(C, cfg.degree)
        flat = h2(C, cfg.degree, solver="flat")
        dt = time.perf_counter() - t0
        reps = ", ".join(x.render(C) for x in r.representatives) or "-"
        blocks = str(decompose(C).jordan_sizes)
        agree = "ok" if flat.dimension == r.dimension else "DIFF"
        print(f"{name:>18} {blocks:>10} {r.cocycle_dim:>3} {r.coboundary_dim:>3} "
              f"{r.dimension:>3} {agree:>5}  {reps}  [{dt:.2f}s]")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--max-jordan", type=int, default=5)
    a = p.parse_args()
    main(Config(a.degree, a.max_jordan))
