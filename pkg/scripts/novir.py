"""Run the Virasoro obstruction computation for a few central charges and
truncation orders, printing the first nonzero residual of the bracket identity."""
import argparse
import time
from dataclasses import dataclass, field
from fractions import Fraction

from finvert.va import novir_verify


@dataclass
class Config:
    charges: list = field(default_factory=lambda: [Fraction(0), Fraction(1), Fraction(-2),
                                                   Fraction(1, 2)])
    orders: list = field(default_factory=lambda: [4, 8, 12])


def main(cfg: Config):
    print(f"{'c':>6} {'K':>3} {'diffeq':>7} {'status':>9}  witness (z-order, lambda-power)")
    for c in cfg.charges:
        for K in cfg.orders:
            t0 = time.perf_counter()
            r = novir_verify(c, K)
            dt = time.perf_counter() - t0
            wit = f"({r.virL_witness[0]}, {r.virL_witness[1]})" if r.virL_witness else "-"
            print(f"{str(c):>6} {K:>3} {str(r.diffeq_zero):>7} {r.status:>9}  {wit}  [{dt:.2f}s]")
            if r.virL_witness:
                print(f"{'':>22}coefficient: {r.virL_witness[2]}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--c", type=Fraction, nargs="*")
    p.add_argument("--K", type=int, nargs="*")
    a = p.parse_args()
    cfg = Config()
    if a.c:
        cfg.charges = a.c
    if a.K:
        cfg.orders = a.K
    main(cfg)
