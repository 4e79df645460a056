"""Circle constants c_{1,k} next to the covering-radius lower bounds, and RP^n covers."""

from __future__ import annotations

import argparse
import math

from discotop.bounds import c_constant, cov_upper, covering_lower_bound


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=9)
    ap.add_argument("--budget", type=int, default=2000)
    args = ap.parse_args()
    print(f"{'k':>3} {'c_1k / pi':>10} {'cover lb / pi':>14}")
    for k in range(1, args.k_max + 1):
        c = c_constant(1, k).exact
        lb = covering_lower_bound(1, k, budget=args.budget)
        print(f"{k:>3} {c / math.pi:10.6f} {lb / math.pi:14.6f}")
    print()
    print(f"{'n':>3} {'k':>3} {'cov upper':>10}")
    for n in (2, 3):
        for k in range(1, 7):
            print(f"{n:>3} {k:>3} {cov_upper(n, k, budget=args.budget):10.6f}")


if __name__ == "__main__":
    main()
