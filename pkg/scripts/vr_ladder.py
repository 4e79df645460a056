"""Betti numbers of Vietoris-Rips complexes of regular n-gons over a ladder of thresholds.

Thresholds are the multiples 2*pi*j/n, where the weak and strict complexes differ.
"""

from __future__ import annotations

import argparse

from discotop.homology import betti_numbers
from discotop.vietoris_rips import VRThreshold, ngon_sample, pi_fraction, vr_complex


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ngons", default="4,5,6,7,8")
    ap.add_argument("--max-dim", type=int, default=4)
    args = ap.parse_args()
    for n in (int(v) for v in args.ngons.split(",")):
        M = ngon_sample(n)
        for j in range(1, n // 2 + 1):
            t = pi_fraction(2 * j, n)
            weak = betti_numbers(vr_complex(M, VRThreshold(t, "weak"), args.max_dim))
            strict = betti_numbers(vr_complex(M, VRThreshold(t, "strict"), args.max_dim))
            print(f"n={n} t=2pi*{j}/{n}  weak={weak}  strict={strict}")


if __name__ == "__main__":
    main()
