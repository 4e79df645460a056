"""Run every named experiment once and write the reports to a directory.

    python scripts/run_all_experiments.py --out results/ --seed 7
"""

from __future__ import annotations

import argparse
from pathlib import Path

from discotop.cli import ExperimentConfig, emit_report, run_experiment

PLAN = [
    ("constants", {"n": 1, "k_max": 9}),
    ("sphere-homology", {"d": 1}),
    ("sphere-homology", {"d": 2}),
    ("vr-ladder", {"ngon": 6}),
    ("tverberg", {"r": 2, "d": 1}),
    ("vkf", {"d": 1}),
    ("lemma-suite", {}),
    ("estimate", {"kind": "digit-interleave", "bits": 8}),
    ("estimate", {"kind": "monotone-step"}),
    ("estimate", {"kind": "nonmonotone-step"}),
    ("estimate", {"kind": "equatorial-odd", "k": 2, "n": 1}),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, (name, params) in enumerate(PLAN):
        rep = run_experiment(ExperimentConfig(name, dict(params), seed=args.seed))
        tag = "-".join([name, *(f"{k}{v}" for k, v in params.items())])
        (out / f"{i:02d}_{tag}.json").write_bytes(emit_report(rep))
        status = "ok  " if rep.passed else "FAIL"
        print(f"{status} {tag:45s} {rep.timing['wall_seconds']:7.2f}s")


if __name__ == "__main__":
    main()
