#!/usr/bin/env python3
"""Run the correlated-feature study: add an affine copy of a feature,
re-train, and compare how the copy pair shares the original attribution."""

import argparse

from boostcontrib import load_csv, run_correlation_experiment, write_report
from boostcontrib.experiments import DEFAULT_SEEDS, ExperimentConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", required=True)
    ap.add_argument("--target", required=True)
    ap.add_argument("--base-feature", help="default: most important feature")
    ap.add_argument("--seeds", type=int, nargs="+", default=list(DEFAULT_SEEDS))
    ap.add_argument("--factor", type=float, help="fix the copy's factor")
    ap.add_argument("--offset", type=float, help="fix the copy's offset")
    ap.add_argument("--n-estimators", type=int, default=10)
    ap.add_argument("--max-depth", type=int, default=3)
    ap.add_argument("--out-dir", default="results/correlation")
    args = ap.parse_args()

    ds = load_csv(args.data, args.target)
    report = run_correlation_experiment(
        ds,
        base_feature=args.base_feature,
        seeds=args.seeds,
        factor=args.factor,
        offset=args.offset,
        config=ExperimentConfig(
            n_estimators=args.n_estimators, max_depth=args.max_depth
        ),
    )
    for path in write_report(report, args.out_dir):
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
