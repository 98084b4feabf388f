#!/usr/bin/env python3
"""Run the noise-degradation study: inject Gaussian noise into one training
feature at increasing levels and track its mean |contribution| on a fixed
clean test set."""

import argparse

from boostcontrib import load_csv, run_noise_experiment, write_report
from boostcontrib.experiments import DEFAULT_NOISE_LEVELS, ExperimentConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", required=True)
    ap.add_argument("--target", required=True)
    ap.add_argument("--feature", help="default: most important feature")
    ap.add_argument(
        "--levels",
        type=float,
        nargs="+",
        default=list(DEFAULT_NOISE_LEVELS),
        help="noise variances as percent of the feature's variance",
    )
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-estimators", type=int, default=10)
    ap.add_argument("--max-depth", type=int, default=2)
    ap.add_argument("--out-dir", default="results/noise")
    args = ap.parse_args()

    ds = load_csv(args.data, args.target)
    report = run_noise_experiment(
        ds,
        feature=args.feature,
        levels=args.levels,
        seed=args.seed,
        config=ExperimentConfig(
            n_estimators=args.n_estimators, max_depth=args.max_depth
        ),
    )
    for path in write_report(report, args.out_dir):
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
