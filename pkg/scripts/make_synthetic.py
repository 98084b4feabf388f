#!/usr/bin/env python3
"""Generate a synthetic regression CSV for trying out the CLI and experiments.

The first feature gets a deliberately dominant weight so that 'auto'
feature selection in the experiments has an unambiguous target.
"""

import argparse
import csv

import numpy as np


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=500)
    ap.add_argument("--features", type=int, default=8)
    ap.add_argument("--noise", type=float, default=0.5, help="target noise std")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="synthetic.csv")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    X = rng.normal(size=(args.rows, args.features))
    w = rng.uniform(0.2, 1.0, size=args.features)
    w[0] = 5.0
    y = X @ w + args.noise * rng.normal(size=args.rows)

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j}" for j in range(args.features)] + ["y"])
        for i in range(args.rows):
            writer.writerow([repr(float(v)) for v in X[i]] + [repr(float(y[i]))])
    print(f"wrote {args.out} ({args.rows} rows, {args.features} features + target)")


if __name__ == "__main__":
    main()
