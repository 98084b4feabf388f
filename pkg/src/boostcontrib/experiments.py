"""Experiment protocols probing how contributions behave under data changes.

Three reusable runners, each returning an :class:`ExperimentReport`:

* correlation — re-train with an extra feature that is an affine copy of an
  existing one and compare how the pair shares the original's attribution;
* noise — re-train with increasing Gaussian noise injected into one
  training feature and watch its mean |contribution| on a fixed clean
  test set;
* outlier — append a fabricated extreme sample to the training set, fit
  deep trees, and check which feature the fake sample's prediction is
  attributed to.

Runners are pure with respect to the filesystem; ``write_report`` turns a
report into a tidy CSV plus a JSON metadata sidecar with deterministic
bytes (fixed row order, ``repr`` float formatting, sorted JSON keys).

Randomness bookkeeping: each seed's model uses generator streams
``[seed, 1..n_estimators]`` (see :mod:`boostcontrib.boosting`), so the
stream ``[seed, 0]`` is free for experiment-level draws — the correlated
feature's factor/offset and the per-level noise seeds come from there.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .boosting import Ensemble, GbdtParams, feature_importance, fit_gbdt
from .cart import CartParams
from .contrib import batch_explain, feature_contributions
from .data import (
    Dataset,
    add_correlated_feature,
    add_gaussian_noise,
    make_outlier,
    train_test_split,
)

DEFAULT_SEEDS = (0, 1, 2, 3, 4)
DEFAULT_NOISE_LEVELS = (0.0, 100.0, 200.0, 300.0, 400.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Model/split hyperparameters shared by the experiment protocols."""

    n_estimators: int = 10
    max_depth: int = 3
    learning_rate: float = 0.1
    min_samples_leaf: int = 1
    test_fraction: float = 0.1

    def gbdt_params(self, seed: int) -> GbdtParams:
        return GbdtParams(
            n_estimators=self.n_estimators,
            learning_rate=self.learning_rate,
            cart=CartParams(
                max_depth=self.max_depth,
                min_samples_leaf=self.min_samples_leaf,
            ),
            seed=seed,
        )


# Protocol defaults: ten shallow trees for the consistency studies (the
# outlier study instead wants trees deep enough to isolate single samples).
CORRELATION_CONFIG = ExperimentConfig()
NOISE_CONFIG = ExperimentConfig(max_depth=2)
OUTLIER_CONFIG = ExperimentConfig(max_depth=15)


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    metadata: dict


def dataset_fingerprint(ds: Dataset) -> str:
    """sha256 over feature names and raw array bytes; split/seed agnostic."""
    h = hashlib.sha256()
    h.update(",".join(ds.feature_names).encode("utf-8"))
    h.update(np.ascontiguousarray(ds.features).tobytes())
    h.update(np.ascontiguousarray(ds.target).tobytes())
    return h.hexdigest()


def _contribution_matrix(model: Ensemble, test: Dataset) -> np.ndarray:
    """(n_test, n_features) per-sample contributions, model feature order."""
    explanations = batch_explain(model, test)
    return np.array(
        [[e.contributions[name] for name in model.feature_names] for e in explanations],
        dtype=np.float64,
    )


def select_base_feature(ds: Dataset, config: ExperimentConfig, seed: int) -> str:
    """Most important feature of a model fitted on the seed's training split."""
    train, _ = train_test_split(ds, config.test_fraction, seed)
    model = fit_gbdt(train, config.gbdt_params(seed))
    return ds.feature_names[int(np.argmax(feature_importance(model)))]


def _mean_rows(prefix: tuple, names, matrix: np.ndarray) -> list[tuple]:
    return [
        (
            *prefix,
            name,
            float(matrix[:, j].mean()),
            float(np.abs(matrix[:, j]).mean()),
        )
        for j, name in enumerate(names)
    ]


def run_correlation_experiment(
    ds: Dataset,
    *,
    base_feature: str | None = None,
    seeds=DEFAULT_SEEDS,
    factor: float | None = None,
    offset: float | None = None,
    config: ExperimentConfig = CORRELATION_CONFIG,
) -> ExperimentReport:
    """Compare attributions before/after adding an affine copy of a feature.

    Per seed: draw factor ~ U[0.5, 2] and offset ~ U[-1, 1] (unless
    overridden), append ``factor * base + offset`` as a new column, fit one
    model on the original and one on the augmented training split, and
    average contributions over the shared test rows. The augmented model
    additionally gets a ``base+copy`` row holding the per-sample sum of the
    pair's contributions, which is the quantity comparable to the original
    model's base-feature row.
    """
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    if base_feature is None:
        base = select_base_feature(ds, config, seeds[0])
    else:
        base = base_feature
        ds.feature_index(base)
    new_name = f"{base}_corr"
    while new_name in ds.feature_names:
        new_name += "_"

    rows: list[tuple] = []
    runs_meta = []
    for seed in seeds:
        rng = np.random.default_rng([seed, 0])
        factor_draw = float(rng.uniform(0.5, 2.0))
        offset_draw = float(rng.uniform(-1.0, 1.0))
        f = factor_draw if factor is None else float(factor)
        o = offset_draw if offset is None else float(offset)
        augmented = add_correlated_feature(ds, base, f, o, new_name)

        # Same n and seed => identical row permutation, so both variants
        # share train/test rows.
        train_orig, test_orig = train_test_split(ds, config.test_fraction, seed)
        train_aug, test_aug = train_test_split(augmented, config.test_fraction, seed)
        model_orig = fit_gbdt(train_orig, config.gbdt_params(seed))
        model_aug = fit_gbdt(train_aug, config.gbdt_params(seed))
        mat_orig = _contribution_matrix(model_orig, test_orig)
        mat_aug = _contribution_matrix(model_aug, test_aug)

        rows.extend(_mean_rows((seed, "original"), ds.feature_names, mat_orig))
        rows.extend(_mean_rows((seed, "augmented"), augmented.feature_names, mat_aug))
        pair = (
            mat_aug[:, augmented.feature_index(base)]
            + mat_aug[:, augmented.feature_index(new_name)]
        )
        rows.append(
            (
                seed,
                "augmented",
                f"{base}+{new_name}",
                float(pair.mean()),
                float(np.abs(pair).mean()),
            )
        )
        runs_meta.append({"seed": seed, "factor": f, "offset": o})

    metadata = {
        "experiment": "correlation",
        "config": asdict(config),
        "dataset_sha256": dataset_fingerprint(ds),
        "base_feature": base,
        "correlated_feature": new_name,
        "runs": runs_meta,
    }
    return ExperimentReport(
        name="correlation",
        columns=("seed", "model", "feature", "mean_contribution", "mean_abs_contribution"),
        rows=tuple(rows),
        metadata=metadata,
    )


def run_noise_experiment(
    ds: Dataset,
    *,
    feature: str | None = None,
    levels=DEFAULT_NOISE_LEVELS,
    seed: int = 0,
    config: ExperimentConfig = NOISE_CONFIG,
) -> ExperimentReport:
    """Degrade one training feature with Gaussian noise and re-attribute.

    The split is made once; every level re-trains on the noised training
    set and explains the same clean test rows. Level 0 adds no noise and
    consumes no random draws, so its rows reproduce the baseline exactly.
    """
    levels = tuple(float(lv) for lv in levels)
    if not levels:
        raise ValueError("need at least one noise level")
    train, test = train_test_split(ds, config.test_fraction, seed)
    if feature is None:
        baseline = fit_gbdt(train, config.gbdt_params(seed))
        feature = ds.feature_names[int(np.argmax(feature_importance(baseline)))]
    else:
        ds.feature_index(feature)
    noise_seeds = np.random.default_rng([seed, 0]).integers(2**63, size=len(levels))

    rows: list[tuple] = []
    for level, noise_seed in zip(levels, noise_seeds):
        noised = add_gaussian_noise(train, feature, level, int(noise_seed))
        model = fit_gbdt(noised, config.gbdt_params(seed))
        matrix = _contribution_matrix(model, test)
        rows.extend(_mean_rows((seed, level), ds.feature_names, matrix))

    metadata = {
        "experiment": "noise",
        "config": asdict(config),
        "dataset_sha256": dataset_fingerprint(ds),
        "noised_feature": feature,
        "seed": seed,
        "levels": list(levels),
        "noise_seeds": [int(s) for s in noise_seeds],
    }
    return ExperimentReport(
        name="noise",
        columns=("seed", "level", "feature", "mean_contribution", "mean_abs_contribution"),
        rows=tuple(rows),
        metadata=metadata,
    )


def run_outlier_experiment(
    ds: Dataset,
    *,
    feature: str | None = None,
    seeds=DEFAULT_SEEDS,
    config: ExperimentConfig = OUTLIER_CONFIG,
) -> ExperimentReport:
    """Plant one extreme fake sample and see which feature gets the credit.

    Per seed: take the training split, fabricate a sample sitting at the
    feature means except for ``feature`` (pushed past its max), append it
    with an equally extreme target, fit deep trees, and explain the fake
    sample. ``manipulated_rank`` is the 1-based rank of the manipulated
    feature when features are sorted by |contribution| descending (ties
    share the better rank).
    """
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    feat = ds.feature_names[0] if feature is None else feature
    ds.feature_index(feat)

    rows: list[tuple] = []
    for seed in seeds:
        train, _ = train_test_split(ds, config.test_fraction, seed)
        sample = make_outlier(train, feat)
        poisoned = Dataset(
            np.vstack([train.features, sample.x_fake]),
            np.append(train.target, sample.y_fake),
            train.feature_names,
        )
        model = fit_gbdt(poisoned, config.gbdt_params(seed))
        expl = feature_contributions(model, sample.x_fake)
        magnitudes = np.array(
            [abs(expl.contributions[name]) for name in ds.feature_names]
        )
        rank = 1 + int(np.sum(magnitudes > abs(expl.contributions[feat])))
        rows.append(
            (
                seed,
                expl.bias,
                *(expl.contributions[name] for name in ds.feature_names),
                expl.prediction,
                sample.y_fake,
                feat,
                rank,
            )
        )

    metadata = {
        "experiment": "outlier",
        "config": asdict(config),
        "dataset_sha256": dataset_fingerprint(ds),
        "manipulated_feature": feat,
        "seeds": list(seeds),
    }
    return ExperimentReport(
        name="outlier",
        columns=(
            "seed",
            "bias",
            *ds.feature_names,
            "prediction",
            "y_fake",
            "manipulated_feature",
            "manipulated_rank",
        ),
        rows=tuple(rows),
        metadata=metadata,
    )


def format_cell(value) -> str:
    """Canonical CSV cell text: repr for floats (shortest exact form)."""
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans have no CSV representation here")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_report(report: ExperimentReport, out_dir) -> tuple[Path, Path]:
    """Write <name>.csv and <name>_metadata.json; returns both paths.

    Output bytes are a pure function of the report: fixed row order,
    ``\\n`` line endings, floats via ``repr``, JSON keys sorted.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{report.name}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([format_cell(v) for v in row])
    meta_path = out / f"{report.name}_metadata.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(report.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, meta_path
