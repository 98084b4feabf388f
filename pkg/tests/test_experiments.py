import csv
import json

import numpy as np
import pytest

from boostcontrib import (
    add_correlated_feature,
    batch_explain,
    feature_importance,
    fit_gbdt,
    make_outlier,
    train_test_split,
)
from boostcontrib.experiments import (
    ExperimentConfig,
    dataset_fingerprint,
    format_cell,
    run_correlation_experiment,
    run_noise_experiment,
    run_outlier_experiment,
    write_report,
)
from conftest import build_synthetic

CFG = ExperimentConfig(n_estimators=5, max_depth=2)


@pytest.fixture(scope="module")
def small():
    return build_synthetic(n=120, d=4, seed=2)


def contribution_means(model, test):
    mats = batch_explain(model, test)
    out = {}
    for name in model.feature_names:
        vals = np.array([e.contributions[name] for e in mats])
        out[name] = (float(vals.mean()), float(np.abs(vals).mean()))
    return out


class TestCorrelation:
    def test_report_shape_and_metadata(self, small):
        report = run_correlation_experiment(small, seeds=(0, 1), config=CFG)
        assert report.name == "correlation"
        assert report.columns == (
            "seed", "model", "feature", "mean_contribution", "mean_abs_contribution",
        )
        # per seed: 4 original rows + 5 augmented rows + 1 pair-sum row
        assert len(report.rows) == 2 * (4 + 5 + 1)
        meta = report.metadata
        assert meta["base_feature"] == "x0"  # dominant by construction
        assert meta["correlated_feature"] == "x0_corr"
        assert meta["dataset_sha256"] == dataset_fingerprint(small)
        for run in meta["runs"]:
            assert 0.5 <= run["factor"] <= 2.0
            assert -1.0 <= run["offset"] <= 1.0

    def test_auto_base_is_argmax_importance(self, small):
        report = run_correlation_experiment(small, seeds=(3,), config=CFG)
        train, _ = train_test_split(small, CFG.test_fraction, 3)
        model = fit_gbdt(train, CFG.gbdt_params(3))
        best = small.feature_names[int(np.argmax(feature_importance(model)))]
        assert report.metadata["base_feature"] == best

    def test_explicit_base_feature(self, small):
        report = run_correlation_experiment(small, base_feature="x2", seeds=(0,), config=CFG)
        assert report.metadata["base_feature"] == "x2"
        assert report.metadata["correlated_feature"] == "x2_corr"

    def test_forced_duplicate_preserves_pair_sum_per_sample(self, small):
        # factor=1, offset=0 adds a byte-identical column; the pair's summed
        # contribution must match the original model sample by sample
        seed = 1
        augmented = add_correlated_feature(small, "x0", 1.0, 0.0, "x0_corr")
        train_o, test_o = train_test_split(small, CFG.test_fraction, seed)
        train_a, test_a = train_test_split(augmented, CFG.test_fraction, seed)
        model_o = fit_gbdt(train_o, CFG.gbdt_params(seed))
        model_a = fit_gbdt(train_a, CFG.gbdt_params(seed))
        explained_o = batch_explain(model_o, test_o)
        explained_a = batch_explain(model_a, test_a)
        for eo, ea in zip(explained_o, explained_a):
            pair = ea.contributions["x0"] + ea.contributions["x0_corr"]
            assert pair == pytest.approx(eo.contributions["x0"], abs=1e-8)
            assert ea.prediction == pytest.approx(eo.prediction, abs=1e-8)

    def test_pair_sum_row_matches_recomputation(self, small):
        seed = 0
        report = run_correlation_experiment(
            small, seeds=(seed,), factor=1.0, offset=0.0, config=CFG
        )
        pair_rows = [r for r in report.rows if r[2] == "x0+x0_corr"]
        assert len(pair_rows) == 1
        augmented = add_correlated_feature(small, "x0", 1.0, 0.0, "x0_corr")
        train_a, test_a = train_test_split(augmented, CFG.test_fraction, seed)
        model_a = fit_gbdt(train_a, CFG.gbdt_params(seed))
        sums = np.array(
            [
                e.contributions["x0"] + e.contributions["x0_corr"]
                for e in batch_explain(model_a, test_a)
            ]
        )
        assert pair_rows[0][3] == float(sums.mean())
        assert pair_rows[0][4] == float(np.abs(sums).mean())

    def test_overrides_recorded_in_metadata(self, small):
        report = run_correlation_experiment(
            small, seeds=(0, 1), factor=1.0, offset=0.0, config=CFG
        )
        assert all(r["factor"] == 1.0 and r["offset"] == 0.0 for r in report.metadata["runs"])

    def test_deterministic(self, small):
        a = run_correlation_experiment(small, seeds=(0, 1), config=CFG)
        b = run_correlation_experiment(small, seeds=(0, 1), config=CFG)
        assert a.rows == b.rows
        assert a.metadata == b.metadata


class TestNoise:
    def test_level_zero_equals_baseline_exactly(self, small):
        report = run_noise_experiment(
            small, feature="x0", levels=(0.0, 100.0), seed=3, config=CFG
        )
        train, test = train_test_split(small, CFG.test_fraction, 3)
        baseline = contribution_means(fit_gbdt(train, CFG.gbdt_params(3)), test)
        zero_rows = {r[2]: (r[3], r[4]) for r in report.rows if r[1] == 0.0}
        assert zero_rows == baseline

    def test_every_feature_has_a_row_per_level(self, small):
        levels = (0.0, 50.0, 100.0)
        report = run_noise_experiment(small, levels=levels, seed=0, config=CFG)
        assert len(report.rows) == len(levels) * small.n_features
        for level in levels:
            features = [r[2] for r in report.rows if r[1] == level]
            assert features == list(small.feature_names)

    def test_auto_picks_most_important(self, small):
        report = run_noise_experiment(small, seed=0, levels=(0.0,), config=CFG)
        assert report.metadata["noised_feature"] == "x0"

    def test_explicit_feature(self, small):
        report = run_noise_experiment(small, feature="x3", seed=0, levels=(0.0,), config=CFG)
        assert report.metadata["noised_feature"] == "x3"

    def test_noise_seeds_recorded(self, small):
        report = run_noise_experiment(small, levels=(0.0, 100.0), seed=5, config=CFG)
        assert len(report.metadata["noise_seeds"]) == 2
        expected = np.random.default_rng([5, 0]).integers(2**63, size=2)
        assert report.metadata["noise_seeds"] == [int(s) for s in expected]

    def test_deterministic(self, small):
        a = run_noise_experiment(small, seed=1, config=CFG)
        b = run_noise_experiment(small, seed=1, config=CFG)
        assert a.rows == b.rows


class TestOutlier:
    def test_one_row_per_seed_with_rank(self, small):
        report = run_outlier_experiment(small, seeds=(0, 1, 2), config=CFG)
        assert len(report.rows) == 3
        assert report.columns == (
            "seed", "bias", "x0", "x1", "x2", "x3",
            "prediction", "y_fake", "manipulated_feature", "manipulated_rank",
        )
        for row in report.rows:
            assert row[8] == "x0"  # defaults to the first feature
            contribs = dict(zip(("x0", "x1", "x2", "x3"), row[2:6]))
            better = sum(
                1 for v in contribs.values() if abs(v) > abs(contribs["x0"])
            )
            assert row[9] == 1 + better

    def test_row_is_additive(self, small):
        report = run_outlier_experiment(small, seeds=(0,), config=CFG)
        row = report.rows[0]
        bias, contribs, prediction = row[1], row[2:6], row[6]
        assert bias + sum(contribs) == pytest.approx(prediction, rel=1e-12, abs=1e-12)

    def test_y_fake_matches_the_training_split(self, small):
        report = run_outlier_experiment(small, seeds=(4,), config=CFG)
        train, _ = train_test_split(small, CFG.test_fraction, 4)
        assert report.rows[0][7] == make_outlier(train, "x0").y_fake

    def test_explicit_feature(self, small):
        report = run_outlier_experiment(small, feature="x2", seeds=(0,), config=CFG)
        assert report.rows[0][8] == "x2"
        assert report.metadata["manipulated_feature"] == "x2"


class TestWriteReport:
    def test_files_and_byte_determinism(self, small, tmp_path):
        report = run_noise_experiment(small, levels=(0.0, 100.0), seed=0, config=CFG)
        c1, m1 = write_report(report, tmp_path / "a")
        c2, m2 = write_report(report, tmp_path / "b")
        assert c1.name == "noise.csv" and m1.name == "noise_metadata.json"
        assert c1.read_bytes() == c2.read_bytes()
        assert m1.read_bytes() == m2.read_bytes()

    def test_csv_floats_round_trip(self, small, tmp_path):
        report = run_outlier_experiment(small, seeds=(0,), config=CFG)
        csv_path, _ = write_report(report, tmp_path)
        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == list(report.columns)
        parsed_bias = float(rows[1][1])
        assert parsed_bias == report.rows[0][1]

    def test_metadata_is_sorted_json(self, small, tmp_path):
        report = run_noise_experiment(small, levels=(0.0,), seed=0, config=CFG)
        _, meta_path = write_report(report, tmp_path)
        text = meta_path.read_text()
        assert json.loads(text)["experiment"] == "noise"
        assert text == json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n"

    def test_format_cell(self):
        assert format_cell(5) == "5"
        assert format_cell(np.int64(5)) == "5"
        assert format_cell(0.1) == "0.1"
        assert format_cell(np.float64(2.5)) == "2.5"
        assert format_cell("x0") == "x0"
        with pytest.raises(TypeError):
            format_cell(True)


class TestInputsUntouched:
    def test_runners_do_not_mutate_the_dataset(self, small):
        before = small.features.copy()
        run_correlation_experiment(small, seeds=(0,), config=CFG)
        run_noise_experiment(small, levels=(0.0, 100.0), seed=0, config=CFG)
        run_outlier_experiment(small, seeds=(0,), config=CFG)
        assert np.array_equal(small.features, before)
