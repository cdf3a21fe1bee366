"""Acceptance suite: one test per release criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s``.  Criteria 1 and 2 carry
most of the runtime (several minutes each: tuned encoder comparisons over ten
seeded datasets); everything is seeded, so each criterion is deterministic
and reproducible bit-for-bit.

Experiment protocol (frozen):

* Encoder comparisons (criteria 1-2) use 10,000-row tables with two
  quantile-binned categorical columns (10-20 bins) and a deep forest
  (12 trees, depth 24, min_leaf 1) so that per-row noise in train-time
  encodings is exploitable; hyperparameters for BOTH encoders are tuned by
  5-fold CV on a held-out tuning dataset (seed 1000), then frozen and
  evaluated on dataset seeds 0..9.  For the cluster data the class signal
  lives in the two categorical columns, mirroring the regime where encoder
  quality decides accuracy.
* The draw-count plateau (criterion 3) and prior-scale sweep (criterion 4)
  use the shallower default-quality forest (16 trees, depth 8) where the
  accuracy curve is flat and the sweeps stay cheap; results are paired
  (same folds, same forest seed) across sweep values.
* The importance-shift comparison (criterion 5) uses 500-row tables, where
  categories hold 25-50 rows and deterministic mean encoding visibly leaks.
"""

import subprocess
import sys
import time

import numpy as np

from sampling_encoder import (
    BetaParams,
    DirichletParams,
    NormalGammaParams,
    SamplingBayesianEncoder,
    TargetMeanEncoder,
)
from sampling_encoder import conjugate as cj
from sampling_encoder import rng
from sampling_encoder.data import GeneratorSpec, generate
from sampling_encoder.diagnostics import laplace_predict, mse_decompose
from sampling_encoder.learners import (
    RandomForestClassifier,
    cross_validate,
    importance_report,
    make_folds,
)

EVAL_SEEDS = range(10)
TUNE_SEED = 1000
CV_SEED = 424242
ENC_SEED = 5
FOREST_SEED = 77

DEEP_FOREST = dict(n_trees=12, max_depth=24, min_leaf=1, master_seed=FOREST_SEED)
SHALLOW_FOREST = dict(n_trees=16, max_depth=8, min_leaf=5, master_seed=FOREST_SEED)


def report(criterion: str, detail: str) -> None:
    print(f"[PASS] {criterion}: {detail}")


def _cv_mean(ds, encoder, forest_kw, folds=5, cv_seed=CV_SEED) -> float:
    forest = RandomForestClassifier(**forest_kw)
    return cross_validate(
        encoder, forest, ds.feature_matrix(), ds.target(), folds=folds, seed=cv_seed
    ).mean


def _tuned_comparison(make_dataset, sbe_k_grid, sigma_grid, forest_kw):
    """Tune both encoders on the tuning dataset, then evaluate ten seeds."""
    tune_ds = make_dataset(TUNE_SEED)
    k_scores = [
        _cv_mean(
            tune_ds,
            SamplingBayesianEncoder(task="binary", gamma=0.0, k_draws=k, master_seed=ENC_SEED),
            forest_kw,
        )
        for k in sbe_k_grid
    ]
    best_k = sbe_k_grid[int(np.argmax(k_scores))]
    s_scores = [
        _cv_mean(
            tune_ds,
            TargetMeanEncoder(sigma=s, leave_one_out=True, master_seed=ENC_SEED),
            forest_kw,
        )
        for s in sigma_grid
    ]
    best_sigma = sigma_grid[int(np.argmax(s_scores))]

    wins, diffs = 0, []
    for seed in EVAL_SEEDS:
        ds = make_dataset(seed)
        sbe = _cv_mean(
            ds,
            SamplingBayesianEncoder(task="binary", gamma=0.0, k_draws=best_k, master_seed=ENC_SEED),
            forest_kw,
        )
        loo = _cv_mean(
            ds,
            TargetMeanEncoder(sigma=best_sigma, leave_one_out=True, master_seed=ENC_SEED),
            forest_kw,
        )
        diffs.append(sbe - loo)
        wins += sbe > loo
    return best_k, best_sigma, wins, np.array(diffs)


class TestEncoderComparisons:
    def test_criterion_01_cluster_data_direction(self):
        """Tuned sampling encoder vs tuned leave-one-out baseline, clusters."""

        def make_dataset(seed):
            return generate(
                GeneratorSpec(
                    kind="classification_blobs", n_rows=10_000, n_features=10,
                    n_informative=2, n_categorical=2, class_sep=1.0, seed=seed,
                )
            )

        t0 = time.time()
        best_k, best_sigma, wins, diffs = _tuned_comparison(
            make_dataset, sbe_k_grid=[4, 8], sigma_grid=[0.05, 0.1, 0.2],
            forest_kw=DEEP_FOREST,
        )
        elapsed = time.time() - t0
        assert diffs.mean() >= -0.003
        assert wins >= 6
        assert elapsed < 900.0
        report(
            "criterion 1 (cluster-data encoder comparison)",
            f"tuned K={best_k} sigma={best_sigma}; wins {wins}/10, "
            f"mean diff {diffs.mean():+.4f}, {elapsed:.0f}s",
        )

    def test_criterion_02_quadratic_data_direction(self):
        """Same protocol on the quadratic-rule data."""

        def make_dataset(seed):
            return generate(
                GeneratorSpec(
                    kind="hastie_quadratic", n_rows=10_000, n_features=10,
                    n_categorical=2, seed=seed,
                )
            )

        t0 = time.time()
        best_k, best_sigma, wins, diffs = _tuned_comparison(
            make_dataset, sbe_k_grid=[4, 8], sigma_grid=[0.05, 0.1, 0.2, 0.3],
            forest_kw=DEEP_FOREST,
        )
        elapsed = time.time() - t0
        assert diffs.mean() >= -0.003
        assert wins >= 6
        report(
            "criterion 2 (quadratic-data encoder comparison)",
            f"tuned K={best_k} sigma={best_sigma}; wins {wins}/10, "
            f"mean diff {diffs.mean():+.4f}, {elapsed:.0f}s",
        )


class TestHyperparameterShapes:
    def test_criterion_03_draw_count_plateau(self):
        """Accuracy flattens after K=2; K=1 is never better than the plateau."""
        acc = {k: [] for k in (1, 2, 4, 8, 16)}
        for seed in (0, 1, 2):
            ds = generate(
                GeneratorSpec(
                    kind="classification_blobs", n_rows=10_000, n_features=10,
                    n_informative=5, n_categorical=2, seed=seed,
                )
            )
            for k in acc:
                enc = SamplingBayesianEncoder(
                    task="binary", gamma=0.0, k_draws=k, master_seed=ENC_SEED
                )
                acc[k].append(_cv_mean(ds, enc, SHALLOW_FOREST))
        means = {k: float(np.mean(v)) for k, v in acc.items()}
        assert abs(means[2] - means[16]) < 0.005
        assert means[1] <= means[16] + 0.005
        report(
            "criterion 3 (draw-count plateau)",
            f"acc by K {({k: round(v, 4) for k, v in means.items()})}; "
            f"|acc(2)-acc(16)|={abs(means[2]-means[16]):.4f}",
        )

    def test_criterion_04_prior_scale_insensitive_then_degrades(self):
        """Flat accuracy for gamma <= 1, clear degradation at gamma = 100."""
        gammas = [0.0, 0.01, 0.1, 0.5, 1.0, 10.0, 100.0]
        acc = {g: [] for g in gammas}
        for seed in range(5):
            ds = generate(
                GeneratorSpec(
                    kind="classification_blobs", n_rows=10_000, n_features=10,
                    n_informative=5, n_categorical=2,
                    bins_per_categorical=(10, 12), class_sep=1.2, seed=seed,
                )
            )
            for g in gammas:
                enc = SamplingBayesianEncoder(
                    task="binary", gamma=g, k_draws=4, master_seed=ENC_SEED
                )
                acc[g].append(_cv_mean(ds, enc, SHALLOW_FOREST, folds=3))
        means = {g: float(np.mean(v)) for g, v in acc.items()}
        low = [means[g] for g in gammas if g <= 1.0]
        assert max(low) - min(low) < 0.01
        assert means[0.0] - means[100.0] > 0.005
        report(
            "criterion 4 (prior-scale sweep)",
            f"range over gamma<=1 {max(low)-min(low):.4f}; "
            f"drop at gamma=100 {means[0.0]-means[100.0]:+.4f}",
        )

    def test_criterion_05_importance_shift(self):
        """Sampling encoding reduces the forest's categorical importance."""
        wins = 0
        shifts = []
        for seed in EVAL_SEEDS:
            ds = generate(
                GeneratorSpec(
                    kind="classification_blobs", n_rows=500, n_features=10,
                    n_informative=5, n_categorical=2, seed=seed,
                )
            )
            X, y, names = ds.feature_matrix(), ds.target(), ds.feature_names()
            sbe = SamplingBayesianEncoder(
                task="binary", gamma=0.0, k_draws=4, master_seed=ENC_SEED
            ).fit(X, y, feature_names=names)
            encoded = sbe.transform_augment(X, y)
            forest_s = RandomForestClassifier(**SHALLOW_FOREST).fit(encoded.features, encoded.y)
            rep_s = importance_report(forest_s, encoded.feature_names)
            baseline = TargetMeanEncoder(master_seed=ENC_SEED)
            F = baseline.fit_transform(X, y, feature_names=names)
            forest_b = RandomForestClassifier(**SHALLOW_FOREST).fit(F, y)
            rep_b = importance_report(forest_b, baseline.get_feature_names_out())
            cat_s = rep_s.grouped["x8"] + rep_s.grouped["x9"]
            cat_b = rep_b.grouped["x8"] + rep_b.grouped["x9"]
            wins += cat_s < cat_b
            shifts.append(cat_b - cat_s)
        assert wins >= 8
        report(
            "criterion 5 (importance shift)",
            f"categorical importance lower on {wins}/10 seeds, "
            f"mean shift {np.mean(shifts):+.4f}",
        )


class TestPropertyCriteria:
    def test_criterion_06_conjugate_update_oracles(self):
        """Hand-derived conjugate examples, exact to double precision."""
        s = cj.summarize_target([1, 1, 1, 1, 1, 1, 0, 0, 0, 0], "binary")
        assert cj.scaled_prior(s, 0.0) == BetaParams(1.0, 1.0)
        assert cj.scaled_prior(s, 0.5) == BetaParams(4.0, 3.0)
        sr = cj.summarize_target([1.0, 2.0, 3.0, 4.0], "regression")
        assert cj.scaled_prior(sr, 1.0) == NormalGammaParams(2.5, 0.0, 2.0, 2.5)
        assert cj.posterior_update(
            BetaParams(1, 1), cj.category_stats([1, 1, 1, 0, 0], "binary")
        ) == BetaParams(4.0, 3.0)
        assert cj.posterior_update(
            DirichletParams((1.0, 1.0, 1.0)), cj.CategoryStats(n=7, class_counts=(2, 0, 5))
        ) == DirichletParams((3.0, 1.0, 6.0))
        assert cj.posterior_update(
            NormalGammaParams(2.5, 0.0, 2.0, 2.5),
            cj.category_stats([10.0, 12.0], "regression"),
        ) == NormalGammaParams(11.0, 2.0, 3.0, 3.5)
        assert cj.posterior_mean(BetaParams(1, 1)) == 0.5
        assert abs(cj.posterior_mean(BetaParams(4, 3)) - 4.0 / 7.0) < 1e-12
        assert np.allclose(
            cj.posterior_mean(DirichletParams((3.0, 1.0, 6.0))), [0.3, 0.1, 0.6], rtol=1e-12
        )
        report("criterion 6 (conjugate oracles)", "all hand-derived updates exact")

    def test_criterion_07_sampler_moment_suite(self):
        """Moments within 4 CLT errors and the KS bound, over 20 seeds."""
        n = 100_000
        ks_n = 10_000
        critical = 1.9495 / np.sqrt(ks_n)
        from test_rng import beta25_cdf_oracle

        worst_ks = 0.0
        for seed in range(20):
            keys = rng.derive_key(seed, 0xACC, np.arange(n), 0)
            ctrs = np.zeros(n, dtype=np.uint64)
            b = rng.beta_draws(keys, ctrs, 2.0, 5.0)
            se = b.std() / np.sqrt(n)
            assert abs(b.mean() - 2.0 / 7.0) < 4 * se
            dev = (b - b.mean()) ** 2
            assert abs(b.var() - 10.0 / (49 * 8)) < 4 * dev.std() / np.sqrt(n)

            ctrs[:] = 0
            g = rng.gamma_draws(keys, ctrs, 3.0, rate=1.5)
            se = g.std() / np.sqrt(n)
            assert abs(g.mean() - 2.0) < 4 * se
            dev = (g - g.mean()) ** 2
            assert abs(g.var() - 3.0 / 2.25) < 4 * dev.std() / np.sqrt(n)

            keys_d = rng.derive_key(seed, 0xD1, np.arange(20_000), 0)
            ctrs_d = np.zeros(20_000, dtype=np.uint64)
            pi = rng.dirichlet_draws(keys_d, ctrs_d, np.broadcast_to([2.0, 3.0, 5.0], (20_000, 3)))
            expect = np.array([0.2, 0.3, 0.5])
            se = pi.std(axis=0) / np.sqrt(20_000)
            assert np.all(np.abs(pi.mean(axis=0) - expect) < 4 * se)

            ks_keys = rng.derive_key(seed, 0x6A, np.arange(ks_n), 1)
            ks_ctrs = np.zeros(ks_n, dtype=np.uint64)
            sample = np.sort(rng.beta_draws(ks_keys, ks_ctrs, 2.0, 5.0))
            cdf = beta25_cdf_oracle(sample)
            i = np.arange(1, ks_n + 1)
            d = max(np.abs(i / ks_n - cdf).max(), np.abs((i - 1) / ks_n - cdf).max())
            worst_ks = max(worst_ks, d)
            assert d < critical
        report(
            "criterion 7 (sampler moments)",
            f"20 seeds clean; worst KS {worst_ks:.4f} < {critical:.4f}",
        )

    def test_criterion_08_augmentation_invariant_fuzz(self):
        """|output| = K*N with correct origin multiset, 100 random shapes."""
        rand = np.random.default_rng(12345)
        for trial in range(100):
            n = int(rand.integers(1, 201))
            k = int(rand.integers(1, 11))
            cats = rand.choice([f"v{i}" for i in range(6)], size=n)
            X = cats.reshape(-1, 1).astype(object)
            y = (rand.random(n) < 0.5).astype(float)
            enc = SamplingBayesianEncoder(
                task="binary", k_draws=k, master_seed=trial
            ).fit(X, y)
            out = enc.transform_augment(X, y)
            assert out.features.shape[0] == k * n
            assert np.array_equal(np.bincount(out.origin_row, minlength=n), np.full(n, k))
            assert np.array_equal(np.bincount(out.draw_index, minlength=k), np.full(k, n))
        report("criterion 8 (augmentation invariant)", "100 fuzzed shapes exact")

    def test_criterion_09_loss_decomposition_identity(self):
        """Residual below 1% of MSE at 1e4 draws and shrinking from 1e2."""
        rand = np.random.default_rng(20260808)
        n_cats, rows_per = 120, 5
        effects = rand.normal(scale=2.0, size=n_cats)
        cats = np.repeat([f"c{i}" for i in range(n_cats)], rows_per)
        y = np.repeat(effects, rows_per) + rand.normal(size=n_cats * rows_per)
        X = cats.reshape(-1, 1).astype(object)

        decreases = 0
        for seed in range(5):
            enc = SamplingBayesianEncoder(
                task="regression", gamma=0.0, master_seed=seed
            ).fit(X, y)
            low = mse_decompose(lambda F: F[:, 0], enc, X, y, draws=100, seed=seed)
            high = mse_decompose(lambda F: F[:, 0], enc, X, y, draws=10_000, seed=seed)
            assert high.reg >= 0.0 and high.mse0 >= 0.0
            assert abs(high.residual) < 0.01 * high.mse_total
            decreases += abs(high.residual) < abs(low.residual)
        assert decreases == 5
        report(
            "criterion 9 (loss decomposition)",
            "residual < 1% of MSE at 1e4 draws; decreased on 5/5 paired seeds",
        )

    def test_criterion_10_laplace_exactness(self):
        """Quadratic-model correction matches closed form and Monte Carlo."""
        params = NormalGammaParams(1.0, 20_000.0, 10_000.0, 8_000.0)
        A = np.array([[0.3, 0.1], [0.1, 0.2]])
        est = laplace_predict(lambda t: float(t @ A @ t), params)
        closed = float(est.theta_hat @ A @ est.theta_hat + np.trace(A @ est.covariance))
        assert abs(est.corrected_prediction - closed) < 1e-10

        oracle = np.random.default_rng(31)
        draws = oracle.multivariate_normal(est.theta_hat, est.covariance, size=1_000_000)
        vals = np.einsum("ni,ij,nj->n", draws, A, draws)
        assert abs(est.corrected_prediction - vals.mean()) < 4 * vals.std() / 1000.0

        beta = BetaParams(50.0, 150.0)
        est_b = laplace_predict(lambda t: t[0] ** 2, beta)
        var = 50.0 * 150.0 / (200.0**2 * 201.0)
        assert abs(est_b.corrected_prediction - (0.25**2 + var)) < 1e-4
        report(
            "criterion 10 (Laplace exactness)",
            f"quadratic gap {abs(est.corrected_prediction - closed):.2e}; "
            f"p^2 case within 1e-4",
        )


class TestReproducibilityCriteria:
    def test_criterion_11_byte_identical_outputs_across_threads(self, tmp_path):
        """CLI outputs identical for repeated runs with 1 and 8 threads."""
        data = tmp_path / "data.csv"
        cmd = [sys.executable, "-m", "sampling_encoder.cli"]
        subprocess.run(
            cmd + ["gen-data", "--rows", "400", "--features", "6", "--informative", "3",
                   "--categorical", "2", "--seed", "11", "--out", str(data)],
            check=True,
        )
        outputs = []
        for name, threads in [("a.csv", "1"), ("b.csv", "1"), ("c.csv", "8")]:
            out = tmp_path / name
            subprocess.run(
                cmd + ["evaluate", "--data", str(data), "--folds", "3", "--k-draws", "3",
                       "--n-trees", "4", "--seed", "9", "--threads", threads,
                       "--out", str(out)],
                check=True,
            )
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

        enc_outputs = []
        model = tmp_path / "model.json"
        subprocess.run(
            cmd + ["fit", "--data", str(data), "--k-draws", "3", "--seed", "9",
                   "--out", str(model)],
            check=True,
        )
        for name, threads in [("t1.csv", "1"), ("t8.csv", "8")]:
            out = tmp_path / name
            subprocess.run(
                cmd + ["transform", "--data", str(data), "--model", str(model),
                       "--threads", threads, "--out", str(out)],
                check=True,
            )
            enc_outputs.append(out.read_bytes())
        assert enc_outputs[0] == enc_outputs[1]
        report("criterion 11 (determinism)", "evaluate and transform byte-identical, 1 vs 8 threads")

    def test_criterion_12_leakage_canary(self):
        """Poisoning held-out targets leaves fold encoder models byte-identical."""
        ds = generate(
            GeneratorSpec(
                kind="classification_blobs", n_rows=600, n_features=6,
                n_informative=3, n_categorical=2, seed=21,
            )
        )
        X, y = ds.feature_matrix(), ds.target()
        folds = make_folds(y, 5, seed=3, stratify=True)
        enc = SamplingBayesianEncoder(task="binary", k_draws=2, master_seed=4)
        forest = RandomForestClassifier(n_trees=4, max_depth=4, master_seed=6)
        clean = cross_validate(enc, forest, X, y, folds=folds, collect_models=True)
        for poisoned_fold in range(5):
            y_bad = y.copy()
            test_idx = folds[poisoned_fold][1]
            y_bad[test_idx] = 1.0 - y_bad[test_idx]
            dirty = cross_validate(enc, forest, X, y_bad, folds=folds, collect_models=True)
            assert (
                clean.encoder_documents[poisoned_fold]
                == dirty.encoder_documents[poisoned_fold]
            )
        report("criterion 12 (leakage canary)", "all 5 fold models byte-identical under poisoning")
