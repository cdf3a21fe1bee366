"""Hand-derived conjugate update examples and exact update properties."""

import numpy as np
import pytest

from sampling_encoder import conjugate as cj


class TestScaledPrior:
    def test_binary_gamma_zero_is_uninformative(self):
        s = cj.summarize_target([1, 1, 1, 1, 1, 1, 0, 0, 0, 0], "binary")
        assert cj.scaled_prior(s, 0.0) == cj.BetaParams(1.0, 1.0)

    def test_binary_gamma_half(self):
        # N=10, sum y = 6: alpha = 1 + 0.5*6, beta = 1 + 0.5*4
        s = cj.summarize_target([1, 1, 1, 1, 1, 1, 0, 0, 0, 0], "binary")
        assert cj.scaled_prior(s, 0.5) == cj.BetaParams(4.0, 3.0)

    def test_regression_prior(self):
        # y = [1,2,3,4]: ybar = 2.5, sum sq dev = 5
        s = cj.summarize_target([1.0, 2.0, 3.0, 4.0], "regression")
        prior = cj.scaled_prior(s, 1.0)
        assert prior == cj.NormalGammaParams(mu0=2.5, nu=0.0, alpha=2.0, beta=2.5)

    def test_multiclass_prior(self):
        s = cj.summarize_target(list("aabbbc"), "multiclass")
        assert cj.scaled_prior(s, 1.0) == cj.DirichletParams((3.0, 4.0, 2.0))
        assert cj.scaled_prior(s, 0.0) == cj.DirichletParams((1.0, 1.0, 1.0))

    def test_regression_gamma_zero_is_uninformative(self):
        s = cj.summarize_target([5.0, 7.0], "regression")
        prior = cj.scaled_prior(s, 0.0)
        assert prior.nu == prior.alpha == prior.beta == 0.0
        assert prior.mu0 == 6.0
        assert not prior.is_proper

    def test_negative_gamma_rejected(self):
        s = cj.summarize_target([1, 0], "binary")
        with pytest.raises(ValueError):
            cj.scaled_prior(s, -0.1)


class TestPosteriorUpdate:
    def test_beta_hand_count(self):
        stats = cj.category_stats([1, 1, 1, 0, 0], "binary")
        assert cj.posterior_update(cj.BetaParams(1, 1), stats) == cj.BetaParams(4.0, 3.0)

    def test_dirichlet_hand_count(self):
        stats = cj.CategoryStats(n=7, class_counts=(2, 0, 5))
        post = cj.posterior_update(cj.DirichletParams((1.0, 1.0, 1.0)), stats)
        assert post == cj.DirichletParams((3.0, 1.0, 6.0))

    def test_normal_gamma_cross_term_vanishes_for_nu_zero(self):
        # prior NG(2.5, 0, 2, 2.5), category y = [10, 12]:
        # ybar = 11, ssd = 2, cross term 0 because nu = 0
        prior = cj.NormalGammaParams(2.5, 0.0, 2.0, 2.5)
        stats = cj.category_stats([10.0, 12.0], "regression")
        post = cj.posterior_update(prior, stats)
        assert post == cj.NormalGammaParams(11.0, 2.0, 3.0, 3.5)

    def test_normal_gamma_cross_term(self):
        # nu > 0 engages the (nu n / (nu + n)) (ybar - mu0)^2 / 2 term
        prior = cj.NormalGammaParams(0.0, 2.0, 1.0, 1.0)
        stats = cj.category_stats([4.0, 4.0], "regression")
        post = cj.posterior_update(prior, stats)
        assert post.nu == 4.0
        assert post.alpha == 2.0
        assert post.mu0 == pytest.approx(2.0)
        # beta = 1 + 0 + (2*2/4) * 16/2 = 9
        assert post.beta == pytest.approx(9.0)

    def test_degenerate_beta_gets_floored(self):
        prior = cj.NormalGammaParams(5.0, 0.0, 0.0, 0.0)
        stats = cj.category_stats([3.0, 3.0, 3.0], "regression")
        post = cj.posterior_update(prior, stats)
        assert post.beta == 1e-9
        assert post.is_proper

    def test_mismatched_variant_rejected(self):
        with pytest.raises(ValueError):
            cj.posterior_update(cj.BetaParams(1, 1), cj.CategoryStats(n=1, mean=0.0, sum_sq_dev=0.0))
        with pytest.raises(ValueError):
            cj.posterior_update(
                cj.DirichletParams((1.0, 1.0)), cj.CategoryStats(n=1, class_counts=(1, 0, 0))
            )


class TestPosteriorMean:
    def test_beta_means(self):
        assert cj.posterior_mean(cj.BetaParams(1, 1)) == 0.5
        assert cj.posterior_mean(cj.BetaParams(4, 3)) == pytest.approx(4.0 / 7.0)

    def test_dirichlet_mean(self):
        m = cj.posterior_mean(cj.DirichletParams((3.0, 1.0, 6.0)))
        assert np.allclose(m, [0.3, 0.1, 0.6])

    def test_normal_gamma_mean(self):
        mu, tau = cj.posterior_mean(cj.NormalGammaParams(11.0, 2.0, 3.0, 3.5))
        assert mu == 11.0
        assert tau == pytest.approx(3.0 / 3.5)

    def test_improper_rejected(self):
        with pytest.raises(cj.ImproperDistributionError):
            cj.posterior_mean(cj.NormalGammaParams(0.0, 0.0, 0.0, 0.0))


class TestUpdateProperties:
    """Exact structural properties of the update rules."""

    def test_additive_in_sufficient_statistics(self):
        # updating with A then B equals updating with A union B
        rand = np.random.default_rng(7)
        for trial in range(20):
            ya = (rand.random(rand.integers(1, 30)) < 0.6).astype(float)
            yb = (rand.random(rand.integers(1, 30)) < 0.3).astype(float)
            prior = cj.BetaParams(2.0, 5.0)
            seq = cj.posterior_update(
                cj.posterior_update(prior, cj.category_stats(ya, "binary")),
                cj.category_stats(yb, "binary"),
            )
            joint = cj.posterior_update(
                prior, cj.category_stats(np.concatenate([ya, yb]), "binary")
            )
            assert seq == joint

    def test_additive_regression_within_float_tolerance(self):
        rand = np.random.default_rng(11)
        for trial in range(20):
            ya = rand.normal(size=rand.integers(2, 25))
            yb = rand.normal(loc=1.0, size=rand.integers(2, 25))
            prior = cj.NormalGammaParams(0.3, 1.5, 2.0, 1.2)
            seq = cj.posterior_update(
                cj.posterior_update(prior, cj.category_stats(ya, "regression")),
                cj.category_stats(yb, "regression"),
            )
            joint = cj.posterior_update(
                prior, cj.category_stats(np.concatenate([ya, yb]), "regression")
            )
            assert seq.nu == joint.nu and seq.alpha == joint.alpha
            assert seq.mu0 == pytest.approx(joint.mu0, rel=1e-9)
            assert seq.beta == pytest.approx(joint.beta, rel=1e-9)

    def test_binary_posterior_mean_is_convex_combination(self):
        rand = np.random.default_rng(3)
        for trial in range(50):
            prior = cj.BetaParams(1.0 + 10 * rand.random(), 1.0 + 10 * rand.random())
            n = int(rand.integers(1, 50))
            s = int(rand.integers(0, n + 1))
            stats = cj.CategoryStats(n=n, sum_y=float(s))
            post_mean = cj.posterior_mean(cj.posterior_update(prior, stats))
            prior_mean = cj.posterior_mean(prior)
            rate = s / n
            if rate != prior_mean:
                lo, hi = min(prior_mean, rate), max(prior_mean, rate)
                assert lo < post_mean < hi

    def test_nu_zero_prior_recovers_category_mean_exactly(self):
        prior = cj.NormalGammaParams(123.0, 0.0, 0.0, 0.0)
        stats = cj.category_stats([3.5, -1.25, 7.75], "regression")
        post = cj.posterior_update(prior, stats)
        assert post.mu0 == stats.mean

    def test_gamma_pulls_posterior_mean_toward_global_rate(self):
        y = np.array([1] * 70 + [0] * 30, dtype=float)  # global rate 0.7
        summary = cj.summarize_target(y, "binary")
        stats = cj.CategoryStats(n=10, sum_y=2.0)  # category rate 0.2
        means = []
        for g in [0.0, 0.1, 0.5, 1.0, 5.0, 50.0]:
            post = cj.posterior_update(cj.scaled_prior(summary, g), stats)
            means.append(cj.posterior_mean(post))
        assert all(b > a for a, b in zip(means, means[1:]))  # monotone toward 0.7
        assert means[-1] < 0.7


class TestValidation:
    def test_positivity_enforced(self):
        with pytest.raises(ValueError):
            cj.BetaParams(0.0, 1.0)
        with pytest.raises(ValueError):
            cj.DirichletParams((1.0, 0.0))
        with pytest.raises(ValueError):
            cj.NormalGammaParams(0.0, -1.0, 0.0, 0.0)

    def test_summary_consistency(self):
        with pytest.raises(ValueError):
            cj.TargetSummary(task="multiclass", n=3, class_counts=(1, 1, 3))
        with pytest.raises(ValueError):
            cj.summarize_target([0.5, 1.0], "binary")

    def test_class_order_is_first_appearance(self):
        assert cj.infer_class_order(["b", "a", "b", "c"]) == ["b", "a", "c"]


class TestPosteriorCovariance:
    def test_beta_variance(self):
        cov = cj.posterior_covariance(cj.BetaParams(50.0, 150.0))
        expect = 50 * 150 / (200.0**2 * 201.0)
        assert cov.shape == (1, 1)
        assert cov[0, 0] == pytest.approx(expect)

    def test_normal_gamma_diagonal(self):
        cov = cj.posterior_covariance(cj.NormalGammaParams(1.0, 50.0, 25.0, 20.0))
        assert cov[0, 0] == pytest.approx(20.0 / (50.0 * 24.0))
        assert cov[1, 1] == pytest.approx(25.0 / 400.0)
        assert cov[0, 1] == 0.0

    def test_dirichlet_covariance_rows_sum_to_zero(self):
        cov = cj.posterior_covariance(cj.DirichletParams((3.0, 1.0, 6.0)))
        assert np.allclose(cov.sum(axis=1), 0.0)
        assert np.allclose(cov, cov.T)

    def test_alpha_below_one_rejected(self):
        with pytest.raises(cj.ImproperDistributionError):
            cj.posterior_covariance(cj.NormalGammaParams(0.0, 1.0, 0.5, 1.0))
