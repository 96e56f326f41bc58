import numpy as np
import pytest
from scipy import integrate, stats

from synlik.errors import (DegenerateSample, OutOfSupport, SingularCovariance)
from synlik.models import (boombust_model, ma2_model, mg1_model, stereo_model,
                           toads_model)
from synlik.models import boombust, ma2, mg1, stereo, toads
from synlik.models.transforms import (SinhArcsinhParams, power_transform,
                                      sinh_arcsinh, sinh_arcsinh_inverse,
                                      sinh_arcsinh_log_jacobian,
                                      transformed_gaussian_exact_loglike)


class TestMa2:
    def test_white_noise_variance(self):
        rng = np.random.default_rng(0)
        batch = ma2._ma2_batch(np.array([0.0, 0.0]), 2000, rng)
        assert abs(batch.var() - 1.0) < 0.01

    def test_lag1_autocovariance(self):
        rng = np.random.default_rng(1)
        batch = ma2._ma2_batch(np.array([0.6, 0.2]), 100_000, rng)
        lag1 = np.mean(batch[:, 1:] * batch[:, :-1])
        assert abs(lag1 - 0.72) < 0.02

    def test_out_of_support(self):
        with pytest.raises(OutOfSupport):
            ma2.ma2_simulate(np.array([2.0, 0.5]), np.random.default_rng(0))

    def test_seed_determinism(self):
        a = ma2.ma2_simulate(np.array([0.6, 0.2]), np.random.default_rng(7))
        b = ma2.ma2_simulate(np.array([0.6, 0.2]), np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_exact_loglike_identity_covariance(self):
        rng = np.random.default_rng(2)
        y = rng.standard_normal(50)
        got = ma2.ma2_exact_loglike((0.0, 0.0), y)
        assert np.isclose(got, stats.norm.logpdf(y).sum())

    def test_covariance_positive_definite(self):
        eigs = np.linalg.eigvalsh(ma2.ma2_covariance((0.6, 0.2)))
        assert np.all(eigs > 0)

    def test_exact_loglike_matches_fitted_gaussian_sl(self):
        from synlik.estimators import (StatisticBatch, fit_gaussian_sl,
                                       gaussian_sl_logdensity)

        rng = np.random.default_rng(3)
        theta = np.array([0.6, 0.2])
        y = ma2.ma2_simulate(theta, rng)
        batch = StatisticBatch(ma2._ma2_batch(theta, 100_000, rng))
        fitted = gaussian_sl_logdensity(fit_gaussian_sl(batch), y)
        assert abs(fitted.logvalue - ma2.ma2_exact_loglike(theta, y)) < 0.5

    def test_heavy_tail_statistic_regime(self):
        rng = np.random.default_rng(4)
        raw = ma2._ma2_batch(np.array([0.6, 0.2]), 2000, rng).ravel()
        warped = sinh_arcsinh(raw, SinhArcsinhParams(0.0, 0.5))
        excess = stats.kurtosis(warped, fisher=True)
        assert excess > 3.0


class TestSinhArcsinh:
    def test_identity_at_defaults(self):
        params = SinhArcsinhParams(0.0, 1.0)
        assert np.isclose(sinh_arcsinh(np.array(1.234), params), 1.234)

    def test_zero_fixed_point_for_any_delta(self):
        for delta in (0.3, 1.0, 2.5):
            assert sinh_arcsinh(np.array(0.0),
                                SinhArcsinhParams(0.0, delta)) == 0.0

    def test_positive_epsilon_skews_symmetric_input(self):
        # sinh(asinh(x) + 2) = x cosh(2) + sqrt(1 + x^2) sinh(2)
        params = SinhArcsinhParams(2.0, 1.0)
        x = np.linspace(-4.0, 4.0, 41)
        expected = x * np.cosh(2.0) + np.sqrt(1.0 + x * x) * np.sinh(2.0)
        assert np.allclose(sinh_arcsinh(x, params), expected, atol=1e-12)
        rng = np.random.default_rng(8)
        y = sinh_arcsinh(rng.standard_normal(200_000), params)
        assert stats.skew(y) > 1.0

    def test_inverse_round_trip(self):
        params = SinhArcsinhParams(0.5, 1.7)
        x = np.linspace(-10.0, 10.0, 101)
        y = sinh_arcsinh(x, params)
        assert np.allclose(sinh_arcsinh_inverse(y, params), x, atol=1e-10)

    def test_log_jacobian_matches_finite_differences(self):
        params = SinhArcsinhParams(0.0, 1.7)
        y = np.linspace(-5.0, 5.0, 21)
        step = 1e-6
        deriv = (sinh_arcsinh_inverse(y + step, params)
                 - sinh_arcsinh_inverse(y - step, params)) / (2 * step)
        assert np.allclose(sinh_arcsinh_log_jacobian(y, params),
                           np.log(deriv), rtol=1e-6)


class TestTransformedGaussianLoglike:
    def test_reduces_to_normal(self):
        rng = np.random.default_rng(5)
        y = rng.standard_normal(4)
        sigma = np.eye(4)
        got = transformed_gaussian_exact_loglike(y, np.zeros(4), sigma,
                                                 0.0, 1.0)
        assert np.isclose(got, stats.norm.logpdf(y).sum())

    def test_is_a_density(self):
        def density(y):
            return np.exp(transformed_gaussian_exact_loglike(
                np.array([y]), np.zeros(1), np.eye(1), 0.0, 0.7))

        total, _ = integrate.quad(density, -60, 60, limit=200)
        assert abs(total - 1.0) < 1e-6

    def test_matches_multivariate_normal_oracle(self):
        rng = np.random.default_rng(6)
        d = 3
        sigma = np.eye(d) + 0.4
        mu = np.array([0.5, -1.0, 2.0])
        y = rng.standard_normal(d)
        got = transformed_gaussian_exact_loglike(y, mu, sigma, 0.0, 1.0)
        want = stats.multivariate_normal(mu, sigma).logpdf(y)
        assert np.isclose(got, want, atol=1e-10)

    def test_rejects_indefinite_covariance(self):
        with pytest.raises(SingularCovariance):
            transformed_gaussian_exact_loglike(np.zeros(2), np.zeros(2),
                                               -np.eye(2), 0.0, 1.0)


class TestMg1:
    def test_saturated_queue_limit(self):
        rng = np.random.default_rng(7)
        stat = mg1.mg1_simulate(np.array([2.0, 2.0 + 1e-9, 1e4]), rng)
        assert np.allclose(stat, np.log(2.0), atol=1e-3)

    def test_mean_interdeparture_vs_event_oracle(self):
        # independent discrete-event bookkeeping: server busy/free times
        def oracle_sim(theta, rng):
            t1, t2, t3 = theta
            free_at = 0.0
            clock = 0.0
            last_departure = 0.0
            gaps = []
            for _ in range(mg1.N_CUSTOMERS):
                clock += rng.exponential(1.0 / t3)
                start = max(clock, free_at)
                free_at = start + rng.uniform(t1, t2)
                gaps.append(free_at - last_departure)
                last_departure = free_at
            return np.array(gaps[1:])

        theta = np.array([1.0, 5.0, 0.2])
        rng = np.random.default_rng(8)
        ours = np.exp(mg1._mg1_batch(theta, 20_000, rng)).mean()
        rng = np.random.default_rng(9)
        reference = np.mean([oracle_sim(theta, rng).mean()
                             for _ in range(20_000)])
        assert abs(ours - reference) / reference < 0.01

    def test_out_of_support(self):
        with pytest.raises(OutOfSupport):
            mg1.mg1_simulate(np.array([5.0, 1.0, 0.2]),
                             np.random.default_rng(0))

    def test_seed_determinism(self):
        theta = np.array([1.0, 5.0, 0.2])
        a = mg1.mg1_simulate(theta, np.random.default_rng(10))
        b = mg1.mg1_simulate(theta, np.random.default_rng(10))
        assert np.array_equal(a, b)

    def test_batch_matches_single_path_shape(self):
        theta = np.array([1.0, 5.0, 0.2])
        batch = mg1._mg1_batch(theta, 5, np.random.default_rng(11))
        assert batch.shape == (5, 50)
        assert np.all(np.isfinite(batch))


class TestStereo:
    def test_exponential_limit_of_gpd(self):
        rng = np.random.default_rng(12)
        u = rng.random(100_000)
        excess = stereo.gpd_sample(1.5, 1e-8, u)
        assert abs(excess.mean() - 1.5) < 0.02

    def test_negative_shape_is_bounded(self):
        rng = np.random.default_rng(13)
        u = rng.random(1_000_000)
        excess = stereo.gpd_sample(1.5, -0.3, u)
        assert excess.max() <= 1.5 / 0.3 + 1e-9

    def test_gpd_matches_scipy_distribution(self):
        rng = np.random.default_rng(14)
        samples = stereo.gpd_sample(1.5, 0.1, rng.random(100_000))
        result = stats.kstest(samples,
                              stats.genpareto(c=0.1, scale=1.5).cdf)
        assert result.statistic < 0.01

    def test_empty_sample_raises(self):
        with pytest.raises(DegenerateSample):
            stereo.stereo_summarize(np.empty(0))

    def test_summaries_shape_and_determinism(self):
        theta = np.array([100.0, 1.5, 0.1])
        a = stereo.stereo_simulate(theta, np.random.default_rng(15))
        b = stereo.stereo_simulate(theta, np.random.default_rng(15))
        assert np.array_equal(a, b)
        summary = stereo.stereo_summarize(a)
        assert summary.shape == (4,)
        assert np.all(np.isfinite(summary))
        assert summary[1] <= summary[2] <= summary[3]


@pytest.fixture(scope="module")
def toads_observed():
    rng = np.random.default_rng(16)
    return toads.toads_simulate(toads.TRUE_PARAMS, rng)


@pytest.fixture(scope="module")
def toads_auxiliary(toads_observed):
    return toads.fit_auxiliary(toads_observed)


class TestToads:
    def test_gaussian_limit_of_stable(self):
        rng = np.random.default_rng(17)
        draws = toads.stable_sample(2.0, 35.0, rng, 100_000)
        assert abs(draws.var() - 2 * 35.0 ** 2) / (2 * 35.0 ** 2) < 0.02

    def test_stable_characteristic_function(self):
        rng = np.random.default_rng(18)
        alpha, gamma = 1.7, 1.0
        draws = toads.stable_sample(alpha, gamma, rng, 1_000_000)
        for t in (0.1, 0.5, 1.0):
            empirical = np.cos(t * draws).mean()
            assert abs(empirical - np.exp(-abs(gamma * t) ** alpha)) < 0.01

    def test_no_return_random_walk_variance_ordering(self):
        rng = np.random.default_rng(19)
        positions = toads.toads_simulate(np.array([1.9, 20.0, 0.0]), rng)
        lag1 = positions[1:] - positions[:-1]
        lag2 = positions[2:] - positions[:-2]
        assert np.median(np.abs(lag2)) > np.median(np.abs(lag1))

    def test_score_vanishes_at_own_mle(self, toads_observed, toads_auxiliary):
        for lag in toads.LAGS:
            data = toads.lag_displacements(toads_observed, lag)
            score = toads_auxiliary[lag].score(data)
            assert np.max(np.abs(score)) < 1e-4

    def test_score_statistic_dimension(self, toads_observed, toads_auxiliary):
        rng = np.random.default_rng(20)
        sim = toads.toads_simulate(toads.TRUE_PARAMS, rng)
        stat = np.concatenate([
            toads_auxiliary[lag].score(toads.lag_displacements(sim, lag))
            for lag in toads.LAGS])
        assert stat.shape == (44,)
        assert np.all(np.isfinite(stat))

    def test_mean_score_small_at_matching_theta(self, toads_observed,
                                                toads_auxiliary):
        rng = np.random.default_rng(21)
        scores = []
        for _ in range(40):
            sim = toads.toads_simulate(toads.TRUE_PARAMS, rng)
            scores.append(np.concatenate([
                toads_auxiliary[lag].score(toads.lag_displacements(sim, lag))
                for lag in toads.LAGS]))
        scores = np.array(scores)
        spread = scores.std(axis=0, ddof=1)
        # the finite observed dataset biases the auxiliary MLE by an
        # amount of order one per-simulation SD; 5 SDs catches gross
        # mis-centering without flagging that irreducible offset
        assert np.all(np.abs(scores.mean(axis=0)) < 5.0 * spread)

    def test_out_of_support(self):
        with pytest.raises(OutOfSupport):
            toads.toads_simulate(np.array([0.5, 35.0, 0.6]),
                                 np.random.default_rng(0))


class TestBoomBust:
    def test_frozen_dynamics(self):
        theta = np.array([0.0, 10.0, 1.0, 0.0])
        path = boombust.boombust_simulate(theta, np.random.default_rng(22),
                                          n0=20)
        assert np.all(path == 20)
        summary = boombust.boombust_summaries(path)
        # variance blocks zero, ratio mean exactly one
        assert summary[1] == 0.0 and summary[5] == 0.0
        assert summary[8] == 1.0

    def test_oscillates_at_true_parameters(self):
        rng = np.random.default_rng(23)
        crossed = 0
        for _ in range(100):
            path = boombust.boombust_simulate(boombust.TRUE_PARAMS, rng)
            above = path > boombust.TRUE_PARAMS[1]
            if np.sum(np.diff(above.astype(int)) != 0) >= 2:
                crossed += 1
        assert crossed >= 90

    def test_moments_match_scipy_oracle(self):
        x = np.array([1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 7.0, 3.0])
        got = boombust._moments(x)
        assert np.isclose(got[0], x.mean(), atol=1e-12)
        assert np.isclose(got[1], x.var(), atol=1e-12)
        assert np.isclose(got[2], stats.skew(x, bias=True), atol=1e-12)
        assert np.isclose(got[3], stats.kurtosis(x, bias=True, fisher=False),
                          atol=1e-12)

    def test_summaries_shape_and_determinism(self):
        theta = boombust.TRUE_PARAMS
        a = boombust.boombust_simulate(theta, np.random.default_rng(24))
        b = boombust.boombust_simulate(theta, np.random.default_rng(24))
        assert np.array_equal(a, b)
        assert boombust.boombust_summaries(a).shape == (12,)


class TestModelContracts:
    @pytest.mark.parametrize("builder", [ma2_model, mg1_model, stereo_model,
                                         boombust_model])
    def test_statistic_dimension_is_constant(self, builder):
        model = builder()
        rng = np.random.default_rng(25)
        batch = model.simulate_batch(model.true_params, 8, rng)
        assert batch.shape == (8, model.d)
        assert np.all(np.isfinite(batch))

    def test_power_transform_examples(self):
        assert np.isclose(power_transform(np.array(-2.0), 1.5),
                          -2.0 ** 1.5)
        assert power_transform(np.array(0.0), 2.3) == 0.0
