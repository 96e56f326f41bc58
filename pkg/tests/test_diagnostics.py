import numpy as np
import pytest
from scipy import stats

from synlik.diagnostics import (GridDensity, chain_marginal_mass,
                                chain_to_grid, estimator_bias_std_study,
                                exact_ma2_posterior_grid, total_variation)
from synlik.errors import EmptyChain, GridMismatch


def _grid_density_from_pdf(x_grid, y_grid, pdf):
    xx, yy = np.meshgrid(x_grid, y_grid, indexing="ij")
    return GridDensity(x_grid, y_grid, pdf(xx, yy))


class TestChainToGrid:
    def test_iid_normal_recovers_the_density(self):
        rng = np.random.default_rng(0)
        draws = rng.standard_normal((100_000, 2))
        x_grid = np.linspace(-4, 4, 60)
        y_grid = np.linspace(-4, 4, 60)
        kde = chain_to_grid(draws, (0, 1), x_grid, y_grid)
        truth = _grid_density_from_pdf(
            x_grid, y_grid,
            lambda x, y: stats.norm.pdf(x) * stats.norm.pdf(y))
        assert total_variation(kde, truth) < 0.05

    def test_point_mass_chain_concentrates_in_one_cell(self):
        draws = np.tile([0.3, -0.5], (2000, 1))
        x_grid = np.linspace(-1, 1, 21)
        y_grid = np.linspace(-1, 1, 21)
        dens = chain_to_grid(draws, (0, 1), x_grid, y_grid)
        assert dens.density.max() > 0.999

    def test_density_is_normalized(self):
        rng = np.random.default_rng(1)
        draws = rng.standard_normal((2000, 3))
        dens = chain_to_grid(draws, (0, 2), np.linspace(-5, 5, 30),
                             np.linspace(-5, 5, 30))
        assert np.isclose(dens.density.sum(), 1.0)

    def test_too_few_draws_raise(self):
        with pytest.raises(EmptyChain):
            chain_to_grid(np.zeros((500, 2)), (0, 1),
                          np.linspace(-1, 1, 10), np.linspace(-1, 1, 10))

    def test_burn_in_is_dropped(self):
        rng = np.random.default_rng(2)
        good = rng.standard_normal((5000, 2))
        polluted = np.vstack([np.full((1000, 2), 50.0), good])
        x_grid = np.linspace(-4, 4, 40)
        y_grid = np.linspace(-4, 4, 40)
        a = chain_to_grid(polluted, (0, 1), x_grid, y_grid, burn_in=1000)
        b = chain_to_grid(good, (0, 1), x_grid, y_grid)
        assert total_variation(a, b) < 1e-12


class TestChainMarginalMass:
    def test_matches_two_dee_marginal(self):
        rng = np.random.default_rng(3)
        draws = rng.standard_normal((50_000, 2))
        grid = np.linspace(-4, 4, 80)
        mass = chain_marginal_mass(draws, 0, grid)
        truth = stats.norm.pdf(grid)
        assert total_variation(mass, truth / truth.sum()) < 0.02

    def test_accepts_one_dimensional_input(self):
        rng = np.random.default_rng(4)
        draws = rng.standard_normal(5000)
        mass = chain_marginal_mass(draws, 0, np.linspace(-4, 4, 50))
        assert np.isclose(mass.sum(), 1.0)

    def test_explicit_bandwidth_matches_direct_kde(self):
        rng = np.random.default_rng(9)
        draws = rng.standard_normal(2000)
        grid = np.linspace(-4, 4, 50)
        h = 0.37
        mass = chain_marginal_mass(draws, 0, grid, bandwidth=h)
        direct = np.exp(-0.5 * ((grid[:, None] - draws[None, :]) / h) ** 2)
        direct = direct.sum(axis=1)
        assert np.allclose(mass, direct / direct.sum(), atol=1e-12)

    def test_shared_bandwidth_removes_smoothing_mismatch(self):
        # same target sampled at very different sizes: per-chain
        # bandwidths differ, a shared one leaves only sampling error
        rng = np.random.default_rng(10)
        a = rng.standard_normal(100_000)
        b = rng.standard_normal(2000)
        grid = np.linspace(-4, 4, 100)
        shared = 0.3
        tv = total_variation(chain_marginal_mass(a, 0, grid, bandwidth=shared),
                             chain_marginal_mass(b, 0, grid, bandwidth=shared))
        assert tv < 0.03


class TestTotalVariation:
    def _random_mass(self, rng, size=64):
        m = rng.random(size)
        return m / m.sum()

    def test_identical_densities_give_zero(self):
        rng = np.random.default_rng(5)
        m = self._random_mass(rng)
        assert total_variation(m, m) == 0.0

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = self._random_mass(rng)
            b = self._random_mass(rng)
            c = self._random_mass(rng)
            assert np.isclose(total_variation(a, b), total_variation(b, a))
            assert (total_variation(a, c)
                    <= total_variation(a, b) + total_variation(b, c) + 1e-12)
            assert 0.0 <= total_variation(a, b) <= 1.0

    def test_disjoint_masses_give_one(self):
        a = np.array([1.0, 0.0, 0.0, 0.0])
        b = np.array([0.0, 0.0, 0.5, 0.5])
        assert np.isclose(total_variation(a, b), 1.0)

    def test_grid_mismatch_raises(self):
        g1 = GridDensity(np.linspace(0, 1, 5), np.linspace(0, 1, 5),
                         np.ones((5, 5)))
        g2 = GridDensity(np.linspace(0, 2, 5), np.linspace(0, 1, 5),
                         np.ones((5, 5)))
        g3 = GridDensity(np.linspace(0, 1, 6), np.linspace(0, 1, 5),
                         np.ones((6, 5)))
        with pytest.raises(GridMismatch):
            total_variation(g1, g2)
        with pytest.raises(GridMismatch):
            total_variation(g1, g3)
        with pytest.raises(GridMismatch):
            total_variation(np.ones(4) / 4, np.ones(5) / 5)


@pytest.fixture(scope="module")
def observed():
    from synlik.datasets import load_observed
    return load_observed("ma2")


class TestExactMa2PosteriorGrid:
    def test_mode_near_the_generating_parameters(self, observed):
        x_grid = np.linspace(-0.4, 1.4, 90)
        y_grid = np.linspace(-0.6, 0.9, 90)
        dens = exact_ma2_posterior_grid(observed, x_grid, y_grid)
        a, b = np.unravel_index(dens.density.argmax(), dens.density.shape)
        assert abs(x_grid[a] - 0.6) < 0.3
        assert abs(y_grid[b] - 0.2) < 0.3

    def test_refinement_stability(self, observed):
        coarse = exact_ma2_posterior_grid(observed, np.linspace(-0.2, 1.3, 60),
                                          np.linspace(-0.5, 0.8, 60))
        fine = exact_ma2_posterior_grid(observed, np.linspace(-0.2, 1.3, 120),
                                        np.linspace(-0.5, 0.8, 120))
        # compare the coarse density against the fine one aggregated
        # back onto the coarse cells (2x2 blocks share a coarse cell)
        folded = fine.density.reshape(60, 2, 120).sum(axis=1)
        folded = folded.reshape(60, 60, 2).sum(axis=2)
        tv = 0.5 * np.abs(coarse.density - folded).sum()
        assert tv < 0.01

    def test_empty_series_gives_flat_triangle(self):
        x_grid = np.linspace(-1.8, 1.8, 41)
        y_grid = np.linspace(-0.95, 0.95, 41)
        dens = exact_ma2_posterior_grid(np.empty(0), x_grid, y_grid)
        inside = dens.density[dens.density > 0]
        assert np.allclose(inside, inside[0])

    def test_zero_outside_the_triangle(self, observed):
        x_grid = np.array([-1.9, 0.0, 1.9])
        y_grid = np.array([0.0, 0.5])
        dens = exact_ma2_posterior_grid(observed, x_grid, y_grid)
        assert dens.density[0].sum() == 0.0
        assert dens.density[2].sum() == 0.0


class TestEstimatorBiasStdStudy:
    def test_output_contract(self):
        rows, raw = estimator_bias_std_study(d=3, eps=0.0, delta=1.0,
                                             n_grid=[50, 100], replicates=5,
                                             seed=0)
        assert len(rows) == 4
        assert {row["estimator"] for row in rows} == {"gaussian",
                                                      "semiparametric"}
        assert len(raw) == 2 * 2 * 5
        for row in rows:
            assert set(row) == {"n", "estimator", "bias", "std",
                                "neg_inf_count"}
            assert np.isfinite(row["std"])
            assert row["neg_inf_count"] >= 0

    def test_gaussian_estimator_unbiased_on_gaussian_data(self):
        rows, _ = estimator_bias_std_study(d=2, eps=0.0, delta=1.0,
                                           n_grid=[400], replicates=60,
                                           seed=1)
        gauss = next(r for r in rows if r["estimator"] == "gaussian")
        assert abs(gauss["bias"]) < 3.0 * gauss["std"] / np.sqrt(60)
        assert gauss["neg_inf_count"] == 0

    def test_too_few_replicates_raise(self):
        with pytest.raises(ValueError):
            estimator_bias_std_study(d=2, eps=0.0, delta=1.0, n_grid=[50],
                                     replicates=1)
