"""Simulator-model contract shared by the benchmark models."""

from dataclasses import dataclass, field

import numpy as np

from ..mcmc import ParameterTransform, Prior


@dataclass
class SimulatorModel:
    """Binds a stochastic simulator to its statistics, prior and transform.

    `simulate(theta, rng)` returns one raw dataset; `summarize(raw)`
    reduces it to a length-d statistic vector. A model may provide a
    vectorized `batch_fn(theta, n, rng)` returning an (n, d) statistic
    matrix directly; otherwise simulation falls back to a loop.

    `n_sim_calls` counts individual dataset simulations (test hook).
    """

    name: str
    param_names: tuple
    simulate: object
    summarize: object
    prior: Prior
    transform: ParameterTransform
    d: int
    true_params: np.ndarray | None = None
    batch_fn: object | None = None
    n_sim_calls: int = field(default=0, repr=False)

    def simulate_batch(self, theta, n, rng):
        """(n, d) statistic matrix at theta drawn from the given stream."""
        self.n_sim_calls += n
        if self.batch_fn is not None:
            stats = np.asarray(self.batch_fn(theta, n, rng), dtype=float)
        else:
            stats = np.stack([
                np.asarray(self.summarize(self.simulate(theta, rng)), dtype=float)
                for _ in range(n)
            ])
        if stats.shape != (n, self.d):
            raise ValueError(
                f"{self.name}: statistic batch has shape {stats.shape}, "
                f"expected {(n, self.d)}")
        return stats

    def observed_statistic(self, raw):
        return np.asarray(self.summarize(raw), dtype=float)


def uniform_box_prior(bounds):
    """Flat prior over a product of open intervals (unnormalized)."""
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]

    def logdensity(theta):
        for value, (lo, hi) in zip(theta, bounds):
            if not lo < value < hi:
                return -np.inf
        return 0.0

    return Prior(logdensity)
