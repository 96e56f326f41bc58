"""Random-walk Metropolis-Hastings drivers.

`run_mcmc_sl` is the synthetic-likelihood sampler with a pluggable
estimator (gaussian / semiparametric / semiparametric-shrunk); the
incumbent's likelihood estimate is carried between iterations, never
re-estimated. `run_mcmc_abc` is the reference ABC sampler with a
Mahalanobis acceptance region.

The walk takes place in an unconstrained space defined by a
ParameterTransform; the MH ratio carries the Jacobian correction.
Within-iteration simulations use substreams keyed on
(seed, iteration, chunk), so results do not depend on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegenerateSample, InitializationFailure
from .estimators import (
    StatisticBatch,
    fit_gaussian_sl,
    gaussian_sl_logdensity,
    semibsl_logdensity,
)

SIM_CHUNK = 64  # fixed chunking => worker-count independent streams


@dataclass(frozen=True)
class Prior:
    """Log prior density over the constrained parameter space."""

    logdensity: object  # Callable[[np.ndarray], float], -inf outside support

    def __call__(self, theta):
        return float(self.logdensity(np.asarray(theta, dtype=float)))


@dataclass(frozen=True)
class ParameterTransform:
    """Bijection between constrained and unconstrained parameter spaces.

    `log_jacobian` is log|d inverse / dz| evaluated at an unconstrained
    point, i.e. the change-of-variables term for densities on the
    constrained space.
    """

    forward: object
    inverse: object
    log_jacobian: object


def identity_transform():
    return ParameterTransform(
        forward=lambda theta: np.asarray(theta, dtype=float).copy(),
        inverse=lambda z: np.asarray(z, dtype=float).copy(),
        log_jacobian=lambda z: 0.0,
    )


def componentwise_transform(specs):
    """Build a transform from per-component specs.

    Each spec is "identity", "log", or ("logit", lo, hi) for a scaled
    logit over the open interval (lo, hi).
    """
    specs = list(specs)

    def forward(theta):
        theta = np.asarray(theta, dtype=float)
        z = np.empty_like(theta)
        for i, spec in enumerate(specs):
            if spec == "identity":
                z[i] = theta[i]
            elif spec == "log":
                z[i] = np.log(theta[i])
            else:
                _, lo, hi = spec
                frac = (theta[i] - lo) / (hi - lo)
                z[i] = np.log(frac) - np.log1p(-frac)
        return z

    def inverse(z):
        z = np.asarray(z, dtype=float)
        theta = np.empty_like(z)
        for i, spec in enumerate(specs):
            if spec == "identity":
                theta[i] = z[i]
            elif spec == "log":
                theta[i] = np.exp(z[i])
            else:
                _, lo, hi = spec
                theta[i] = lo + (hi - lo) / (1.0 + np.exp(-z[i]))
        return theta

    def log_jacobian(z):
        z = np.asarray(z, dtype=float)
        total = 0.0
        for i, spec in enumerate(specs):
            if spec == "identity":
                continue
            if spec == "log":
                total += z[i]
            else:
                _, lo, hi = spec
                # d/dz [lo + (hi-lo) sigmoid(z)] = (hi-lo) sig (1-sig)
                total += np.log(hi - lo) - z[i] - 2.0 * np.log1p(np.exp(-z[i]))
        return total

    return ParameterTransform(forward, inverse, log_jacobian)


@dataclass(frozen=True)
class ProposalSpec:
    """Random-walk covariance in the unconstrained space."""

    covariance: np.ndarray

    def __post_init__(self):
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        np.linalg.cholesky(cov)  # must be SPD
        object.__setattr__(self, "covariance", cov)

    @property
    def cholesky(self):
        return np.linalg.cholesky(self.covariance)


@dataclass
class Chain:
    """Ordered MCMC output in the constrained space; no burn-in removed."""

    draws: np.ndarray
    loglikes: np.ndarray
    accepted: np.ndarray
    seed: int
    estimator: str
    meta: dict = field(default_factory=dict)

    @property
    def length(self):
        return self.draws.shape[0]

    @property
    def acceptance_rate(self):
        return float(self.accepted.mean())


@dataclass(frozen=True)
class EstimatorSpec:
    kind: str  # gaussian | semiparametric | semiparametric-shrunk
    shrinkage: float | None = None

    def __post_init__(self):
        valid = ("gaussian", "semiparametric", "semiparametric-shrunk")
        if self.kind not in valid:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.kind == "semiparametric-shrunk" and self.shrinkage is None:
            raise ValueError("shrunk estimator needs a shrinkage weight")

    def evaluate(self, batch_values, observed):
        batch = StatisticBatch(batch_values)
        if self.kind == "gaussian":
            params = fit_gaussian_sl(batch)
            return gaussian_sl_logdensity(params, observed, n_used=batch.n)
        shrink = self.shrinkage if self.kind == "semiparametric-shrunk" else None
        return semibsl_logdensity(batch, observed, shrinkage=shrink)


def _stream_rng(seed, phase, iteration, chunk):
    # phase 0: initialization attempts, 1: chain iterations, 2: proposal/accept
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(phase, iteration, chunk)))


def simulate_statistics(model, theta, n, seed, iteration, workers=1, phase=1):
    """n summary-statistic rows at theta, chunk-substreamed and stackable.

    Chunk boundaries are fixed (SIM_CHUNK) so the result is identical for
    any worker count.
    """
    edges = list(range(0, n, SIM_CHUNK)) + [n]
    sizes = [edges[i + 1] - edges[i] for i in range(len(edges) - 1)]

    def run_chunk(idx_size):
        idx, size = idx_size
        rng = _stream_rng(seed, phase, iteration, idx)
        return model.simulate_batch(theta, size, rng)

    jobs = list(enumerate(sizes))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, jobs))
    else:
        parts = [run_chunk(job) for job in jobs]
    return np.vstack(parts)


def run_mcmc_sl(model, estimator, observed_stat, proposal, n, T, theta0, seed,
                prior=None, transform=None, workers=1, init_retries=10):
    """MCMC with a synthetic-likelihood estimate in place of the likelihood.

    A -inf proposal estimate is rejected outright; the incumbent estimate
    is reused verbatim until a proposal is accepted.
    """
    if isinstance(estimator, str):
        estimator = EstimatorSpec(estimator)
    prior = prior if prior is not None else model.prior
    transform = transform if transform is not None else model.transform
    observed_stat = np.asarray(observed_stat, dtype=float)
    theta0 = np.asarray(theta0, dtype=float)
    if n < 3:
        raise ValueError("need n >= 3 simulations per iteration")
    if not np.isfinite(prior(theta0)):
        raise InitializationFailure("theta0 outside the prior support")

    loglike = -np.inf
    for attempt in range(init_retries):
        try:
            batch = simulate_statistics(model, theta0, n, seed, attempt,
                                        workers, phase=0)
            loglike = estimator.evaluate(batch, observed_stat).logvalue
        except DegenerateSample:
            loglike = -np.inf
        if np.isfinite(loglike):
            break
    else:
        raise InitializationFailure(
            f"estimate at theta0 was -inf in {init_retries} attempts")

    p = theta0.size
    chain_rng = _stream_rng(seed, 2, 0, 0)
    step_chol = proposal.cholesky

    theta = theta0.copy()
    z = transform.forward(theta)
    logprior = prior(theta)
    logjac = transform.log_jacobian(z)

    draws = np.empty((T, p))
    loglikes = np.empty(T)
    accepted = np.zeros(T, dtype=bool)

    for i in range(T):
        z_prop = z + step_chol @ chain_rng.standard_normal(p)
        theta_prop = transform.inverse(z_prop)
        logprior_prop = prior(theta_prop)

        loglike_prop = -np.inf
        logjac_prop = -np.inf
        if np.isfinite(logprior_prop):
            logjac_prop = transform.log_jacobian(z_prop)
            try:
                batch = simulate_statistics(model, theta_prop, n, seed, i,
                                            workers)
                loglike_prop = estimator.evaluate(batch, observed_stat).logvalue
            except DegenerateSample:
                loglike_prop = -np.inf

        if np.isfinite(loglike_prop):
            log_ratio = ((loglike_prop + logprior_prop + logjac_prop)
                         - (loglike + logprior + logjac))
            if np.log(chain_rng.uniform()) < log_ratio:
                theta, z = theta_prop, z_prop
                loglike, logprior, logjac = loglike_prop, logprior_prop, logjac_prop
                accepted[i] = True

        draws[i] = theta
        loglikes[i] = loglike

    return Chain(draws=draws, loglikes=loglikes, accepted=accepted, seed=seed,
                 estimator=estimator.kind,
                 meta={"n": n, "shrinkage": estimator.shrinkage})


def run_mcmc_abc(model, observed_stat, proposal, tolerance, mahalanobis_cov,
                 T, theta0, seed, prior=None, transform=None,
                 init_retries=1000):
    """Indicator MCMC-ABC: accept when the simulated statistic lands within
    `tolerance` of the observed one under the Mahalanobis metric.

    One simulation per iteration. Initialization requires a within-
    tolerance simulation at theta0 (retried); with tolerance = +inf this
    reduces to prior sampling via MH.
    """
    prior = prior if prior is not None else model.prior
    transform = transform if transform is not None else model.transform
    observed_stat = np.asarray(observed_stat, dtype=float)
    theta0 = np.asarray(theta0, dtype=float)
    maha_chol = np.linalg.cholesky(np.atleast_2d(np.asarray(mahalanobis_cov,
                                                            dtype=float)))
    if not np.isfinite(prior(theta0)):
        raise InitializationFailure("theta0 outside the prior support")

    def distance(stat):
        white = solve_triangular(maha_chol, stat - observed_stat, lower=True)
        return float(np.sqrt(white @ white))

    def simulate_one(at_theta, iteration, phase=1):
        rng = _stream_rng(seed, phase, iteration, 0)
        return model.simulate_batch(at_theta, 1, rng)[0]

    if np.isfinite(tolerance):
        for attempt in range(init_retries):
            try:
                if distance(simulate_one(theta0, attempt, phase=0)) <= tolerance:
                    break
            except DegenerateSample:
                continue
        else:
            raise InitializationFailure(
                f"no within-tolerance simulation at theta0 in {init_retries} tries")

    p = theta0.size
    chain_rng = _stream_rng(seed, 2, 0, 0)
    step_chol = proposal.cholesky

    theta = theta0.copy()
    z = transform.forward(theta)
    logprior = prior(theta)
    logjac = transform.log_jacobian(z)

    draws = np.empty((T, p))
    loglikes = np.zeros(T)
    accepted = np.zeros(T, dtype=bool)

    for i in range(T):
        z_prop = z + step_chol @ chain_rng.standard_normal(p)
        theta_prop = transform.inverse(z_prop)
        logprior_prop = prior(theta_prop)

        if np.isfinite(logprior_prop):
            logjac_prop = transform.log_jacobian(z_prop)
            log_ratio = (logprior_prop + logjac_prop) - (logprior + logjac)
            if np.log(chain_rng.uniform()) < log_ratio:
                hit = True
                if np.isfinite(tolerance):
                    try:
                        hit = distance(simulate_one(theta_prop, i)) <= tolerance
                    except DegenerateSample:
                        hit = False
                if hit:
                    theta, z = theta_prop, z_prop
                    logprior, logjac = logprior_prop, logjac_prop
                    accepted[i] = True

        draws[i] = theta

    return Chain(draws=draws, loglikes=loglikes, accepted=accepted, seed=seed,
                 estimator="abc", meta={"tolerance": tolerance})


def effective_sample_size(chain, component=0):
    """Autocorrelation-adjusted sample count (initial positive sequence)."""
    x = np.asarray(chain.draws if not isinstance(chain, np.ndarray) else chain,
                   dtype=float)
    if x.ndim == 2:
        x = x[:, component]
    T = x.size
    if T < 100:
        raise ValueError("need at least 100 draws")
    x = x - x.mean()
    var = float(x @ x) / T
    if var == 0.0:
        return 1.0

    nfft = int(2 ** np.ceil(np.log2(2 * T)))
    fx = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(fx * np.conj(fx), nfft)[:T].real / T
    rho = acov / acov[0]

    tau = 1.0
    for k in range(1, T // 2):
        pair = rho[2 * k - 1] + rho[2 * k]
        if pair < 0.0:
            break
        tau += 2.0 * pair
    return float(np.clip(T / tau, 1.0, T))
