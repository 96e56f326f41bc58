"""Synthetic-likelihood density estimators.

Three estimators share one interface: the parametric Gaussian synthetic
likelihood, the semi-parametric KDE-marginal / Gaussian-copula estimator
with a Gaussian rank correlation, and the latter with Warton shrinkage
of the correlation matrix. All are pure functions of an (n, d) batch of
simulated summary statistics and the observed statistic.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular
from scipy.stats import rankdata

from . import _core
from .errors import (
    DegenerateCovariance,
    NoFeasibleLambda,
    SingularCorrelation,
    SingularCovariance,
    ZeroDispersion,
)
from .normal import std_norm_cdf, std_norm_ppf

# Clamp for marginal CDF values before the inverse-normal map; keeps the
# copula term finite whenever the marginal pdf term is finite.
CDF_CLAMP = 1e-12

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class StatisticBatch:
    """An (n, d) matrix of simulated summary statistics at one parameter."""

    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("batch must be a 2-D (n, d) array")
        if values.shape[0] < 3:
            raise ValueError("batch needs at least 3 simulations")
        if not np.all(np.isfinite(values)):
            raise ValueError("batch entries must all be finite")
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]


def as_batch(batch):
    if isinstance(batch, StatisticBatch):
        return batch
    return StatisticBatch(np.asarray(batch))


@dataclass(frozen=True)
class GaussianSLParams:
    mean: np.ndarray
    covariance: np.ndarray


@dataclass(frozen=True)
class KdeMarginal:
    """Gaussian-kernel mixture over sorted samples with one bandwidth."""

    samples: np.ndarray
    bandwidth: float


@dataclass(frozen=True)
class CorrelationMatrix:
    values: np.ndarray

    @property
    def d(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class LogLikelihoodEstimate:
    """Log-scale likelihood estimate; -inf is a valid value, NaN is not."""

    logvalue: float
    estimator: str
    n_used: int

    def __post_init__(self):
        if np.isnan(self.logvalue) or self.logvalue == np.inf:
            raise ValueError("log-likelihood estimate must be real or -inf")


def _cholesky_with_jitter(matrix, error_cls):
    """Lower Cholesky factor, retrying with a bounded diagonal jitter.

    Jitter starts at 1e-10 * d and grows tenfold for up to 3 retries
    before `error_cls` is raised.
    """
    d = matrix.shape[0]
    jitter = 0.0
    for attempt in range(4):
        try:
            return np.linalg.cholesky(matrix + jitter * np.eye(d))
        except np.linalg.LinAlgError:
            jitter = 1e-10 * d if attempt == 0 else jitter * 10.0
    raise error_cls("Cholesky failed after jitter retries")


def fit_gaussian_sl(batch):
    """Unbiased mean and (n-1)-denominator covariance of the batch."""
    batch = as_batch(batch)
    values = batch.values
    mean = values.mean(axis=0)
    centered = values - mean
    cov = centered.T @ centered / (batch.n - 1)
    if np.any(np.diag(cov) < 1e-300):
        raise DegenerateCovariance("a statistic column has zero variance")
    return GaussianSLParams(mean=mean, covariance=cov)


def gaussian_sl_logdensity(params, observed, n_used=0):
    """log N(observed | mean, covariance) via Cholesky."""
    observed = np.asarray(observed, dtype=float)
    chol = _cholesky_with_jitter(params.covariance, SingularCovariance)
    d = observed.shape[0]
    white = solve_triangular(chol, observed - params.mean, lower=True)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    logvalue = -0.5 * (d * _LOG_2PI + logdet + white @ white)
    return LogLikelihoodEstimate(float(logvalue), "gaussian", n_used)


def silverman_bandwidth(samples):
    """h = 0.9 n^{-1/5} min(sigma, IQR / 1.34).

    Sigma uses the n-1 denominator; the IQR uses linearly interpolated
    (type-7) quantiles. If one dispersion measure is zero the other is
    used; if both are zero the bandwidth is undefined.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 3:
        raise ValueError("bandwidth needs at least 3 samples")
    sigma = samples.std(ddof=1)
    q75, q25 = np.percentile(samples, [75.0, 25.0])
    iqr = q75 - q25
    candidates = [v for v in (sigma, iqr / 1.34) if v > 0.0]
    if not candidates:
        raise ZeroDispersion("samples have zero spread")
    return 0.9 * n ** (-0.2) * min(candidates)


def _column_bandwidths(values):
    """Vectorized Silverman bandwidths for every column of an (n, d) batch."""
    n = values.shape[0]
    sigma = values.std(axis=0, ddof=1)
    q75, q25 = np.percentile(values, [75.0, 25.0], axis=0)
    spread = np.where(sigma > 0,
                      np.where((q75 - q25) > 0,
                               np.minimum(sigma, (q75 - q25) / 1.34), sigma),
                      (q75 - q25) / 1.34)
    if np.any(spread <= 0.0):
        raise ZeroDispersion("a statistic column has zero spread")
    return 0.9 * n ** (-0.2) * spread


def fit_kde_marginal(samples):
    samples = np.sort(np.asarray(samples, dtype=float))
    return KdeMarginal(samples=samples, bandwidth=silverman_bandwidth(samples))


def kde_pdf(marginal, x):
    """Gaussian-kernel density (1 / nh) sum phi((x - x_i) / h)."""
    x = np.asarray(x, dtype=float)
    z = (x[..., None] - marginal.samples) / marginal.bandwidth
    n = marginal.samples.size
    pdf = np.exp(-0.5 * z * z).sum(axis=-1)
    return pdf / (n * marginal.bandwidth * np.sqrt(2.0 * np.pi))


def kde_cdf(marginal, x):
    """Mean of Gaussian CDFs with the pdf bandwidth, in [0, 1]."""
    x = np.asarray(x, dtype=float)
    z = (x[..., None] - marginal.samples) / marginal.bandwidth
    return np.clip(std_norm_cdf(z).mean(axis=-1), 0.0, 1.0)


@lru_cache(maxsize=64)
def _rank_score_table(n):
    """Phi^{-1}(r / (n+1)) for every half-integer midrank r, plus the
    denominator sum over integer ranks."""
    half_ranks = np.arange(2, 2 * n + 1) / 2.0  # 1, 1.5, ..., n
    table = std_norm_ppf(half_ranks / (n + 1.0))
    denom = float(np.sum(table[::2] ** 2))
    return table, denom


def _rank_scores(values):
    """Inverse-normal midrank scores and the rank-score denominator."""
    n = values.shape[0]
    ranks = rankdata(values, method="average", axis=0)
    table, denom = _rank_score_table(n)
    z = table[(2.0 * ranks).astype(np.intp) - 2]
    return z, denom


def gaussian_rank_correlation(batch):
    """Rank-based copula correlation estimate (robust to outliers)."""
    batch = as_batch(batch)
    z, denom = _rank_scores(batch.values)
    corr = z.T @ z / denom
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(np.clip(corr, -1.0, 1.0))


def warton_shrink(correlation, lam):
    """Convex combination lam * R + (1 - lam) * I."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("shrinkage weight must lie in [0, 1]")
    d = correlation.d
    shrunk = lam * correlation.values + (1.0 - lam) * np.eye(d)
    np.fill_diagonal(shrunk, 1.0)
    return CorrelationMatrix(shrunk)


def _copula_quadform(correlation, eta):
    """-0.5 log|R| - 0.5 eta' (R^{-1} - I) eta, via Cholesky of R."""
    chol = _cholesky_with_jitter(correlation.values, SingularCorrelation)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    white = solve_triangular(chol, eta, lower=True)
    return -0.5 * logdet - 0.5 * (white @ white - eta @ eta)


def semibsl_logdensity(batch, observed, shrinkage=None):
    """Semi-parametric log-likelihood: KDE marginals + Gaussian copula.

    A marginal pdf underflow yields -inf (far-tail observed component),
    not an error. `shrinkage` is an optional Warton weight for the rank
    correlation matrix.
    """
    batch = as_batch(batch)
    observed = np.asarray(observed, dtype=float)
    if observed.shape != (batch.d,):
        raise ValueError("observed statistic length must match batch columns")

    h = _column_bandwidths(batch.values)
    logpdf, cdf = _core.kde_eval(batch.values, h, observed)

    tag = "semiparametric" if shrinkage is None else "semiparametric-shrunk"
    if not np.all(np.isfinite(logpdf)):
        return LogLikelihoodEstimate(-np.inf, tag, batch.n)

    u = np.clip(cdf, CDF_CLAMP, 1.0 - CDF_CLAMP)
    eta = std_norm_ppf(u)
    corr = gaussian_rank_correlation(batch)
    if shrinkage is not None:
        corr = warton_shrink(corr, shrinkage)
    logvalue = _copula_quadform(corr, eta) + logpdf.sum()
    return LogLikelihoodEstimate(float(logvalue), tag, batch.n)


def tune_shrinkage(model, theta, n, observed_stat, target_std=1.5,
                   lambda_grid=None, m=30, seed=0):
    """Largest grid shrinkage weight keeping estimator noise under target.

    Draws `m` independent batches at `theta`, evaluates the shrunk
    estimator on each for every grid value, and returns the largest
    weight whose log-likelihood standard deviation is <= target_std.
    -inf estimates are dropped; a grid value with fewer than m/2 finite
    estimates is treated as infeasible.
    """
    if lambda_grid is None:
        lambda_grid = np.round(np.arange(0.0, 1.01, 0.1), 10)
    lambda_grid = np.sort(np.asarray(lambda_grid, dtype=float))
    if m < 2:
        raise ValueError("need at least 2 replicate estimates")

    batches = [model.simulate_batch(theta, n, _tuning_rng(seed, i))
               for i in range(m)]
    estimates = {lam: [] for lam in lambda_grid}
    for batch in batches:
        for lam in lambda_grid:
            est = semibsl_logdensity(batch, observed_stat, shrinkage=float(lam))
            estimates[lam].append(est.logvalue)

    for lam in lambda_grid[::-1]:
        finite = np.array([v for v in estimates[lam] if np.isfinite(v)])
        if finite.size < m / 2:
            continue
        if finite.std(ddof=1) <= target_std:
            return float(lam)
    raise NoFeasibleLambda("even full shrinkage exceeds the target noise")


def _tuning_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
