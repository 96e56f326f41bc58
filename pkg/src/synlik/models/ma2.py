"""MA(2) time series: tractable likelihood, full data as the statistic."""

import numpy as np

from ..errors import OutOfSupport
from ..mcmc import Prior, identity_transform
from .base import SimulatorModel
from .transforms import SinhArcsinhParams, sinh_arcsinh

SERIES_LENGTH = 50
TRUE_PARAMS = np.array([0.6, 0.2])

_LOG_2PI = np.log(2.0 * np.pi)


def in_triangle(theta):
    t1, t2 = theta
    return (-1.0 < t2 < 1.0) and (t1 + t2 > -1.0) and (t1 - t2 < 1.0)


def _check_support(theta):
    if not in_triangle(theta):
        raise OutOfSupport(f"MA(2) parameter {theta} outside the triangle")


def ma2_simulate(theta, rng, length=SERIES_LENGTH):
    """y_t = z_t + t1 z_{t-1} + t2 z_{t-2} from iid standard normals."""
    _check_support(theta)
    t1, t2 = theta
    z = rng.standard_normal(length + 2)
    return z[2:] + t1 * z[1:-1] + t2 * z[:-2]


def _ma2_batch(theta, n, rng, length=SERIES_LENGTH):
    _check_support(theta)
    t1, t2 = theta
    z = rng.standard_normal((n, length + 2))
    return z[:, 2:] + t1 * z[:, 1:-1] + t2 * z[:, :-2]


def ma2_covariance(theta, length=SERIES_LENGTH):
    """Banded covariance: Var = 1 + t1^2 + t2^2, lag-1 = t1 + t1 t2, lag-2 = t2."""
    t1, t2 = theta
    cov = np.zeros((length, length))
    idx = np.arange(length)
    cov[idx, idx] = 1.0 + t1 * t1 + t2 * t2
    cov[idx[:-1], idx[:-1] + 1] = cov[idx[:-1] + 1, idx[:-1]] = t1 + t1 * t2
    cov[idx[:-2], idx[:-2] + 2] = cov[idx[:-2] + 2, idx[:-2]] = t2
    return cov


def ma2_exact_loglike(theta, y):
    """Log-density of the banded-covariance multivariate normal."""
    _check_support(theta)
    y = np.asarray(y, dtype=float)
    cov = ma2_covariance(theta, y.size)
    chol = np.linalg.cholesky(cov)
    white = np.linalg.solve(chol, y)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    return float(-0.5 * (y.size * _LOG_2PI + logdet + white @ white))


def triangle_prior():
    """Flat prior over the invertibility triangle (unnormalized)."""

    def logdensity(theta):
        return 0.0 if in_triangle(theta) else -np.inf

    return Prior(logdensity)


def ma2_model(epsilon=0.0, delta=1.0, length=SERIES_LENGTH):
    """MA(2) model; the statistic is the series pushed through the
    sinh-arcsinh map (identity at the defaults)."""
    params = SinhArcsinhParams(epsilon, delta)

    def summarize(raw):
        return sinh_arcsinh(raw, params)

    def batch_fn(theta, n, rng):
        return sinh_arcsinh(_ma2_batch(theta, n, rng, length), params)

    return SimulatorModel(
        name="ma2",
        param_names=("theta1", "theta2"),
        simulate=lambda theta, rng: ma2_simulate(theta, rng, length),
        summarize=summarize,
        prior=triangle_prior(),
        transform=identity_transform(),
        d=length,
        true_params=TRUE_PARAMS.copy(),
        batch_fn=batch_fn,
    )
