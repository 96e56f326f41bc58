"""Simple recruitment, boom and bust population model.

Poisson growth below the carrying threshold, binomial decline above it,
plus Poisson immigration noise. The statistic is the first four sample
moments of the path, of its differences, and of its ratios.
"""

import numpy as np

from .. import _core
from ..errors import OutOfSupport
from ..mcmc import componentwise_transform
from .base import SimulatorModel, uniform_box_prior

SERIES_LENGTH = 250
BURN_IN = 50
TRUE_PARAMS = np.array([0.4, 50.0, 0.09, 0.05])
PRIOR_BOX = ((0.0, 1.0), (10.0, 80.0), (0.0, 1.0), (0.0, 1.0))


def _check_support(theta):
    r, kappa, alpha, beta = theta
    if not (0.0 <= r and kappa > 0.0 and 0.0 <= alpha <= 1.0 and beta >= 0.0):
        raise OutOfSupport(f"boom-bust parameter {theta} invalid")


def boombust_simulate(theta, rng, length=SERIES_LENGTH, burn_in=BURN_IN,
                      n0=None):
    """Integer population path of `length` steps after burn-in.

    Starts at round(kappa) unless n0 is given, so both regimes are
    reachable quickly.
    """
    _check_support(theta)
    r, kappa, alpha, beta = theta
    if n0 is None:
        n0 = int(round(kappa))
    uniforms = rng.random((length + burn_in, 2))
    path = _core.boombust_path(np.ascontiguousarray(uniforms), int(n0),
                               float(r), float(kappa), float(alpha), float(beta))
    return path[burn_in:]


def _moments(x):
    """Mean, variance, skewness, kurtosis (population denominators).

    Skewness and kurtosis of a constant vector are defined as 0.
    """
    x = np.asarray(x, dtype=float)
    mean = x.mean()
    centered = x - mean
    m2 = (centered ** 2).mean()
    if m2 < 1e-300:
        return np.array([mean, 0.0, 0.0, 0.0])
    m3 = (centered ** 3).mean()
    m4 = (centered ** 4).mean()
    return np.array([mean, m2, m3 / m2 ** 1.5, m4 / m2 ** 2])


def boombust_summaries(x):
    """12 summaries: moments of x, its differences, and its guarded ratios."""
    x = np.asarray(x, dtype=float)
    diffs = np.diff(x)
    prev, cur = x[:-1], x[1:]
    safe_prev = np.where(prev == 0.0, 1.0, prev)
    ratios = np.where(prev == 0.0, (cur + 1.0) / (prev + 1.0), cur / safe_prev)
    return np.concatenate([_moments(x), _moments(diffs), _moments(ratios)])


def _moments_rows(x):
    """Row-wise version of _moments for an (n, length) matrix."""
    mean = x.mean(axis=1)
    centered = x - mean[:, None]
    c2 = centered * centered
    m2 = c2.mean(axis=1)
    safe = np.where(m2 < 1e-300, 1.0, m2)
    m3 = (c2 * centered).mean(axis=1)
    m4 = (c2 * c2).mean(axis=1)
    skew = np.where(m2 < 1e-300, 0.0, m3 / (safe * np.sqrt(safe)))
    kurt = np.where(m2 < 1e-300, 0.0, m4 / (safe * safe))
    return np.stack([mean, np.where(m2 < 1e-300, 0.0, m2), skew, kurt],
                    axis=1)


def _boombust_batch(theta, n, rng, length=SERIES_LENGTH, burn_in=BURN_IN):
    """(n, 12) summary matrix; the batch consumes the uniform stream in
    the same order as n sequential boombust_simulate calls."""
    _check_support(theta)
    r, kappa, alpha, beta = theta
    n0 = int(round(kappa))
    uniforms = rng.random((n, length + burn_in, 2))
    paths = np.stack([
        _core.boombust_path(np.ascontiguousarray(uniforms[i]), n0,
                            float(r), float(kappa), float(alpha), float(beta))
        for i in range(n)
    ]).astype(float)[:, burn_in:]

    diffs = np.diff(paths, axis=1)
    prev, cur = paths[:, :-1], paths[:, 1:]
    safe_prev = np.where(prev == 0.0, 1.0, prev)
    ratios = np.where(prev == 0.0, (cur + 1.0) / (prev + 1.0), cur / safe_prev)
    return np.concatenate([_moments_rows(paths), _moments_rows(diffs),
                           _moments_rows(ratios)], axis=1)


def boombust_model(length=SERIES_LENGTH, burn_in=BURN_IN):
    return SimulatorModel(
        name="boombust",
        param_names=("r", "kappa", "alpha", "beta"),
        simulate=lambda theta, rng: boombust_simulate(theta, rng, length, burn_in),
        summarize=boombust_summaries,
        prior=uniform_box_prior(PRIOR_BOX),
        transform=componentwise_transform(
            [("logit", lo, hi) for lo, hi in PRIOR_BOX]),
        d=12,
        true_params=TRUE_PARAMS.copy(),
        batch_fn=lambda theta, n, rng: _boombust_batch(theta, n, rng,
                                                       length, burn_in),
    )
