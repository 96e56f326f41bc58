"""Stereological extremes: ellipsoidal inclusions cut by a random plane.

Inclusion count is Poisson(lam); the largest principal diameter exceeds
the threshold NU0 by a generalised Pareto excess. A planar section of
each inclusion is drawn with the sphere-model chord fraction and scaled
by the two minor-axis fractions; sections below the threshold are not
observed. Summaries: observed count, log min, log mean, log max of the
section diameters.
"""

import numpy as np

from ..errors import DegenerateSample, OutOfSupport
from ..mcmc import componentwise_transform
from .base import SimulatorModel, uniform_box_prior

NU0 = 5.0
TRUE_PARAMS = np.array([100.0, 1.5, 0.1])
PRIOR_BOX = ((30.0, 200.0), (0.0, 15.0), (-3.0, 3.0))


def gpd_sample(sigma, xi, u):
    """Inverse-CDF generalised Pareto excess for uniforms u."""
    u = np.asarray(u, dtype=float)
    if abs(xi) < 1e-12:
        return -sigma * np.log1p(-u)
    return sigma / xi * ((1.0 - u) ** (-xi) - 1.0)


def _check_support(theta):
    lam, sigma, xi = theta
    if not (lam > 0.0 and sigma > 0.0):
        raise OutOfSupport(f"stereological parameter {theta} invalid")


def stereo_simulate(theta, rng):
    """Observed cross-section diameters (variable length, possibly empty)."""
    _check_support(theta)
    lam, sigma, xi = theta
    count = rng.poisson(lam)
    if count == 0:
        return np.empty(0)
    v3 = NU0 + gpd_sample(sigma, xi, rng.uniform(size=count))
    u1 = rng.uniform(size=count)
    u2 = rng.uniform(size=count)
    # Sphere-model section fraction, scaled by the larger minor-axis
    # fraction: the largest in-plane principal diameter.
    chord = np.sqrt(1.0 - rng.uniform(size=count) ** 2)
    sections = np.maximum(u1, u2) * v3 * chord
    return sections[sections >= NU0]


def stereo_summarize(sections):
    sections = np.asarray(sections, dtype=float)
    if sections.size == 0:
        raise DegenerateSample("no observed cross-sections")
    return np.array([
        float(sections.size),
        np.log(sections.min()),
        np.log(sections.mean()),
        np.log(sections.max()),
    ])


def _stereo_batch(theta, n, rng):
    return np.stack([stereo_summarize(stereo_simulate(theta, rng))
                     for _ in range(n)])


def stereo_model():
    return SimulatorModel(
        name="stereo",
        param_names=("lambda", "sigma", "xi"),
        simulate=stereo_simulate,
        summarize=stereo_summarize,
        prior=uniform_box_prior(PRIOR_BOX),
        transform=componentwise_transform(
            [("logit", lo, hi) for lo, hi in PRIOR_BOX]),
        d=4,
        true_params=TRUE_PARAMS.copy(),
        batch_fn=_stereo_batch,
    )
