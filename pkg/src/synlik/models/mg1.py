"""M/G/1 queue: uniform service, exponential arrivals, log inter-departures."""

import numpy as np

from ..errors import OutOfSupport
from ..mcmc import Prior, componentwise_transform, ParameterTransform
from .base import SimulatorModel

N_CUSTOMERS = 51  # 50 inter-departure times
TRUE_PARAMS = np.array([1.0, 5.0, 0.2])

# Uniform prior boxes on (theta1, theta2 - theta1, theta3)
_BOX = ((0.0, 10.0), (0.0, 10.0), (0.0, 0.5))


def _check_support(theta):
    t1, t2, t3 = theta
    if not (0.0 < t1 < t2 and t3 > 0.0):
        raise OutOfSupport(f"M/G/1 parameter {theta} invalid")


def mg1_simulate(theta, rng, customers=N_CUSTOMERS):
    """Log inter-departure times of a FIFO single-server queue."""
    _check_support(theta)
    t1, t2, t3 = theta
    arrivals = np.cumsum(rng.exponential(1.0 / t3, customers))
    services = rng.uniform(t1, t2, customers)
    departures = np.empty(customers)
    previous = 0.0
    for i in range(customers):
        previous = max(arrivals[i], previous) + services[i]
        departures[i] = previous
    return np.log(np.diff(departures))


def _mg1_batch(theta, n, rng, customers=N_CUSTOMERS):
    _check_support(theta)
    t1, t2, t3 = theta
    arrivals = np.cumsum(rng.exponential(1.0 / t3, (n, customers)), axis=1)
    services = rng.uniform(t1, t2, (n, customers))
    departures = np.empty((n, customers))
    previous = np.zeros(n)
    for i in range(customers):
        previous = np.maximum(arrivals[:, i], previous) + services[:, i]
        departures[:, i] = previous
    return np.log(np.diff(departures, axis=1))


def mg1_prior():
    def logdensity(theta):
        t1, t2, t3 = theta
        for value, (lo, hi) in zip((t1, t2 - t1, t3), _BOX):
            if not lo < value < hi:
                return -np.inf
        return 0.0

    return Prior(logdensity)


def mg1_transform():
    """Scaled logits on (theta1, theta2 - theta1, theta3); the reparam
    (t1, t2, t3) -> (t1, t2 - t1, t3) has unit Jacobian."""
    inner = componentwise_transform([("logit", lo, hi) for lo, hi in _BOX])

    def forward(theta):
        t1, t2, t3 = theta
        return inner.forward(np.array([t1, t2 - t1, t3]))

    def inverse(z):
        t1, gap, t3 = inner.inverse(z)
        return np.array([t1, t1 + gap, t3])

    return ParameterTransform(forward, inverse, inner.log_jacobian)


def mg1_model(customers=N_CUSTOMERS):
    return SimulatorModel(
        name="mg1",
        param_names=("theta1", "theta2", "theta3"),
        simulate=lambda theta, rng: mg1_simulate(theta, rng, customers),
        summarize=lambda raw: raw,  # raw dataset is already the statistic
        prior=mg1_prior(),
        transform=mg1_transform(),
        d=customers - 1,
        true_params=TRUE_PARAMS.copy(),
        batch_fn=_mg1_batch,
    )
