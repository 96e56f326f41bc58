"""Exception types raised by the estimators, samplers and simulators."""


class SynlikError(Exception):
    """Base class for all package errors."""


class DegenerateCovariance(SynlikError):
    """A statistic column has (numerically) zero variance."""


class SingularCovariance(SynlikError):
    """Covariance Cholesky failed even after the jitter policy."""


class SingularCorrelation(SynlikError):
    """Copula correlation Cholesky failed even after the jitter policy."""


class ZeroDispersion(SynlikError):
    """KDE bandwidth is undefined: both sigma and IQR are zero."""


class NoFeasibleLambda(SynlikError):
    """No shrinkage level on the grid meets the target estimator noise."""


class OutOfSupport(SynlikError):
    """Simulator called with a parameter outside its support."""


class DegenerateSample(SynlikError):
    """A simulated dataset is empty so its summary statistic is undefined."""


class GmmFitFailure(SynlikError):
    """The auxiliary Gaussian mixture could not be fitted to the observed data."""


class InitializationFailure(SynlikError):
    """The MCMC start point gave a -inf likelihood estimate on every retry."""


class EmptyChain(SynlikError):
    """A chain operation was asked to run on too few draws."""


class GridMismatch(SynlikError):
    """Two grid densities do not share the same axes."""
