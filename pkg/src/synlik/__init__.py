"""Likelihood-free Bayesian inference with synthetic likelihoods.

Gaussian and semi-parametric (KDE marginals + Gaussian copula with rank
correlation) summary-statistic likelihood estimators, random-walk MCMC
drivers, a reference ABC sampler, benchmark simulator models, and
posterior-accuracy diagnostics.
"""

from ._core import BACKEND
from .estimators import (
    CorrelationMatrix,
    GaussianSLParams,
    KdeMarginal,
    LogLikelihoodEstimate,
    StatisticBatch,
    fit_gaussian_sl,
    fit_kde_marginal,
    gaussian_rank_correlation,
    gaussian_sl_logdensity,
    kde_cdf,
    kde_pdf,
    semibsl_logdensity,
    silverman_bandwidth,
    tune_shrinkage,
    warton_shrink,
)
from .mcmc import (
    Chain,
    EstimatorSpec,
    ParameterTransform,
    Prior,
    ProposalSpec,
    componentwise_transform,
    effective_sample_size,
    identity_transform,
    run_mcmc_abc,
    run_mcmc_sl,
)
from .diagnostics import (
    GridDensity,
    chain_marginal_mass,
    chain_to_grid,
    estimator_bias_std_study,
    exact_ma2_posterior_grid,
    total_variation,
)

__version__ = "0.1.0"
