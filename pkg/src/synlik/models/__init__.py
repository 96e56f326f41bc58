"""The benchmark simulator models and their statistic transformations."""

from .base import SimulatorModel, uniform_box_prior
from .boombust import boombust_model, boombust_simulate, boombust_summaries
from .ma2 import ma2_exact_loglike, ma2_model, ma2_simulate, triangle_prior
from .mg1 import mg1_model, mg1_simulate
from .stereo import gpd_sample, stereo_model, stereo_simulate, stereo_summarize
from .toads import fit_auxiliary, stable_sample, toads_model, toads_simulate
from .transforms import (
    SinhArcsinhParams,
    power_transform,
    sinh_arcsinh,
    sinh_arcsinh_inverse,
    sinh_arcsinh_log_jacobian,
    transformed_gaussian_exact_loglike,
)

__all__ = [
    "SimulatorModel",
    "uniform_box_prior",
    "boombust_model",
    "boombust_simulate",
    "boombust_summaries",
    "ma2_exact_loglike",
    "ma2_model",
    "ma2_simulate",
    "triangle_prior",
    "mg1_model",
    "mg1_simulate",
    "gpd_sample",
    "stereo_model",
    "stereo_simulate",
    "stereo_summarize",
    "fit_auxiliary",
    "stable_sample",
    "toads_model",
    "toads_simulate",
    "SinhArcsinhParams",
    "power_transform",
    "sinh_arcsinh",
    "sinh_arcsinh_inverse",
    "sinh_arcsinh_log_jacobian",
    "transformed_gaussian_exact_loglike",
]
