"""Shipped observed datasets and model construction by id.

The raw observed data for each model is generated once at the true
parameters with a fixed seed (see data/observed.ini) and shipped as CSV.
`build_model` turns a model id plus statistic-transformation options
into a ready SimulatorModel and the observed statistic vector.
"""

from importlib import resources

import numpy as np

from .models import (boombust_model, ma2_model, mg1_model, stereo_model,
                     toads_model)

MODEL_IDS = ("ma2", "mg1", "stereo", "toads", "boombust")


def data_path(name):
    return resources.files("synlik") / "data" / name


def load_observed(model_id):
    """Raw observed dataset for a model id, as shipped."""
    if model_id not in MODEL_IDS:
        raise ValueError(f"unknown model id {model_id!r}")
    raw = np.loadtxt(str(data_path(f"{model_id}_observed.csv")),
                     delimiter=",", ndmin=1)
    return raw


def build_model(model_id, epsilon=0.0, delta=1.0, power=1.0):
    """(model, observed_statistic) for a model id.

    epsilon/delta feed the sinh-arcsinh statistic map (ma2 only);
    power sharpens the score statistic (toads only).
    """
    raw = load_observed(model_id)
    if model_id == "ma2":
        model = ma2_model(epsilon=epsilon, delta=delta)
    elif model_id == "mg1":
        model = mg1_model()
    elif model_id == "stereo":
        model = stereo_model()
    elif model_id == "toads":
        model = toads_model(raw, power=power)
    elif model_id == "boombust":
        model = boombust_model()
    else:
        raise ValueError(f"unknown model id {model_id!r}")
    return model, model.summarize(raw)
