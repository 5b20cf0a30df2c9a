"""Gaussian-process models."""

from .model import (
    FittedModel,
    PredictiveDistribution,
    add_observation_noise,
    check_joint_prior_pd,
    check_predictive_pd,
    fit_factor,
    nll_btc,
    nll_exact,
    predict,
    training_covariance,
)

__all__ = [
    "FittedModel",
    "PredictiveDistribution",
    "add_observation_noise",
    "check_joint_prior_pd",
    "check_predictive_pd",
    "fit_factor",
    "nll_btc",
    "nll_exact",
    "predict",
    "training_covariance",
]
