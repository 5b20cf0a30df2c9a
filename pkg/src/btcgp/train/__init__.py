"""Hyperparameter training."""

from .gradients import loss_gradient_fd
from .optimiser import TrainResult, fit, init_hyperparams, resolve_bandwidth

__all__ = ["TrainResult", "fit", "init_hyperparams", "loss_gradient_fd", "resolve_bandwidth"]
