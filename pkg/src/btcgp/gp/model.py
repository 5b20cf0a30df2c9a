"""Exact and banded (BTC) Gaussian-process losses and predictions.

Both modes share one code path: the training covariance is assembled in band
storage as ``L_k(K) + noise_var * I`` and factored with the banded Cholesky.
Exact mode is the special case ``k = n - 1``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from btcgp.config import DEFAULT_DENSE_CHECK_LIMIT
from btcgp.data.series import Dataset1D
from btcgp.errors import AlreadyNoised, BandwidthOutOfRange, InputError, TooLargeForDenseCheck
from btcgp.kernels.se import gram_banded, gram_dense
from btcgp.linalg.banded import (
    BandedCholeskyFactor,
    BandedSymMatrix,
    add_diagonal,
    cholesky_banded,
    logdet_banded,
    quad_form,
    solve_banded,
)
from btcgp.linalg.diagnostics import PdVerdict, joint_prior_pd, pd_verdict
from btcgp.models import FitMode, SeHyperParams

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)


def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class PredictiveDistribution:
    """Gaussian over the latent (or, once noised, observed) values at test inputs."""

    mean: np.ndarray
    cov: np.ndarray
    includes_noise: bool = False

    def __post_init__(self) -> None:
        mean = _readonly(np.asarray(self.mean, dtype=float).ravel())
        cov = _readonly(np.asarray(self.cov, dtype=float).reshape(mean.shape[0], mean.shape[0]))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def empty(cls) -> "PredictiveDistribution":
        return cls(mean=np.zeros(0), cov=np.zeros((0, 0)))

    @property
    def n(self) -> int:
        return int(self.mean.shape[0])

    @property
    def variance(self) -> np.ndarray:
        return np.diag(self.cov).copy()

    def marginal(self, indices: Sequence[int]) -> "PredictiveDistribution":
        indices = np.asarray(indices, dtype=int)
        return PredictiveDistribution(
            mean=self.mean[indices],
            cov=self.cov[np.ix_(indices, indices)],
            includes_noise=self.includes_noise,
        )


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Training data, hyperparameters and the matching banded factor.

    Instances are immutable; :meth:`refit` produces a new model with a fresh
    factorisation.
    """

    params: SeHyperParams
    train: Dataset1D
    mode: FitMode
    bandwidth: int
    factor: BandedCholeskyFactor

    @cached_property
    def alpha(self) -> np.ndarray:
        """``(L_k(K) + noise_var * I)^{-1} y``"""
        return _readonly(solve_banded(self.factor, self.train.y))

    @property
    def n(self) -> int:
        return self.train.n

    def loss(self) -> float:
        """Negative log marginal likelihood from the cached factor."""
        return _nll_from_factor(self.factor, self.train.y)

    def refit(self, params: SeHyperParams) -> "FittedModel":
        return fit_factor(params, self.train, self.mode, self.bandwidth)


def _nll_from_factor(factor: BandedCholeskyFactor, y: np.ndarray) -> float:
    return 0.5 * quad_form(factor, y) + 0.5 * logdet_banded(factor) + 0.5 * factor.n * LOG_2PI


def training_covariance(params: SeHyperParams, x: np.ndarray, k: int) -> BandedSymMatrix:
    """``L_k(K(x, x)) + noise_var * I`` in band storage."""
    return add_diagonal(gram_banded(x, params, k), params.noise_var)


def fit_factor(
    params: SeHyperParams,
    data: Dataset1D,
    mode: FitMode,
    k: Optional[int] = None,
) -> FittedModel:
    """Factor the training covariance for ``params``.

    Exact mode always uses ``k = n - 1``; BTC mode needs ``0 <= k <= n - 1``.
    Raises :class:`~btcgp.errors.NotPositiveDefinite` when the cut-off
    covariance is indefinite.
    """

    mode = FitMode(mode)
    if mode == FitMode.EXACT:
        k = data.n - 1
    elif k is None or not 0 <= k <= data.n - 1:
        raise BandwidthOutOfRange(-1 if k is None else k, data.n)

    factor = cholesky_banded(training_covariance(params, data.x, k))
    return FittedModel(params=params, train=data, mode=mode, bandwidth=int(k), factor=factor)


def nll_exact(params: SeHyperParams, data: Dataset1D) -> float:
    return fit_factor(params, data, FitMode.EXACT).loss()


def nll_btc(params: SeHyperParams, data: Dataset1D, k: int) -> float:
    return fit_factor(params, data, FitMode.BTC, k).loss()


def predict(model: FittedModel, x_star: np.ndarray) -> PredictiveDistribution:
    """Predictive mean and covariance of the latent function at ``x_star``.

    The cross-covariance is dense; only the training block is banded.
    """

    x_star = np.asarray(x_star, dtype=float).ravel()
    if not np.isfinite(x_star).all():
        raise InputError("test inputs must be finite")
    if x_star.shape[0] == 0:
        return PredictiveDistribution.empty()

    K_sf = gram_dense(x_star, model.train.x, model.params)
    mean = K_sf @ model.alpha
    V = solve_banded(model.factor, K_sf.T)
    cov = gram_dense(x_star, x_star, model.params) - K_sf @ V
    cov = 0.5 * (cov + cov.T)
    return PredictiveDistribution(mean=mean, cov=cov, includes_noise=False)


def add_observation_noise(dist: PredictiveDistribution, noise_var: float) -> PredictiveDistribution:
    if dist.includes_noise:
        raise AlreadyNoised("predictive covariance already includes observation noise")
    if not noise_var >= 0:
        raise InputError(f"noise variance must be non-negative, got {noise_var}")
    cov = np.array(dist.cov, copy=True)
    cov[np.diag_indices_from(cov)] += noise_var
    return PredictiveDistribution(mean=dist.mean, cov=cov, includes_noise=True)


def check_predictive_pd(
    dist: PredictiveDistribution, limit: int = DEFAULT_DENSE_CHECK_LIMIT
) -> PdVerdict:
    """Dense eigenvalue and Cholesky verdict on the predictive covariance."""

    if dist.n > limit:
        raise TooLargeForDenseCheck(dist.n, limit)
    return pd_verdict(dist.cov)


def check_joint_prior_pd(
    model: FittedModel, x_star: np.ndarray, limit: int = DEFAULT_DENSE_CHECK_LIMIT
) -> PdVerdict:
    """Verdict on the approximate joint prior of training and test values.

    Its positive definiteness is equivalent to that of the BTC predictive
    covariance at ``x_star``.
    """

    x_star = np.asarray(x_star, dtype=float).ravel()
    size = model.n + x_star.shape[0]
    if size > limit:
        raise TooLargeForDenseCheck(size, limit)
    prior = training_covariance(model.params, model.train.x, model.bandwidth)
    K_fs = gram_dense(model.train.x, x_star, model.params)
    K_ss = gram_dense(x_star, x_star, model.params)
    return joint_prior_pd(prior, K_fs, K_ss)
