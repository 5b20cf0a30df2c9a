"""Predictive accuracy metrics."""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_solve
from scipy.linalg.lapack import get_lapack_funcs

from btcgp.errors import ConstantTarget, DimensionMismatch, InputError, NotPositiveDefinite
from btcgp.gp.model import PredictiveDistribution

LOG_2PI = math.log(2.0 * math.pi)


def _targets(dist: PredictiveDistribution, y_star: np.ndarray) -> np.ndarray:
    y_star = np.asarray(y_star, dtype=float).ravel()
    if y_star.shape[0] != dist.n:
        raise DimensionMismatch(expected=dist.n, got=y_star.shape[0], what="targets")
    return y_star


def nmse(y_star: np.ndarray, mu_star: np.ndarray) -> float:
    """Mean squared error over the variance of ``y_star`` about its own mean."""

    y_star = np.asarray(y_star, dtype=float).ravel()
    mu_star = np.asarray(mu_star, dtype=float).ravel()
    if y_star.shape[0] != mu_star.shape[0]:
        raise DimensionMismatch(expected=y_star.shape[0], got=mu_star.shape[0], what="predictions")
    if y_star.shape[0] == 0:
        raise InputError("nmse needs at least one target")
    denominator = float(np.mean((y_star - y_star.mean()) ** 2))
    if denominator == 0.0:
        raise ConstantTarget("test targets are constant; NMSE is undefined")
    return float(np.mean((y_star - mu_star) ** 2)) / denominator


def nlpd(dist: PredictiveDistribution, y_star: np.ndarray, *, allow_noiseless: bool = False) -> float:
    """Joint negative log density of ``y_star`` under ``dist``."""

    if not (dist.includes_noise or allow_noiseless):
        raise InputError("nlpd expects a predictive that includes observation noise")
    y_star = _targets(dist, y_star)
    if dist.n == 0:
        return 0.0
    (potrf,) = get_lapack_funcs(("potrf",), (dist.cov,))
    chol, info = potrf(np.array(dist.cov, copy=True), lower=1)
    if info > 0:
        raise NotPositiveDefinite(pivot_index=int(info) - 1)
    residual = y_star - dist.mean
    alpha = cho_solve((chol, True), residual, check_finite=False)
    return float(0.5 * residual @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * dist.n * LOG_2PI)


def nlpd_mean(dist: PredictiveDistribution, y_star: np.ndarray) -> float:
    """Average of the per-point one-dimensional NLPDs."""

    y_star = _targets(dist, y_star)
    if dist.n == 0:
        return 0.0
    variance = dist.variance
    bad = np.where(~(variance > 0))[0]
    if bad.size:
        raise NotPositiveDefinite(pivot_index=int(bad[0]), pivot=float(variance[bad[0]]))
    residual = y_star - dist.mean
    per_point = 0.5 * (LOG_2PI + np.log(variance) + residual**2 / variance)
    return float(per_point.mean())
