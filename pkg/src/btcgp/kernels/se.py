"""Squared-exponential kernel, Gram construction and bandwidth selection.

For sorted inputs with minimum spacing ``delta`` the cut-off Gram matrix
``L_k(K) + noise_var * I`` is guaranteed positive definite once every
excluded entry falls below

    eps = noise_var * 3 delta^2 / (4 l^2) * exp(-3 delta^2 / (2 l^2)),

and :func:`theoretical_bandwidth` gives the smallest ``k`` meeting that
condition on an equispaced grid.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, NamedTuple, Optional, Union

import numpy as np

from btcgp.errors import BandwidthOutOfRange, DuplicatePoints, InputError, TooFewPoints
from btcgp.linalg.banded import BandedSymMatrix
from btcgp.models import SeHyperParams

if TYPE_CHECKING:  # pragma: no cover
    from btcgp.data.series import Dataset1D

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class BandwidthCase(NamedTuple):
    name: str
    signal_var: float
    lengthscale: float
    noise_var: float
    delta: float
    k: int

    @property
    def params(self) -> SeHyperParams:
        return SeHyperParams(
            signal_var=self.signal_var, lengthscale=self.lengthscale, noise_var=self.noise_var
        )


# Published reference configurations and their bandwidths.
REFERENCE_CASES = (
    BandwidthCase("a", 5.0, 1.0, 0.10, 0.2, 19),
    BandwidthCase("b", 1.0, 0.75, 0.01, 0.1, 31),
    BandwidthCase("c", 0.8, 2.0, 0.05, 0.2, 38),
)


def se_kernel(tau: ArrayLike, params: SeHyperParams) -> ArrayLike:
    """``s2 * exp(-tau^2 / (2 l^2))``, elementwise for arrays."""

    scaled = np.asarray(tau, dtype=float) / params.lengthscale
    value = params.signal_var * np.exp(-0.5 * (scaled * scaled))
    return float(value) if np.ndim(value) == 0 else value


def gram_dense(x: np.ndarray, x2: np.ndarray, params: SeHyperParams) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if not (np.isfinite(x).all() and np.isfinite(x2).all()):
        raise InputError("kernel inputs must be finite")
    tau = np.abs(np.subtract.outer(x, x2))
    return np.asarray(se_kernel(tau, params), dtype=float).reshape(x.shape[0], x2.shape[0])


def gram_banded(x: np.ndarray, params: SeHyperParams, k: int) -> BandedSymMatrix:
    """``L_k(K(x, x))`` built diagonal by diagonal with O(n k) kernel evaluations."""

    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    if not 0 <= k <= n - 1:
        raise BandwidthOutOfRange(k, n)
    band = np.zeros((k + 1, n))
    for d in range(k + 1):
        tau = np.abs(x[d:] - x[: n - d])
        band[d, : n - d] = se_kernel(tau, params)
    return BandedSymMatrix(n=n, k=k, band=band)


def min_spacing(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] < 2:
        raise TooFewPoints(x.shape[0], 2)
    gaps = np.diff(x)
    bad = np.where(~(gaps > 0))[0]
    if bad.size:
        index = int(bad[0])
        raise DuplicatePoints(index, float(gaps[index]))
    return float(gaps.min())


def effective_spacing(x: np.ndarray, quantile: Optional[float] = None) -> float:
    """Spacing fed to the bandwidth formula.

    ``quantile=None`` returns the true minimum gap.  A quantile in (0, 1) of
    the adjacent gaps gives a smaller bandwidth on irregular inputs but voids
    the positive-definiteness guarantee.
    """

    delta = min_spacing(x)
    if quantile is None:
        return delta
    if not 0.0 < quantile < 1.0:
        raise InputError(f"spacing quantile must lie in (0, 1), got {quantile}")
    spacing = float(np.quantile(np.diff(np.asarray(x, dtype=float).ravel()), quantile))
    logger.warning(
        "using the %.3g quantile of input gaps (%.6g) instead of the minimum gap (%.6g); "
        "positive definiteness is no longer guaranteed",
        quantile,
        spacing,
        delta,
    )
    return spacing


def bandwidth_ratio(params: SeHyperParams, delta: float) -> float:
    """``2 s2 l^2 / (3 sn2 delta^2)``; the log-branch applies when it exceeds 1."""

    ell2 = params.lengthscale**2
    return 2.0 * params.signal_var * ell2 / (3.0 * params.noise_var * delta**2)


def theoretical_bandwidth(params: SeHyperParams, delta: float) -> int:
    """Smallest bandwidth keeping every excluded Gram entry under the PD bound.

    Not clamped to ``n - 1``; see :func:`clamp_bandwidth`.
    """

    if not (math.isfinite(delta) and delta > 0):
        raise InputError(f"spacing must be positive and finite, got {delta}")
    ratio = bandwidth_ratio(params, delta)
    if ratio <= 1.0:
        return 2
    ell2 = params.lengthscale**2
    value = math.sqrt(1.5 + (2.0 * ell2 / delta**2) * math.log(ratio))
    return max(2, int(math.ceil(value)))


def clamp_bandwidth(k: int, n: int) -> int:
    if n < 1:
        raise TooFewPoints(n, 1)
    if k > n - 1:
        logger.warning("bandwidth %d clamped to n - 1 = %d", k, n - 1)
        return n - 1
    return max(int(k), 0)


def cutoff_pd_bound(params: SeHyperParams, delta: float) -> float:
    """Largest excluded Gram entry that still guarantees positive definiteness."""

    r = delta**2 / params.lengthscale**2
    return params.noise_var * 0.75 * r * math.exp(-1.5 * r)


def cutoff_pd_margin(x: np.ndarray, params: SeHyperParams, k: int) -> float:
    """Bound minus the largest entry cut off at bandwidth ``k``.

    Non-negative values certify that ``L_k(K) + noise_var * I`` is positive
    definite.
    """

    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    delta = min_spacing(x)
    if not 0 <= k <= n - 1:
        raise BandwidthOutOfRange(k, n)
    bound = cutoff_pd_bound(params, delta)
    if k == n - 1:
        return bound
    # the kernel decays with distance, so the nearest excluded pair dominates
    nearest = float(np.min(x[k + 1:] - x[: n - k - 1]))
    return bound - float(se_kernel(nearest, params))


def thin_to_spacing(data: "Dataset1D", delta_min: float) -> "Dataset1D":
    """Greedy left-to-right subset with all adjacent gaps at least ``delta_min``."""

    if not delta_min > 0:
        raise InputError(f"delta_min must be positive, got {delta_min}")
    keep = [0]
    last = data.x[0]
    for index in range(1, data.n):
        if data.x[index] - last >= delta_min:
            keep.append(index)
            last = data.x[index]
    if len(keep) == data.n:
        return data
    logger.info("thinned %d points to %d with spacing >= %g", data.n, len(keep), delta_min)
    return data.subset(keep)
