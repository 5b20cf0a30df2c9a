"""Cross-validation splits and synthetic GP data."""

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg.lapack import get_lapack_funcs

from btcgp.config import DEFAULT_SAMPLE_LIMIT, SAMPLE_JITTER
from btcgp.data.series import Dataset1D, equispaced_inputs
from btcgp.errors import InputError, NotPositiveDefinite, TooFewPoints, TooLargeForDenseCheck
from btcgp.gp.model import training_covariance
from btcgp.kernels.se import clamp_bandwidth, gram_dense, min_spacing, theoretical_bandwidth
from btcgp.linalg.banded import cholesky_banded, factor_matvec
from btcgp.models import SeHyperParams, SyntheticSpec

logger = logging.getLogger(__name__)

Split = Tuple[np.ndarray, np.ndarray]


def kfold_split(n: int, folds: int, seed: int) -> List[Split]:
    """Seeded shuffle cut into ``folds`` contiguous blocks.

    Returns ``(train, test)`` index pairs, each sorted.  Leftover points go to
    the first folds.
    """

    if folds < 2:
        raise InputError(f"folds must be at least 2, got {folds}")
    if n < folds:
        raise TooFewPoints(n, folds)
    order = np.random.default_rng(seed).permutation(n)
    blocks = np.array_split(order, folds)
    splits: List[Split] = []
    for i, block in enumerate(blocks):
        train = np.concatenate([other for j, other in enumerate(blocks) if j != i])
        splits.append((np.sort(train), np.sort(block)))
    return splits


def sample_gp(
    x: np.ndarray, params: SeHyperParams, seed: int, limit: int = DEFAULT_SAMPLE_LIMIT
) -> np.ndarray:
    """``y = L z + sn w`` with ``L`` the dense Cholesky factor of the jittered Gram."""

    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    if n > limit:
        raise TooLargeForDenseCheck(n, limit)
    K = gram_dense(x, x, params)
    K[np.diag_indices_from(K)] += SAMPLE_JITTER * params.signal_var
    (potrf,) = get_lapack_funcs(("potrf",), (K,))
    L, info = potrf(K, lower=1, overwrite_a=1)
    if info > 0:
        raise NotPositiveDefinite(pivot_index=int(info) - 1)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n)
    w = rng.standard_normal(n)
    return L @ z + np.sqrt(params.noise_var) * w


def sample_gp_banded(x: np.ndarray, params: SeHyperParams, seed: int, k: Optional[int] = None) -> np.ndarray:
    """Draw from ``N(0, L_k(K) + sn I)`` through the banded factor.

    Noise is part of the banded covariance, so this is an approximate sample
    usable at sizes where the dense factor does not fit.  ``k`` defaults to
    the theoretical bandwidth for ``params``.
    """

    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    if k is None:
        k = clamp_bandwidth(theoretical_bandwidth(params, min_spacing(x)), n)
    factor = cholesky_banded(training_covariance(params, x, k))
    z = np.random.default_rng(seed).standard_normal(n)
    return factor_matvec(factor, z)


def synthetic_dataset(spec: SyntheticSpec, seed: int, limit: int = DEFAULT_SAMPLE_LIMIT) -> Dataset1D:
    """Equispaced inputs from 0 with a GP realisation on top."""

    x = equispaced_inputs(spec.n, spec.delta)
    seed = spec.seed if spec.seed is not None else seed
    if spec.n <= limit:
        y = sample_gp(x, spec.params, seed, limit)
    else:
        logger.warning("n=%d exceeds the dense sampling limit %d; sampling the banded prior", spec.n, limit)
        y = sample_gp_banded(x, spec.params, seed)
    return Dataset1D.from_arrays(x, y)
