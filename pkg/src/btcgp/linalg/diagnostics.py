"""Dense positive-definiteness diagnostics.

These helpers materialise dense matrices and are meant for certificates and
validity checks on moderate sizes, never for the training hot path.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, eigvalsh

from btcgp.linalg.banded import BandedSymMatrix, to_dense


class PdVerdict(NamedTuple):
    pd: bool
    lambda_min: float


def min_eigenvalue(A: np.ndarray) -> float:
    """Smallest eigenvalue of a dense symmetric matrix."""

    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return float("inf")
    return float(eigvalsh(A, subset_by_index=[0, 0])[0])


def pd_verdict(A: np.ndarray) -> PdVerdict:
    """PD if the smallest eigenvalue is positive and a Cholesky attempt succeeds."""

    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return PdVerdict(pd=True, lambda_min=float("inf"))
    lam = min_eigenvalue(A)
    if not lam > 0:
        return PdVerdict(pd=False, lambda_min=lam)
    try:
        cho_factor(A, lower=True, check_finite=True)
    except LinAlgError:
        return PdVerdict(pd=False, lambda_min=lam)
    return PdVerdict(pd=True, lambda_min=lam)


def gershgorin_cutoff_margin(A: np.ndarray, k: int) -> float:
    """``lambda_min(A) - max_i sum_{|i-j|>k} |A_ij|``.

    A positive margin certifies that the cut-off matrix ``L_k(A)`` is positive
    definite.
    """

    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    offsets = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    excluded = np.where(offsets > k, np.abs(A), 0.0)
    return min_eigenvalue(A) - float(excluded.sum(axis=1).max(initial=0.0))


def joint_prior_pd(prior: BandedSymMatrix, K_fs: np.ndarray, K_ss: np.ndarray) -> PdVerdict:
    """Verdict on the block matrix ``[[prior, K_fs], [K_fs^T, K_ss]]``."""

    K_fs = np.asarray(K_fs, dtype=float)
    K_ss = np.asarray(K_ss, dtype=float)
    joint = np.block([[to_dense(prior), K_fs], [K_fs.T, K_ss]])
    return pd_verdict(joint)
