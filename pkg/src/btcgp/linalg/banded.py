"""Band-storage symmetric matrices and their Cholesky factorisation.

Storage follows LAPACK's lower band layout: ``band[d, i] = A[i + d, i]`` for
diagonal offset ``d`` in ``[0, k]`` and column ``i``.  Entries with
``i + d >= n`` are padding and are held at exactly zero.  The same layout is
used for the lower-triangular Cholesky factor, which has the same bandwidth as
the matrix it factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded
from scipy.linalg.lapack import get_lapack_funcs

from btcgp.config import PIVOT_FLOOR, SYMMETRY_TOL
from btcgp.errors import (
    AsymmetricInput,
    BandwidthOutOfRange,
    DimensionMismatch,
    InputError,
    NotPositiveDefinite,
)

__all__ = [
    "BandedSymMatrix",
    "BandedCholeskyFactor",
    "band_from_dense",
    "to_dense",
    "add_diagonal",
    "cholesky_banded",
    "solve_banded",
    "logdet_banded",
    "quad_form",
    "factor_matvec",
]


def _frozen_band(band: np.ndarray, n: int, k: int) -> np.ndarray:
    band = np.array(band, dtype=float, order="C", copy=True)
    if band.shape != (k + 1, n):
        raise DimensionMismatch(expected=k + 1, got=band.shape[0], what="band rows")
    for d in range(1, k + 1):
        padding = band[d, n - d:]
        if np.any(padding != 0.0):
            raise InputError(f"band row {d} has non-zero padding in its last {d} column(s)")
    band.setflags(write=False)
    return band


@dataclass(frozen=True, eq=False)
class BandedSymMatrix:
    """Symmetric ``n x n`` matrix with ``A[i, j] = 0`` for ``|i - j| > k``."""

    n: int
    k: int
    band: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"dimension must be positive, got {self.n}")
        if not 0 <= self.k <= self.n - 1:
            raise BandwidthOutOfRange(self.k, self.n)
        object.__setattr__(self, "band", _frozen_band(self.band, self.n, self.k))

    @property
    def diagonal(self) -> np.ndarray:
        return self.band[0]


@dataclass(frozen=True, eq=False)
class BandedCholeskyFactor:
    """Lower-triangular factor ``L`` with ``L @ L.T`` equal to the factored matrix."""

    n: int
    k: int
    band: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "band", _frozen_band(self.band, self.n, self.k))

    @property
    def diagonal(self) -> np.ndarray:
        return self.band[0]

    def to_dense(self) -> np.ndarray:
        """Dense lower-triangular ``L`` (tests and diagnostics only)."""
        dense = np.zeros((self.n, self.n))
        for d in range(self.k + 1):
            cols = np.arange(self.n - d)
            dense[cols + d, cols] = self.band[d, : self.n - d]
        return dense


def band_from_dense(A: np.ndarray, k: int) -> BandedSymMatrix:
    """Apply the cut-off operator ``L_k`` to a dense symmetric matrix."""

    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(expected=A.shape[0], got=A.shape[-1], what="columns")
    n = A.shape[0]
    if not 0 <= k <= n - 1:
        raise BandwidthOutOfRange(k, n)

    deviation = float(np.max(np.abs(A - A.T))) if n else 0.0
    if deviation > SYMMETRY_TOL:
        raise AsymmetricInput(deviation, SYMMETRY_TOL)

    band = np.zeros((k + 1, n))
    for d in range(k + 1):
        band[d, : n - d] = np.diagonal(A, offset=-d)
    return BandedSymMatrix(n=n, k=k, band=band)


def to_dense(B: BandedSymMatrix) -> np.ndarray:
    """Full symmetric matrix with zeros outside the band."""

    dense = np.zeros((B.n, B.n))
    for d in range(B.k + 1):
        cols = np.arange(B.n - d)
        values = B.band[d, : B.n - d]
        dense[cols + d, cols] = values
        dense[cols, cols + d] = values
    return dense


def add_diagonal(B: BandedSymMatrix, s: float) -> BandedSymMatrix:
    """Return ``B + s I``; off-diagonal entries and bandwidth are untouched."""

    if s < 0:
        raise InputError(f"diagonal shift must be non-negative, got {s}")
    if s == 0:
        return B
    band = np.array(B.band, copy=True)
    band[0] += s
    return BandedSymMatrix(n=B.n, k=B.k, band=band)


def cholesky_banded(B: BandedSymMatrix) -> BandedCholeskyFactor:
    """Factor ``B = L L^T`` in band storage at O(n k^2) cost, without pivoting.

    Raises :class:`NotPositiveDefinite` with the 0-based index of the first
    pivot that is non-positive, below ``PIVOT_FLOOR`` or non-finite.
    """

    finite = np.isfinite(B.band)
    if not finite.all():
        bad_cols = np.where(~finite.all(axis=0))[0]
        raise NotPositiveDefinite(pivot_index=int(bad_cols[0]), pivot=float("nan"))

    (pbtrf,) = get_lapack_funcs(("pbtrf",), (B.band,))
    factor, info = pbtrf(np.array(B.band, copy=True), lower=1, overwrite_ab=1)
    if info > 0:
        raise NotPositiveDefinite(pivot_index=int(info) - 1)
    if info < 0:  # pragma: no cover - LAPACK argument error
        raise InputError(f"illegal value in argument {-info} of pbtrf")

    pivots = factor[0] ** 2
    weak = np.where(~np.isfinite(pivots) | (pivots <= PIVOT_FLOOR))[0]
    if weak.size:
        index = int(weak[0])
        raise NotPositiveDefinite(pivot_index=index, pivot=float(pivots[index]))

    # pbtrf leaves the padding untouched; keep it exactly zero.
    for d in range(1, B.k + 1):
        factor[d, B.n - d:] = 0.0
    return BandedCholeskyFactor(n=B.n, k=B.k, band=factor)


def solve_banded(L: BandedCholeskyFactor, rhs: np.ndarray) -> np.ndarray:
    """Solve ``(L L^T) X = rhs`` for a vector or an ``n x m`` matrix."""

    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim == 0 or rhs.shape[0] != L.n:
        raise DimensionMismatch(expected=L.n, got=0 if rhs.ndim == 0 else rhs.shape[0])
    if rhs.size == 0:
        return np.zeros_like(rhs)
    return cho_solve_banded((L.band, True), rhs, check_finite=False)


def logdet_banded(L: BandedCholeskyFactor) -> float:
    """``log |L L^T| = 2 sum log L_ii``."""

    return float(2.0 * np.sum(np.log(L.diagonal)))


def quad_form(L: BandedCholeskyFactor, y: np.ndarray) -> float:
    """``y^T (L L^T)^{-1} y``; never negative."""

    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != L.n:
        raise DimensionMismatch(expected=L.n, got=y.shape[0] if y.ndim else 0)
    if not np.any(y):
        return 0.0
    value = float(y @ solve_banded(L, y))
    return max(value, 0.0)


def factor_matvec(L: BandedCholeskyFactor, z: np.ndarray) -> np.ndarray:
    """``L @ z`` touching only band entries (O(n k))."""

    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.shape[0] != L.n:
        raise DimensionMismatch(expected=L.n, got=z.shape[0] if z.ndim else 0)
    out = L.band[0] * z
    for d in range(1, L.k + 1):
        out[d:] += L.band[d, : L.n - d] * z[: L.n - d]
    return out
