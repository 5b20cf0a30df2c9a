"""Banded symmetric linear algebra."""

from .banded import (
    BandedCholeskyFactor,
    BandedSymMatrix,
    add_diagonal,
    band_from_dense,
    cholesky_banded,
    factor_matvec,
    logdet_banded,
    quad_form,
    solve_banded,
    to_dense,
)
from .diagnostics import PdVerdict, gershgorin_cutoff_margin, joint_prior_pd, min_eigenvalue, pd_verdict

__all__ = [
    "BandedCholeskyFactor",
    "BandedSymMatrix",
    "add_diagonal",
    "band_from_dense",
    "cholesky_banded",
    "factor_matvec",
    "logdet_banded",
    "quad_form",
    "solve_banded",
    "to_dense",
    "PdVerdict",
    "gershgorin_cutoff_margin",
    "joint_prior_pd",
    "min_eigenvalue",
    "pd_verdict",
]
