"""Covariance kernels."""

from .se import (
    REFERENCE_CASES,
    BandwidthCase,
    clamp_bandwidth,
    effective_spacing,
    gram_banded,
    gram_dense,
    min_spacing,
    se_kernel,
    theoretical_bandwidth,
    thin_to_spacing,
    cutoff_pd_bound,
    cutoff_pd_margin,
)

__all__ = [
    "REFERENCE_CASES",
    "BandwidthCase",
    "clamp_bandwidth",
    "effective_spacing",
    "gram_banded",
    "gram_dense",
    "min_spacing",
    "se_kernel",
    "theoretical_bandwidth",
    "thin_to_spacing",
    "cutoff_pd_bound",
    "cutoff_pd_margin",
]
