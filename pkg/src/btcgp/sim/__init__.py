"""Evaluation: metrics, cross-validation, synthetic data and benchmarks."""

from .bench import bench_scaling
from .datasets import kfold_split, sample_gp, sample_gp_banded, synthetic_dataset
from .engine import run_experiment, summarise_sweep
from .metrics import nlpd, nlpd_mean, nmse

__all__ = [
    "bench_scaling",
    "kfold_split",
    "nlpd",
    "nlpd_mean",
    "nmse",
    "run_experiment",
    "sample_gp",
    "sample_gp_banded",
    "summarise_sweep",
    "synthetic_dataset",
]
