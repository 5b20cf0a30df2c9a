"""Datasets and their file formats."""

from .series import Dataset1D, equispaced_inputs, load_series_csv, write_series_csv

__all__ = ["Dataset1D", "equispaced_inputs", "load_series_csv", "write_series_csv"]
