"""One-dimensional regression series and their CSV representation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from btcgp.errors import DimensionMismatch, InputError
from btcgp.kernels.se import min_spacing

SERIES_COLUMNS = ("x", "y")


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Dataset1D:
    """Sorted inputs ``x`` with observations ``y``.

    Attributes
    ----------
    x:
        Strictly increasing input locations.
    y:
        Observations, one per input.
    delta:
        Minimum adjacent spacing of ``x``; ``inf`` for a single point.
    """

    x: np.ndarray
    y: np.ndarray
    delta: float

    @classmethod
    def from_arrays(cls, x: Sequence[float], y: Sequence[float], *, sort: bool = False) -> "Dataset1D":
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(expected=x.shape[0], got=y.shape[0], what="observations")
        if x.shape[0] == 0:
            raise InputError("a dataset needs at least one point")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise InputError("inputs and observations must be finite")
        if sort:
            order = np.argsort(x, kind="stable")
            x, y = x[order], y[order]
        delta = min_spacing(x) if x.shape[0] >= 2 else float("inf")
        return cls(x=_frozen(x), y=_frozen(y), delta=float(delta))

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    def subset(self, indices: Sequence[int]) -> "Dataset1D":
        """Rows at ``indices``, re-sorted by input."""
        indices = np.sort(np.asarray(indices, dtype=int))
        return Dataset1D.from_arrays(self.x[indices], self.y[indices])

    def window(self, start: int, stop: int) -> "Dataset1D":
        return Dataset1D.from_arrays(self.x[start:stop], self.y[start:stop])

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.x, dtype="<f8").tobytes())
        digest.update(np.ascontiguousarray(self.y, dtype="<f8").tobytes())
        return digest.hexdigest()

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.x, "y": self.y})


def equispaced_inputs(n: int, delta: float, start: float = 0.0) -> np.ndarray:
    """``start + delta * [0, 1, ..., n-1]``"""

    if n < 0:
        raise InputError(f"n must be non-negative, got {n}")
    if not (np.isfinite(delta) and delta > 0):
        raise InputError(f"spacing must be positive, got {delta}")
    return start + delta * np.arange(n, dtype=float)


def load_series_csv(path: Union[str, Path]) -> Dataset1D:
    """Read an ``x,y`` CSV; rows are sorted by ``x`` and duplicate inputs rejected."""

    path = Path(path)
    try:
        frame = pd.read_csv(path, encoding="utf-8", float_precision="round_trip")
    except FileNotFoundError as exc:
        raise InputError(f"data file not found: {path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InputError(f"malformed CSV {path}: {exc}") from exc

    frame.columns = [str(column).strip().lower() for column in frame.columns]
    missing = [column for column in SERIES_COLUMNS if column not in frame.columns]
    if missing:
        raise InputError(f"{path} is missing column(s) {', '.join(missing)}; header must be x,y")

    try:
        x = pd.to_numeric(frame["x"], errors="raise").to_numpy(dtype=float)
        y = pd.to_numeric(frame["y"], errors="raise").to_numpy(dtype=float)
    except (ValueError, TypeError) as exc:
        raise InputError(f"non-numeric value in {path}: {exc}") from exc
    return Dataset1D.from_arrays(x, y, sort=True)


def write_series_csv(data: Dataset1D, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data.to_frame().to_csv(path, index=False, float_format="%.17g")
    return path
