"""Report, prediction and model-file writers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from btcgp.errors import ConfigError
from btcgp.models import REPORT_COLUMNS, EvalReport, FoldRecord, ModelFile

PathLike = Union[str, Path]


def _ensure_dir(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)


def _clean(value: Any) -> Any:
    # JSON has no NaN; failed metrics are written as null
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def report_rows(reports: Iterable[EvalReport]) -> List[Dict[str, Any]]:
    """Flat rows, one per (method, fold), in the published column order."""
    rows = []
    for report in reports:
        for record in report.folds:
            dumped = record.model_dump(mode="json")
            rows.append({column: _clean(dumped[column]) for column in REPORT_COLUMNS})
    return rows


def to_json(meta: Dict[str, Any], reports: List[EvalReport], directory: Path, name: str) -> Path:
    _ensure_dir(directory)
    path = directory / f"{name}_report.json"
    payload = {
        "meta": meta,
        "results": report_rows(reports),
        "aggregates": [report.model_dump(mode="json", exclude={"folds"}) for report in reports],
    }
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
    return path


def to_csv(reports: List[EvalReport], directory: Path, name: str) -> Path:
    _ensure_dir(directory)
    path = directory / f"{name}_report.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(REPORT_COLUMNS))
        writer.writeheader()
        for row in report_rows(reports):
            writer.writerow({key: "" if value is None else value for key, value in row.items()})
    return path


def write_reports(
    meta: Dict[str, Any], reports: List[EvalReport], output_dir: PathLike, name: str
) -> Dict[str, Path]:
    directory = Path(output_dir)
    return {
        "json": to_json(meta, reports, directory, name),
        "csv": to_csv(reports, directory, name),
    }


def read_report_rows(path: PathLike) -> List[FoldRecord]:
    """Rows of a JSON report written by :func:`to_json`."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return [FoldRecord.model_validate(row) for row in payload["results"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValidationError) as exc:
        raise ConfigError(f"cannot read report {path}: {exc}") from exc


def write_predictions_csv(
    x_star: np.ndarray, mean: np.ndarray, variance: np.ndarray, path: PathLike
) -> Path:
    path = Path(path)
    _ensure_dir(path.parent)
    frame = pd.DataFrame({"x": x_star, "mean": mean, "variance": variance}, columns=["x", "mean", "variance"])
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def write_model_file(model_file: ModelFile, path: PathLike) -> Path:
    path = Path(path)
    _ensure_dir(path.parent)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(model_file.model_dump(mode="json"), fh, indent=2)
    return path


def read_model_file(path: PathLike) -> ModelFile:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file {path} is not valid JSON: {exc}") from exc
    try:
        return ModelFile.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid model file {path}: {exc}") from exc
