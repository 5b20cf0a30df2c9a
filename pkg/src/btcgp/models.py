"""Data models for btcgp"""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from btcgp.config import (
    DEFAULT_FD_STEP,
    DEFAULT_FOLDS,
    DEFAULT_GRAD_TOL,
    DEFAULT_MAX_BACKTRACKS,
    DEFAULT_MAX_ITERS,
    DEFAULT_MAX_LOG_STEP,
    PILOT_WINDOW,
)
from btcgp.errors import ConfigError

MODEL_FILE_VERSION = 1


class FitMode(str, Enum):
    """Covariance used in the training loss"""
    EXACT = "exact"
    BTC = "btc"


class BandwidthPolicy(str, Enum):
    """How the fixed training bandwidth is chosen"""
    THEORETICAL = "theoretical"
    PILOT = "pilot"
    FIXED = "fixed"


class PdFailurePolicy(str, Enum):
    ABORT = "abort"
    BACKTRACK = "backtrack"


class SeHyperParams(BaseModel):
    """Squared-exponential hyperparameters plus observation noise"""

    model_config = ConfigDict(frozen=True)

    signal_var: float = Field(gt=0.0, allow_inf_nan=False)
    lengthscale: float = Field(gt=0.0, allow_inf_nan=False)
    noise_var: float = Field(gt=0.0, allow_inf_nan=False)

    def to_log(self) -> np.ndarray:
        """Optimiser coordinates ``(log s2, log l, log sn2)``."""
        return np.log([self.signal_var, self.lengthscale, self.noise_var])

    @classmethod
    def from_log(cls, log_params: np.ndarray) -> "SeHyperParams":
        signal_var, lengthscale, noise_var = np.exp(np.asarray(log_params, dtype=float))
        return cls(
            signal_var=float(signal_var),
            lengthscale=float(lengthscale),
            noise_var=float(noise_var),
        )

    @classmethod
    def parse_triplet(cls, text: str) -> "SeHyperParams":
        """Parse ``"s2,l,sn2"`` as used by ``--init``."""
        parts = [item.strip() for item in text.split(",") if item.strip()]
        if len(parts) != 3:
            raise ValueError("expected three comma separated values: signal_var,lengthscale,noise_var")
        signal_var, lengthscale, noise_var = (float(item) for item in parts)
        return cls(signal_var=signal_var, lengthscale=lengthscale, noise_var=noise_var)


class TrainConfig(BaseModel):
    """Optimiser settings for a single fit"""

    model_config = ConfigDict(frozen=True)

    init_params: Optional[SeHyperParams] = None  # None: data-driven initialisation
    mode: FitMode = FitMode.BTC
    bandwidth_policy: BandwidthPolicy = BandwidthPolicy.THEORETICAL
    k: Optional[int] = Field(default=None, ge=0)
    max_iters: int = Field(default=DEFAULT_MAX_ITERS, ge=1)
    grad_tol: float = Field(default=DEFAULT_GRAD_TOL, gt=0.0)
    fd_step: float = Field(default=DEFAULT_FD_STEP, gt=0.0)
    pd_failure_policy: PdFailurePolicy = PdFailurePolicy.BACKTRACK
    max_backtracks: int = Field(default=DEFAULT_MAX_BACKTRACKS, ge=1)
    max_log_step: float = Field(default=DEFAULT_MAX_LOG_STEP, gt=0.0)
    spacing_quantile: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    pilot_window: int = Field(default=PILOT_WINDOW, ge=2)
    pilot_max_iters: int = Field(default=50, ge=1)

    @model_validator(mode="after")
    def validate_bandwidth(self) -> "TrainConfig":
        if self.mode == FitMode.BTC:
            if self.bandwidth_policy == BandwidthPolicy.FIXED and self.k is None:
                raise ValueError("fixed bandwidth policy requires k")
            if self.bandwidth_policy != BandwidthPolicy.FIXED and self.k is not None:
                raise ValueError("k is only accepted with the fixed bandwidth policy")
        return self

    @classmethod
    def fixed(cls, k: int, **kwargs: Any) -> "TrainConfig":
        return cls(mode=FitMode.BTC, bandwidth_policy=BandwidthPolicy.FIXED, k=k, **kwargs)


KEntry = Union[int, Literal["theoretical", "pilot"]]


class MethodSpec(BaseModel):
    """One method of an experiment: exact GP or BTC over a list of bandwidths"""

    kind: FitMode
    k: List[KEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_k(self) -> "MethodSpec":
        if self.kind == FitMode.EXACT and self.k:
            raise ValueError("exact methods take no bandwidth list")
        if self.kind == FitMode.BTC:
            if not self.k:
                raise ValueError("btc methods need a non-empty k list")
            if any(isinstance(entry, int) and entry < 1 for entry in self.k):
                raise ValueError("k list entries must be at least 1")
        return self

    def entries(self) -> List[Optional[KEntry]]:
        return list(self.k) if self.kind == FitMode.BTC else [None]

    @staticmethod
    def label(kind: FitMode, entry: Optional[KEntry]) -> str:
        if entry is None:
            return kind.value
        return f"{kind.value}-k{entry}" if isinstance(entry, int) else f"{kind.value}-{entry}"


class SyntheticSpec(BaseModel):
    """Equispaced GP realisation used as experiment data"""

    signal_var: float = Field(gt=0.0, allow_inf_nan=False)
    lengthscale: float = Field(gt=0.0, allow_inf_nan=False)
    noise_var: float = Field(gt=0.0, allow_inf_nan=False)
    delta: float = Field(gt=0.0, allow_inf_nan=False)
    n: int = Field(ge=2)
    seed: Optional[int] = None

    @property
    def params(self) -> SeHyperParams:
        return SeHyperParams(
            signal_var=self.signal_var, lengthscale=self.lengthscale, noise_var=self.noise_var
        )


class ExperimentConfig(BaseModel):
    """Cross-validated evaluation of one or more methods on one dataset"""

    name: str = Field(default="experiment", min_length=1)
    data_csv: Optional[str] = None
    synthetic: Optional[SyntheticSpec] = None
    methods: List[MethodSpec] = Field(min_length=1)
    folds: int = Field(default=DEFAULT_FOLDS, ge=2)
    seed: int
    output_dir: Optional[str] = None
    pd_failure_policy: PdFailurePolicy = PdFailurePolicy.BACKTRACK
    max_iters: int = Field(default=DEFAULT_MAX_ITERS, ge=1)
    grad_tol: float = Field(default=DEFAULT_GRAD_TOL, gt=0.0)
    noised_nlpd: bool = True
    workers: Optional[int] = Field(default=None, ge=1)
    spacing_quantile: Optional[float] = Field(default=None, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def validate_source(self) -> "ExperimentConfig":
        if (self.data_csv is None) == (self.synthetic is None):
            raise ValueError("exactly one of data_csv and synthetic must be given")
        return self

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read experiment config {path}: {exc}") from exc
        try:
            if path.suffix.lower() in (".yaml", ".yml"):
                raw = yaml.safe_load(text)
            else:
                raw = json.loads(text)
        except (json.JSONDecodeError, yaml.YAMLError) as exc:
            raise ConfigError(f"{path} is not valid JSON/YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path} must contain a mapping at the top level")
        try:
            config = cls.model_validate(raw)
        except ValidationError as exc:
            raise ConfigError(f"invalid experiment config {path}: {exc}") from exc
        # relative data paths resolve against the config file
        if config.data_csv is not None and not Path(config.data_csv).is_absolute():
            config = config.model_copy(update={"data_csv": str(path.parent / config.data_csv)})
        return config


class FoldRecord(BaseModel):
    """One report row: a method evaluated on one cross-validation fold"""

    method: str
    k: Optional[int] = None
    fold: int = Field(ge=0)
    nmse: Optional[float] = None
    nlpd: Optional[float] = None
    nlpd_mean: Optional[float] = None
    fit_s: float = Field(ge=0.0)
    predict_s: Optional[float] = None
    pd_valid: bool
    seed: int
    theoretical_k: Optional[int] = None
    pd_violations: int = Field(default=0, ge=0)
    signal_var: Optional[float] = None
    lengthscale: Optional[float] = None
    noise_var: Optional[float] = None
    error: Optional[str] = None


REPORT_COLUMNS: Tuple[str, ...] = tuple(FoldRecord.model_fields.keys())


def _mean_or_none(values: List[Optional[float]]) -> Optional[float]:
    present = [value for value in values if value is not None]
    return float(np.mean(present)) if present else None


class EvalReport(BaseModel):
    """Per-method aggregate over all folds"""

    method: str
    kind: FitMode
    k: Optional[int] = None
    k_policy: Optional[str] = None
    seed: int
    n_folds: int
    folds: List[FoldRecord]
    nmse_mean: Optional[float] = None
    nlpd_mean: Optional[float] = None
    nlpd_point_mean: Optional[float] = None
    fit_s_mean: float = 0.0
    predict_s_mean: Optional[float] = None
    pd_valid_folds: int = 0
    pd_valid_all: bool = False

    @classmethod
    def from_folds(
        cls,
        *,
        method: str,
        kind: FitMode,
        k: Optional[int],
        k_policy: Optional[str],
        seed: int,
        folds: List[FoldRecord],
    ) -> "EvalReport":
        folds = sorted(folds, key=lambda record: record.fold)
        valid = sum(1 for record in folds if record.pd_valid)
        return cls(
            method=method,
            kind=kind,
            k=k,
            k_policy=k_policy,
            seed=seed,
            n_folds=len(folds),
            folds=folds,
            nmse_mean=_mean_or_none([record.nmse for record in folds]),
            nlpd_mean=_mean_or_none([record.nlpd for record in folds]),
            nlpd_point_mean=_mean_or_none([record.nlpd_mean for record in folds]),
            fit_s_mean=float(np.mean([record.fit_s for record in folds])) if folds else 0.0,
            predict_s_mean=_mean_or_none([record.predict_s for record in folds]),
            pd_valid_folds=valid,
            pd_valid_all=bool(folds) and valid == len(folds),
        )


class ModelFile(BaseModel):
    """Persisted fitted model; the training data travel with it"""

    version: int = MODEL_FILE_VERSION
    params: SeHyperParams
    mode: FitMode
    k: int = Field(ge=0)
    x: List[float] = Field(min_length=1)
    y: List[float] = Field(min_length=1)
    fingerprint: str
    loss_trace: List[Tuple[int, float]] = Field(default_factory=list)
    final_loss: Optional[float] = None
    theoretical_k_final: Optional[int] = None
    bandwidth_warning: bool = False
    seed: Optional[int] = None
    config: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_shapes(self) -> "ModelFile":
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")
        if self.k > len(self.x) - 1:
            raise ValueError(f"bandwidth {self.k} exceeds n - 1 = {len(self.x) - 1}")
        return self
