"""Cross-validated evaluation of exact and banded GP training."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from btcgp.config import Config
from btcgp.data.series import Dataset1D, load_series_csv
from btcgp.errors import BtcGpError, NotPositiveDefinite, PdFailure
from btcgp.gp.model import add_observation_noise, fit_factor, predict
from btcgp.models import (
    BandwidthPolicy,
    EvalReport,
    ExperimentConfig,
    FitMode,
    FoldRecord,
    KEntry,
    MethodSpec,
    TrainConfig,
)
from btcgp.output.audit import AuditLogger
from btcgp.output.reports import write_reports
from btcgp.sim.datasets import kfold_split, synthetic_dataset
from btcgp.sim.metrics import nlpd, nlpd_mean, nmse
from btcgp.train.optimiser import TrainResult, fit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldTask:
    """One (method, bandwidth entry, fold) unit of work."""

    kind: FitMode
    entry: Optional[KEntry]
    fold: int
    train: Dataset1D
    test: Dataset1D

    @property
    def method(self) -> str:
        return MethodSpec.label(self.kind, self.entry)


def load_experiment_data(config: ExperimentConfig, sample_limit: int) -> Dataset1D:
    if config.data_csv is not None:
        return load_series_csv(config.data_csv)
    return synthetic_dataset(config.synthetic, config.seed, sample_limit)


def train_config_for(task: FoldTask, config: ExperimentConfig) -> TrainConfig:
    common: Dict[str, Any] = {
        "max_iters": config.max_iters,
        "grad_tol": config.grad_tol,
        "pd_failure_policy": config.pd_failure_policy,
        "spacing_quantile": config.spacing_quantile,
    }
    if task.kind == FitMode.EXACT:
        return TrainConfig(mode=FitMode.EXACT, **common)
    if isinstance(task.entry, int):
        return TrainConfig.fixed(task.entry, **common)
    return TrainConfig(mode=FitMode.BTC, bandwidth_policy=BandwidthPolicy(task.entry), **common)


def run_fold(task: FoldTask, config: ExperimentConfig) -> FoldRecord:
    """Fit, predict and score one fold.

    Any failure yields a record without metrics that carries the error text.
    ``pd_valid`` is false only when positive definiteness was lost.
    """

    base: Dict[str, Any] = {"method": task.method, "fold": task.fold, "seed": config.seed}
    if isinstance(task.entry, int):
        base["k"] = task.entry

    started = time.perf_counter()
    result: Optional[TrainResult] = None
    try:
        result = fit(task.train, train_config_for(task, config))
        fit_s = time.perf_counter() - started

        started = time.perf_counter()
        model = fit_factor(result.params, task.train, result.mode, result.bandwidth_used)
        dist = predict(model, task.test.x)
        predict_s = time.perf_counter() - started

        score = nmse(task.test.y, dist.mean)
        scored = add_observation_noise(dist, result.params.noise_var) if config.noised_nlpd else dist
        joint = nlpd(scored, task.test.y, allow_noiseless=not config.noised_nlpd)
        pointwise = nlpd_mean(scored, task.test.y)
    except Exception as exc:
        lost_pd = isinstance(exc, (PdFailure, NotPositiveDefinite))
        if lost_pd:
            logger.warning("%s fold %d lost positive definiteness: %s", task.method, task.fold, exc)
        elif isinstance(exc, BtcGpError):
            logger.error("%s fold %d failed: %s", task.method, task.fold, exc)
        else:
            logger.exception("%s fold %d failed unexpectedly", task.method, task.fold)
        return FoldRecord(
            **base,
            fit_s=time.perf_counter() - started if result is None else result.wall_time_s,
            pd_valid=not lost_pd,
            pd_violations=len(result.pd_violations) if result else _violations_of(exc),
            theoretical_k=result.final_bandwidth_check if result else None,
            error=f"{type(exc).__name__}: {exc}",
        )

    if task.kind == FitMode.BTC:
        base["k"] = result.bandwidth_used
    return FoldRecord(
        **base,
        nmse=score,
        nlpd=joint,
        nlpd_mean=pointwise,
        fit_s=fit_s,
        predict_s=predict_s,
        pd_valid=True,
        theoretical_k=result.final_bandwidth_check,
        pd_violations=len(result.pd_violations),
        signal_var=result.params.signal_var,
        lengthscale=result.params.lengthscale,
        noise_var=result.params.noise_var,
    )


def _violations_of(exc: Exception) -> int:
    return 1 if isinstance(exc, (PdFailure, NotPositiveDefinite)) else 0


def build_tasks(config: ExperimentConfig, data: Dataset1D) -> List[FoldTask]:
    splits = kfold_split(data.n, config.folds, config.seed)
    folds = [(data.subset(train), data.subset(test)) for train, test in splits]
    tasks = []
    for method in config.methods:
        for entry in method.entries():
            for fold, (train, test) in enumerate(folds):
                tasks.append(FoldTask(kind=method.kind, entry=entry, fold=fold, train=train, test=test))
    return tasks


def resolved_config(config: ExperimentConfig, settings: Config, workers: int) -> Dict[str, Any]:
    """Configuration echo written into every report."""
    echo = config.model_dump(mode="json")
    echo["workers"] = workers
    echo["output_dir"] = str(config.output_dir or settings.get("output_dir"))
    echo["nlpd_variant"] = "noised" if config.noised_nlpd else "latent"
    return echo


def run_experiment(
    config: ExperimentConfig,
    *,
    settings: Optional[Config] = None,
    audit: Optional[AuditLogger] = None,
    write: bool = True,
) -> List[EvalReport]:
    """Evaluate every configured method on every fold.

    Folds run concurrently on a thread pool; records are collected on the
    calling thread.  Failed folds are reported without metrics, with
    ``pd_valid=False`` when the failure was a loss of positive definiteness.
    An experiment that does not set ``folds`` uses the ``default_folds``
    setting.  When ``write`` is set, JSON and CSV reports go to the output
    directory.
    """

    settings = settings or Config()
    if "folds" not in config.model_fields_set:
        config = config.model_copy(update={"folds": int(settings.get("default_folds", config.folds))})
    workers = config.workers or int(settings.get("threads", 1))
    data = load_experiment_data(config, int(settings.get("sample_limit")))
    tasks = build_tasks(config, data)
    echo = resolved_config(config, settings, workers)
    if audit is None and settings.get("enable_audit"):
        audit = AuditLogger(Path(settings.get("audit_dir")))
    if audit:
        audit.log_run_started(config.name, len(tasks), echo)

    logger.info(
        "experiment %s: %d points, %d tasks on %d worker(s)", config.name, data.n, len(tasks), workers
    )
    records: Dict[Tuple[str, int], FoldRecord] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_task = {executor.submit(run_fold, task, config): task for task in tasks}
        for i, future in enumerate(as_completed(future_to_task), 1):
            task = future_to_task[future]
            record = future.result()
            records[(task.method, task.fold)] = record
            logger.info("[%d/%d] %s fold %d pd_valid=%s", i, len(tasks), task.method, task.fold, record.pd_valid)
            if audit:
                audit.log_fold_completed(record)
                if record.pd_violations or not record.pd_valid:
                    audit.log_pd_violation(task.method, task.fold, record.pd_violations, not record.pd_valid)
                if record.error:
                    audit.log_error(record.error.split(":", 1)[0], record.error, {"method": task.method, "fold": task.fold})

    reports = []
    for method in config.methods:
        for entry in method.entries():
            label = MethodSpec.label(method.kind, entry)
            folds = [records[(label, fold)] for fold in range(config.folds)]
            reports.append(
                EvalReport.from_folds(
                    method=label,
                    kind=method.kind,
                    k=entry if isinstance(entry, int) else None,
                    k_policy=entry if isinstance(entry, str) else None,
                    seed=config.seed,
                    folds=folds,
                )
            )

    outputs: Dict[str, str] = {}
    if write:
        paths = write_reports({"config": echo, "n": data.n, "delta": data.delta}, reports, echo["output_dir"], config.name)
        outputs = {key: str(path) for key, path in paths.items()}
        logger.info("reports written to %s", ", ".join(outputs.values()))
    if audit:
        audit.log_run_completed(config.name, len(reports), sum(r.pd_valid_folds for r in reports), outputs)
    return reports


def summarise_sweep(reports: List[EvalReport]) -> pd.DataFrame:
    """One row per method: the NMSE-vs-k and metric-vs-runtime frontier."""

    rows = []
    for report in reports:
        ks = [record.k for record in report.folds if record.k is not None]
        rows.append(
            {
                "method": report.method,
                "k": report.k if report.k is not None else (int(np.median(ks)) if ks else None),
                "nmse_mean": report.nmse_mean,
                "nlpd_mean": report.nlpd_mean,
                "pd_valid_folds": report.pd_valid_folds,
                "fit_s_mean": report.fit_s_mean,
            }
        )
    return pd.DataFrame(rows, columns=["method", "k", "nmse_mean", "nlpd_mean", "pd_valid_folds", "fit_s_mean"])
