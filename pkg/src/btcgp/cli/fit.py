"""``fit`` and ``predict`` sub-commands."""

from __future__ import annotations

import argparse
import re
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from btcgp.data.series import Dataset1D, load_series_csv
from btcgp.errors import ConfigError, InputError, UsageError
from btcgp.gp.model import add_observation_noise, check_predictive_pd, fit_factor, predict
from btcgp.models import BandwidthPolicy, FitMode, ModelFile, PdFailurePolicy, SeHyperParams, TrainConfig
from btcgp.output.reports import read_model_file, write_model_file, write_predictions_csv
from btcgp.train.optimiser import TrainResult, fit

from .common import EXIT_OK, int_at_least, setting

RANGE_PATTERN = re.compile(r"^\s*([^:]+):([^:]+):(\d+)\s*$")


def add_fit_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Register the ``fit`` sub-command."""

    p = subparsers.add_parser(
        "fit",
        help="Train hyperparameters on an x,y CSV and save the model",
        description="Fit SE-kernel hyperparameters with the exact or banded (BTC) likelihood.",
    )
    p.add_argument("--data", required=True, help="Training CSV with header x,y")
    p.add_argument("--mode", choices=[mode.value for mode in FitMode], default=FitMode.BTC.value)
    p.add_argument("--k", type=int_at_least(0), default=None, help="Fixed bandwidth (btc only)")
    p.add_argument(
        "--k-policy",
        choices=[BandwidthPolicy.THEORETICAL.value, BandwidthPolicy.PILOT.value],
        default=None,
        help="Bandwidth rule (btc only, default theoretical)",
    )
    p.add_argument("--init", default="auto", help="'auto' or 'signal_var,lengthscale,noise_var'")
    p.add_argument("--out", required=True, help="Model JSON to write")
    p.add_argument("--seed", type=int, default=None, help="Recorded in the model file")
    p.add_argument("--max-iters", type=int_at_least(1), default=None)
    p.add_argument(
        "--pd-policy",
        choices=[policy.value for policy in PdFailurePolicy],
        default=PdFailurePolicy.BACKTRACK.value,
    )
    p.add_argument("--spacing-quantile", type=float, default=None,
                   help="Use this quantile of input gaps for the bandwidth rule (voids the PD guarantee)")
    p.set_defaults(func=run_fit_cmd)


def add_predict_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Register the ``predict`` sub-command."""

    p = subparsers.add_parser(
        "predict",
        help="Predictive mean and variance from a saved model",
        description="Evaluate the predictive distribution of a model written by 'fit'.",
    )
    p.add_argument("--model", required=True, help="Model JSON written by 'fit'")
    p.add_argument("--at", required=True, help="start:stop:count or a CSV of test inputs")
    p.add_argument("--with-noise", action="store_true", help="Add the noise variance to the variance column")
    p.add_argument(
        "--check-pd",
        action="store_true",
        help="Dense PD check of the predictive covariance (test sets up to the dense_check_limit setting)",
    )
    p.add_argument("--out", required=True, help="Predictions CSV (x, mean, variance)")
    p.set_defaults(func=run_predict_cmd)


def resolve_train_config(args: argparse.Namespace, cfg: Any) -> TrainConfig:
    mode = FitMode(args.mode)
    if mode == FitMode.EXACT and (args.k is not None or args.k_policy):
        raise UsageError("--k and --k-policy only apply to --mode btc")
    if args.k is not None and args.k_policy:
        raise UsageError("--k and --k-policy are mutually exclusive")

    init: Optional[SeHyperParams] = None
    if args.init and args.init.strip().lower() != "auto":
        try:
            init = SeHyperParams.parse_triplet(args.init)
        except ValueError as exc:
            raise UsageError(f"--init: {exc}") from exc

    options: Dict[str, Any] = {
        "init_params": init,
        "mode": mode,
        "max_iters": args.max_iters or setting(cfg, "max_iters"),
        "grad_tol": setting(cfg, "grad_tol"),
        "fd_step": setting(cfg, "fd_step"),
        "pd_failure_policy": PdFailurePolicy(args.pd_policy),
        "spacing_quantile": args.spacing_quantile,
    }
    if mode == FitMode.BTC:
        if args.k is not None:
            options.update(bandwidth_policy=BandwidthPolicy.FIXED, k=args.k)
        else:
            options["bandwidth_policy"] = BandwidthPolicy(args.k_policy or BandwidthPolicy.THEORETICAL.value)
    try:
        return TrainConfig(**options)
    except ValidationError as exc:
        raise UsageError(f"invalid training options: {exc}") from exc


def build_model_file(
    data: Dataset1D, result: TrainResult, config: TrainConfig, args: argparse.Namespace
) -> ModelFile:
    echo = config.model_dump(mode="json")
    echo.update({"data": str(args.data), "init_resolved": result.init_params.model_dump() if result.init_params else None})
    if result.pilot_params is not None:
        echo["pilot_params"] = result.pilot_params.model_dump()
    return ModelFile(
        params=result.params,
        mode=result.mode,
        k=result.bandwidth_used,
        x=data.x.tolist(),
        y=data.y.tolist(),
        fingerprint=data.fingerprint(),
        loss_trace=result.loss_trace,
        final_loss=result.final_loss,
        theoretical_k_final=result.final_bandwidth_check,
        bandwidth_warning=result.bandwidth_warning,
        seed=args.seed,
        config=echo,
    )


def run_fit_cmd(args: argparse.Namespace, cfg: Any) -> int:
    config = resolve_train_config(args, cfg)
    data = load_series_csv(args.data)
    result = fit(data, config)
    path = write_model_file(build_model_file(data, result, config, args), args.out)

    policy = "full" if config.mode == FitMode.EXACT else config.bandwidth_policy.value
    print(f"mode: {config.mode.value}")
    print(f"bandwidth: {result.bandwidth_used} ({policy})")
    print(f"final loss: {result.final_loss:.10g}")
    print(
        f"params: signal_var={result.params.signal_var:.6g} "
        f"lengthscale={result.params.lengthscale:.6g} noise_var={result.params.noise_var:.6g}"
    )
    print(f"theoretical k at fitted params: {result.final_bandwidth_check}")
    print(
        f"converged: {result.converged} ({len(result.loss_trace) - 1} steps, "
        f"{result.n_loss_evals} loss evaluations, {result.wall_time_s:.2f}s)"
    )
    if result.pd_violations:
        print(f"warning: {len(result.pd_violations)} trial points rejected for loss of positive definiteness")
    if result.bandwidth_warning:
        print(
            f"warning: bandwidth {result.bandwidth_used} is below the theoretical "
            f"{result.final_bandwidth_check} at the fitted parameters"
        )
    print(f"model written to {path}")
    return EXIT_OK


def parse_at(text: str) -> np.ndarray:
    """Test inputs from ``start:stop:count`` or a CSV file."""

    match = RANGE_PATTERN.match(text)
    if match:
        try:
            start, stop = float(match.group(1)), float(match.group(2))
        except ValueError as exc:
            raise UsageError(f"invalid range {text!r}: {exc}") from exc
        return np.linspace(start, stop, int(match.group(3)))

    path = Path(text)
    if not path.exists():
        raise InputError(f"--at is neither a start:stop:count range nor an existing file: {text}")
    try:
        raw = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        return np.zeros(0)
    except pd.errors.ParserError as exc:
        raise InputError(f"malformed CSV {path}: {exc}") from exc

    header = [str(value).strip().lower() for value in raw.iloc[0]] if len(raw) else []
    if "x" in header:
        column = raw.iloc[1:, header.index("x")]
    elif raw.shape[1] == 1:
        column = raw.iloc[:, 0]
    else:
        raise InputError(f"{path} needs an 'x' column")
    try:
        return pd.to_numeric(column.str.strip(), errors="raise").to_numpy(dtype=float)
    except ValueError as exc:
        raise InputError(f"non-numeric test input in {path}: {exc}") from exc


def run_predict_cmd(args: argparse.Namespace, cfg: Any) -> int:
    model_file = read_model_file(args.model)
    data = Dataset1D.from_arrays(model_file.x, model_file.y)
    if data.fingerprint() != model_file.fingerprint:
        raise ConfigError(f"training data in {args.model} do not match the stored fingerprint")

    model = fit_factor(model_file.params, data, model_file.mode, model_file.k)
    x_star = parse_at(args.at)
    dist = predict(model, x_star)
    if args.check_pd:
        verdict = check_predictive_pd(dist, limit=int(setting(cfg, "dense_check_limit")))
        status = "yes" if verdict.pd else "NO"
        print(f"predictive covariance positive definite: {status} (lambda_min={verdict.lambda_min:.6g})")
    if args.with_noise:
        dist = add_observation_noise(dist, model_file.params.noise_var)
    path = write_predictions_csv(x_star, dist.mean, dist.variance, args.out)
    print(f"wrote {dist.n} predictions to {path}")
    return EXIT_OK
