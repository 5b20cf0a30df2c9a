"""``eval``, ``simulate`` and ``bench`` sub-commands."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from btcgp.data.series import write_series_csv
from btcgp.kernels.se import REFERENCE_CASES
from btcgp.models import ExperimentConfig, SeHyperParams, SyntheticSpec
from btcgp.sim.bench import bench_scaling
from btcgp.sim.datasets import synthetic_dataset
from btcgp.sim.engine import run_experiment, summarise_sweep

from .common import EXIT_OK, int_at_least, parse_int_list, positive_float, setting

_CASE = REFERENCE_CASES[0]


def add_eval_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Register the ``eval`` sub-command."""

    p = subparsers.add_parser(
        "eval",
        help="Cross-validated evaluation from an experiment config",
        description="Run every configured method on every fold and write JSON + CSV reports.",
    )
    p.add_argument("--config", dest="experiment_config", required=True, help="Experiment JSON/YAML")
    p.add_argument("--out", default=None, help="Override the report directory")
    p.add_argument("--workers", type=int_at_least(1), default=None, help="Override the worker count")
    p.set_defaults(func=run_eval_cmd)


def add_simulate_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Register the ``simulate`` sub-command."""

    p = subparsers.add_parser(
        "simulate",
        help="Sample an equispaced GP realisation to CSV",
        description="Draw y at x = 0, delta, 2*delta, ... from the SE-kernel GP plus noise.",
    )
    p.add_argument("--sigma2", type=positive_float, required=True, help="Signal variance")
    p.add_argument("--lengthscale", type=positive_float, required=True)
    p.add_argument("--noise", type=positive_float, required=True, help="Noise variance")
    p.add_argument("--delta", type=positive_float, required=True, help="Input spacing")
    p.add_argument("--n", type=int_at_least(2), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV to write (header x,y)")
    p.set_defaults(func=run_simulate_cmd)


def add_bench_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Register the ``bench`` sub-command."""

    p = subparsers.add_parser(
        "bench",
        help="Loss and fit timings over a list of n at fixed bandwidth",
        description="Median wall times of the banded loss, the exact loss and a short fit.",
    )
    p.add_argument("--n-list", required=True, help="Comma separated sizes, e.g. 1000,2000,4000")
    p.add_argument("--k", type=int_at_least(1), required=True)
    p.add_argument("--sigma2", type=positive_float, default=_CASE.signal_var)
    p.add_argument("--lengthscale", type=positive_float, default=_CASE.lengthscale)
    p.add_argument("--noise", type=positive_float, default=_CASE.noise_var)
    p.add_argument("--delta", type=positive_float, default=_CASE.delta)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int_at_least(1), default=5)
    p.add_argument("--exact-max-n", type=int_at_least(0), default=4000)
    p.add_argument("--fit-max-iters", type=int_at_least(1), default=20)
    p.add_argument("--out", required=True, help="Timing CSV to write")
    p.set_defaults(func=run_bench_cmd)


def run_eval_cmd(args: argparse.Namespace, cfg: Any) -> int:
    config = ExperimentConfig.from_file(args.experiment_config)
    overrides = {}
    if args.out:
        overrides["output_dir"] = args.out
    if args.workers:
        overrides["workers"] = args.workers
    if overrides:
        config = config.model_copy(update=overrides)

    reports = run_experiment(config, settings=cfg)
    summary = summarise_sweep(reports)
    print(summary.to_string(index=False))
    output_dir = Path(config.output_dir or setting(cfg, "output_dir"))
    print(f"reports written to {output_dir / (config.name + '_report.json')} and .csv")
    return EXIT_OK


def run_simulate_cmd(args: argparse.Namespace, cfg: Any) -> int:
    spec = SyntheticSpec(
        signal_var=args.sigma2,
        lengthscale=args.lengthscale,
        noise_var=args.noise,
        delta=args.delta,
        n=args.n,
        seed=args.seed,
    )
    data = synthetic_dataset(spec, args.seed, int(setting(cfg, "sample_limit")))
    path = write_series_csv(data, args.out)
    print(f"wrote {data.n} rows to {path}")
    return EXIT_OK


def run_bench_cmd(args: argparse.Namespace, cfg: Any) -> int:
    n_list = parse_int_list(args.n_list)
    params = SeHyperParams(signal_var=args.sigma2, lengthscale=args.lengthscale, noise_var=args.noise)
    table = bench_scaling(
        n_list,
        args.k,
        params,
        args.seed,
        delta=args.delta,
        repeats=args.repeats,
        exact_max_n=args.exact_max_n,
        fit_max_iters=args.fit_max_iters,
        sample_limit=int(setting(cfg, "sample_limit")),
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out, index=False, float_format="%.6g")
    print(table.to_string(index=False))
    print(f"timings written to {out}")
    return EXIT_OK
