"""Wall-clock scaling of the banded loss against the exact one."""

from __future__ import annotations

import logging
import statistics
import time
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd

from btcgp.config import DEFAULT_SAMPLE_LIMIT
from btcgp.data.series import Dataset1D, equispaced_inputs
from btcgp.errors import InputError, NumericalError
from btcgp.gp.model import nll_btc, nll_exact
from btcgp.kernels.se import REFERENCE_CASES
from btcgp.models import SeHyperParams, TrainConfig
from btcgp.sim.datasets import sample_gp, sample_gp_banded
from btcgp.train.optimiser import fit

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["n", "k", "loss_eval_s", "exact_loss_eval_s", "fit_s"]
DEFAULT_BENCH_PARAMS = REFERENCE_CASES[0].params
DEFAULT_BENCH_DELTA = REFERENCE_CASES[0].delta


def _median_time(fn: Callable[[], object], repeats: int) -> float:
    timings = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - started)
    return statistics.median(timings)


def bench_data(n: int, params: SeHyperParams, delta: float, seed: int, sample_limit: int) -> Dataset1D:
    x = equispaced_inputs(n, delta)
    if n <= sample_limit:
        y = sample_gp(x, params, seed, sample_limit)
    else:
        y = sample_gp_banded(x, params, seed)
    return Dataset1D.from_arrays(x, y)


def bench_scaling(
    n_list: Sequence[int],
    k: int,
    params: Optional[SeHyperParams] = None,
    seed: int = 0,
    *,
    delta: float = DEFAULT_BENCH_DELTA,
    repeats: int = 5,
    exact_max_n: int = 4000,
    fit_max_iters: int = 20,
    sample_limit: int = DEFAULT_SAMPLE_LIMIT,
) -> pd.DataFrame:
    """Median-of-``repeats`` timings per ``n`` at a fixed bandwidth.

    Columns: ``n, k, loss_eval_s, exact_loss_eval_s, fit_s``.  The exact
    column is NaN above ``exact_max_n``. ``loss_eval_s`` and ``fit_s`` are NaN
    when bandwidth ``k`` is indefinite at the benchmark parameters.  Runs strictly serially.
    """

    if not n_list:
        raise InputError("n_list must not be empty")
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    if repeats < 1:
        raise InputError(f"repeats must be at least 1, got {repeats}")
    params = params or DEFAULT_BENCH_PARAMS

    rows: List[dict] = []
    for n in n_list:
        if n < k + 1:
            raise InputError(f"n={n} is too small for bandwidth {k}")
        data = bench_data(n, params, delta, seed, sample_limit)

        try:
            loss_s = _median_time(lambda: nll_btc(params, data, k), repeats)
        except NumericalError as exc:
            logger.warning("banded loss at n=%d, k=%d failed: %s", n, k, exc)
            loss_s = float("nan")
        exact_s = float("nan")
        if n <= exact_max_n:
            exact_s = _median_time(lambda: nll_exact(params, data), repeats)

        config = TrainConfig.fixed(k, max_iters=fit_max_iters)
        try:
            fit_s = _median_time(lambda: fit(data, config), repeats)
        except NumericalError as exc:
            logger.warning("fit at n=%d, k=%d failed: %s", n, k, exc)
            fit_s = float("nan")

        logger.info("n=%d k=%d: loss %.4fs, exact %.4fs, fit %.4fs", n, k, loss_s, exact_s, fit_s)
        rows.append({"n": int(n), "k": int(k), "loss_eval_s": loss_s, "exact_loss_eval_s": exact_s, "fit_s": fit_s})

    return pd.DataFrame(rows, columns=BENCH_COLUMNS)


def scaling_ratios(table: pd.DataFrame, column: str = "loss_eval_s") -> np.ndarray:
    """Consecutive time ratios, for tables with ``n`` doubling row to row."""
    values = table.sort_values("n")[column].to_numpy(dtype=float)
    return values[1:] / values[:-1]
