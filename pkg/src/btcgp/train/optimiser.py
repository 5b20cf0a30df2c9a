"""Marginal-likelihood hyperparameter training with a fixed bandwidth.

The optimiser works on ``(log s2, log l, log sn2)`` with finite-difference
gradients, a BFGS inverse-Hessian model and an Armijo backtracking line
search.  The bandwidth is resolved once, before the first step, and kept for
the whole run.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.optimize import BFGS

from btcgp.data.series import Dataset1D
from btcgp.errors import (
    BandwidthOutOfRange,
    NonFiniteLoss,
    NotPositiveDefinite,
    NumericalError,
    PdFailure,
    TooFewPoints,
    ZeroVariance,
)
from btcgp.gp.model import fit_factor
from btcgp.kernels.se import clamp_bandwidth, effective_spacing, theoretical_bandwidth
from btcgp.models import BandwidthPolicy, FitMode, PdFailurePolicy, SeHyperParams, TrainConfig
from btcgp.train.gradients import loss_gradient_fd

logger = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4


@dataclass
class TrainResult:
    """Outcome of :func:`fit`."""

    params: SeHyperParams
    mode: FitMode
    bandwidth_used: int
    loss_trace: List[Tuple[int, float]]
    pd_violations: List[Tuple[int, int]]
    wall_time_s: float
    converged: bool
    final_bandwidth_check: int
    bandwidth_warning: bool
    n_loss_evals: int = 0
    iterations: int = 0
    pilot_params: Optional[SeHyperParams] = None
    init_params: Optional[SeHyperParams] = None

    @property
    def final_loss(self) -> float:
        return self.loss_trace[-1][1]


class _Objective:
    """Loss over log-parameters with an evaluation counter."""

    def __init__(self, data: Dataset1D, mode: FitMode, k: int) -> None:
        self.data = data
        self.mode = mode
        self.k = k
        self.evaluations = 0

    def __call__(self, log_params: np.ndarray) -> float:
        self.evaluations += 1
        try:
            params = SeHyperParams.from_log(log_params)
        except ValidationError:
            # exp() over- or underflowed
            return math.inf
        return fit_factor(params, self.data, self.mode, self.k).loss()


def init_hyperparams(data: Dataset1D, delta: Optional[float] = None) -> SeHyperParams:
    """Conservative start: short lengthscale, noise at half the sample variance."""

    if data.n < 2:
        raise TooFewPoints(data.n, 2)
    variance = float(np.var(data.y, ddof=1))
    if not variance > 0:
        raise ZeroVariance("observations are constant; cannot initialise from their variance")
    spacing = data.delta if delta is None else delta
    return SeHyperParams(signal_var=variance, lengthscale=5.0 * spacing, noise_var=0.5 * variance)


def _pilot_bandwidth(
    data: Dataset1D, config: TrainConfig, init: SeHyperParams, delta: float
) -> Tuple[int, Optional[SeHyperParams]]:
    k_init = theoretical_bandwidth(init, delta)
    window = min(data.n, config.pilot_window)
    start = (data.n - window) // 2
    pilot_data = data.window(start, start + window)
    pilot_config = TrainConfig(
        init_params=init,
        mode=FitMode.EXACT,
        max_iters=config.pilot_max_iters,
        grad_tol=config.grad_tol,
        fd_step=config.fd_step,
        max_backtracks=config.max_backtracks,
        max_log_step=config.max_log_step,
    )
    try:
        pilot = fit(pilot_data, pilot_config)
    except NumericalError as exc:
        logger.warning("pilot fit failed (%s); using the bandwidth at initial parameters", exc)
        return k_init, None
    k_pilot = theoretical_bandwidth(pilot.params, delta)
    logger.info(
        "pilot fit on %d points: params %s, bandwidth %d (initial parameters give %d)",
        window,
        pilot.params,
        k_pilot,
        k_init,
    )
    return max(k_init, k_pilot), pilot.params


def resolve_bandwidth(
    data: Dataset1D, config: TrainConfig, init: SeHyperParams, delta: float
) -> Tuple[int, Optional[SeHyperParams]]:
    """Bandwidth frozen for the run, plus pilot parameters when a pilot fit ran."""

    if config.mode == FitMode.EXACT:
        return data.n - 1, None
    if config.bandwidth_policy == BandwidthPolicy.FIXED:
        k = int(config.k)
        if k > data.n - 1:
            raise BandwidthOutOfRange(k, data.n)
        return k, None
    if config.bandwidth_policy == BandwidthPolicy.PILOT:
        k, pilot_params = _pilot_bandwidth(data, config, init, delta)
        return clamp_bandwidth(k, data.n), pilot_params
    return clamp_bandwidth(theoretical_bandwidth(init, delta), data.n), None


def _initial_hessian() -> BFGS:
    hess = BFGS(exception_strategy="skip_update")
    hess.initialize(3, "inv_hess")
    return hess


def fit(data: Dataset1D, config: Optional[TrainConfig] = None) -> TrainResult:
    """Minimise the exact or BTC negative log-likelihood.

    ``max_iters`` counts the initial evaluation as iteration 0, so
    ``max_iters=1`` returns the initial parameters unconverged.  Accepted
    losses decrease strictly.  With ``BACKTRACK`` a trial point whose
    covariance is not positive definite is logged in ``pd_violations`` and
    the step halved; with ``ABORT`` it raises :class:`PdFailure`.
    """

    config = config or TrainConfig()
    started = time.perf_counter()
    if data.n < 2:
        raise TooFewPoints(data.n, 2)

    delta = effective_spacing(data.x, config.spacing_quantile)
    init = config.init_params or init_hyperparams(data)
    k, pilot_params = resolve_bandwidth(data, config, init, delta)
    logger.info(
        "fitting %s GP on %d points, bandwidth %d (%s), init %s",
        config.mode.value,
        data.n,
        k,
        "full" if config.mode == FitMode.EXACT else config.bandwidth_policy.value,
        init,
    )

    objective = _Objective(data, config.mode, k)
    pd_violations: List[Tuple[int, int]] = []

    p = init.to_log()
    try:
        f = objective(p)
    except NotPositiveDefinite as exc:
        raise PdFailure(0, exc.pivot_index, "initial hyperparameters") from exc
    if not math.isfinite(f):
        raise NonFiniteLoss(p, f)

    def gradient(iteration: int, point: np.ndarray, value: float) -> np.ndarray:
        def record(exc: NotPositiveDefinite) -> None:
            pd_violations.append((iteration, exc.pivot_index))
            if config.pd_failure_policy == PdFailurePolicy.ABORT:
                raise PdFailure(iteration, exc.pivot_index, "gradient probe") from exc

        try:
            return loss_gradient_fd(objective, point, config.fd_step, f0=value, on_pd_failure=record)
        except NotPositiveDefinite as exc:
            raise PdFailure(iteration, exc.pivot_index, "gradient probe") from exc

    loss_trace: List[Tuple[int, float]] = [(0, f)]
    g = gradient(0, p, f)
    hess = _initial_hessian()
    converged = False
    iteration = 0

    for iteration in range(1, config.max_iters):
        if float(np.max(np.abs(g))) < config.grad_tol:
            converged = True
            break

        direction = -hess.dot(g)
        if not float(direction @ g) < 0:
            hess = _initial_hessian()
            direction = -g
        longest = float(np.max(np.abs(direction)))
        if longest > config.max_log_step:
            direction *= config.max_log_step / longest
        slope = float(direction @ g)

        t = 1.0
        accepted: Optional[Tuple[np.ndarray, float]] = None
        last_pd: Optional[NotPositiveDefinite] = None
        for _ in range(config.max_backtracks):
            trial = p + t * direction
            try:
                f_trial = objective(trial)
            except NotPositiveDefinite as exc:
                pd_violations.append((iteration, exc.pivot_index))
                logger.warning(
                    "iteration %d: covariance not positive definite at trial point (pivot %d)",
                    iteration,
                    exc.pivot_index,
                )
                if config.pd_failure_policy == PdFailurePolicy.ABORT:
                    raise PdFailure(iteration, exc.pivot_index, "trial point") from exc
                last_pd = exc
                t *= 0.5
                continue
            last_pd = None
            if math.isfinite(f_trial) and f_trial < f and f_trial <= f + ARMIJO_C1 * t * slope:
                accepted = (trial, f_trial)
                break
            t *= 0.5

        if accepted is None:
            if last_pd is not None:
                raise PdFailure(iteration, last_pd.pivot_index, "backtracking exhausted")
            logger.debug("iteration %d: line search found no decrease; stopping", iteration)
            break

        trial, f_trial = accepted
        g_new = gradient(iteration, trial, f_trial)
        hess.update(trial - p, g_new - g)
        p, f, g = trial, f_trial, g_new
        loss_trace.append((iteration, f))
        logger.debug("iteration %d: loss %.10g, step %.3g, |g| %.3g", iteration, f, t, float(np.max(np.abs(g))))

    params = SeHyperParams.from_log(p)
    final_k = theoretical_bandwidth(params, delta)
    warn = config.mode == FitMode.BTC and final_k > k
    if warn:
        logger.warning(
            "bandwidth %d is below the value %d implied by the fitted hyperparameters",
            k,
            final_k,
        )
    if pd_violations:
        logger.warning("%d trial points rejected for loss of positive definiteness", len(pd_violations))

    result = TrainResult(
        params=params,
        mode=config.mode,
        bandwidth_used=k,
        loss_trace=loss_trace,
        pd_violations=pd_violations,
        wall_time_s=time.perf_counter() - started,
        converged=converged,
        final_bandwidth_check=final_k,
        bandwidth_warning=warn,
        n_loss_evals=objective.evaluations,
        iterations=iteration,
        pilot_params=pilot_params,
        init_params=init,
    )
    logger.info(
        "fit finished: loss %.10g after %d accepted steps (converged=%s, %.2fs)",
        result.final_loss,
        len(loss_trace) - 1,
        converged,
        result.wall_time_s,
    )
    return result
