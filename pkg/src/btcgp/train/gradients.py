"""Finite-difference gradients in log-parameter space."""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Optional

import numpy as np

from btcgp.config import DEFAULT_FD_STEP
from btcgp.errors import InputError, NonFiniteLoss, NotPositiveDefinite

LossFn = Callable[[np.ndarray], float]
PdHook = Callable[[NotPositiveDefinite], None]


def loss_gradient_fd(
    loss: LossFn,
    log_params: np.ndarray,
    h: float = DEFAULT_FD_STEP,
    f0: Optional[float] = None,
    on_pd_failure: Optional[PdHook] = None,
) -> np.ndarray:
    """Central differences ``(f(p + h e_i) - f(p - h e_i)) / 2h``.

    A step ``h`` in log coordinates is a relative step of the parameter
    itself.  When ``f0``, the loss at ``log_params``, is supplied, a probe
    whose covariance is not positive definite is replaced by a one-sided
    difference on the other side and reported to ``on_pd_failure``.  Without
    ``f0``, or when both probes fail, :class:`NotPositiveDefinite` propagates.
    """

    if not (math.isfinite(h) and h > 0):
        raise InputError(f"finite-difference step must be positive, got {h}")
    log_params = np.asarray(log_params, dtype=float)
    grad = np.empty_like(log_params)
    for i in range(log_params.shape[0]):
        step = np.zeros_like(log_params)
        step[i] = h
        values: Dict[float, float] = {}
        failures: List[NotPositiveDefinite] = []
        for sign in (1.0, -1.0):
            probe = log_params + sign * step
            try:
                value = loss(probe)
            except NotPositiveDefinite as exc:
                if f0 is None:
                    raise
                if on_pd_failure is not None:
                    on_pd_failure(exc)
                failures.append(exc)
                continue
            if not math.isfinite(value):
                raise NonFiniteLoss(probe, value)
            values[sign] = value

        if len(values) == 2:
            grad[i] = (values[1.0] - values[-1.0]) / (2.0 * h)
        elif 1.0 in values:
            grad[i] = (values[1.0] - f0) / h
        elif -1.0 in values:
            grad[i] = (f0 - values[-1.0]) / h
        else:
            raise failures[0]
    return grad
