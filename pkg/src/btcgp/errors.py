"""Exception hierarchy shared by every btcgp module."""

from __future__ import annotations

from typing import Optional, Sequence

__all__ = [
    "BtcGpError",
    "InputError",
    "ConfigError",
    "UsageError",
    "NumericalError",
    "AsymmetricInput",
    "BandwidthOutOfRange",
    "DimensionMismatch",
    "DuplicatePoints",
    "TooFewPoints",
    "ZeroVariance",
    "ConstantTarget",
    "AlreadyNoised",
    "TooLargeForDenseCheck",
    "NotPositiveDefinite",
    "PdFailure",
    "NonFiniteLoss",
]


class BtcGpError(RuntimeError):
    """Generic btcgp failure."""


class InputError(BtcGpError, ValueError):
    """Raised when caller supplied data violates a precondition."""


class ConfigError(InputError):
    """Raised when a config, model or report file fails schema validation."""


class UsageError(BtcGpError):
    """Raised for inconsistent or out-of-range command-line flags."""


class NumericalError(BtcGpError, ArithmeticError):
    """Raised when a numerical procedure breaks down."""


class AsymmetricInput(InputError):
    def __init__(self, max_deviation: float, tolerance: float) -> None:
        self.max_deviation = max_deviation
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not symmetric: max |A - A^T| = {max_deviation:.3e} > {tolerance:.1e}"
        )


class BandwidthOutOfRange(InputError):
    def __init__(self, k: int, n: int) -> None:
        self.k = k
        self.n = n
        super().__init__(f"bandwidth k={k} outside [0, {max(n - 1, 0)}] for n={n}")


class DimensionMismatch(InputError):
    def __init__(self, expected: int, got: int, what: str = "rows") -> None:
        self.expected = expected
        self.got = got
        super().__init__(f"expected {expected} {what}, got {got}")


class DuplicatePoints(InputError):
    def __init__(self, index: int, gap: float) -> None:
        self.index = index
        self.gap = gap
        super().__init__(
            f"inputs must be strictly increasing: gap {gap!r} between positions {index} and {index + 1}"
        )


class TooFewPoints(InputError):
    def __init__(self, n: int, required: int) -> None:
        self.n = n
        self.required = required
        super().__init__(f"need at least {required} points, got {n}")


class ZeroVariance(InputError):
    """Observations are constant so no variance-based initialisation exists."""


class ConstantTarget(InputError):
    """NMSE denominator is zero because the test targets are constant."""


class AlreadyNoised(InputError):
    """Observation noise has already been added to the predictive covariance."""


class TooLargeForDenseCheck(InputError):
    def __init__(self, size: int, limit: int) -> None:
        self.size = size
        self.limit = limit
        super().__init__(f"dense computation refused: size {size} exceeds limit {limit}")


class NotPositiveDefinite(NumericalError):
    def __init__(self, pivot_index: int, pivot: Optional[float] = None) -> None:
        self.pivot_index = pivot_index
        self.pivot = pivot
        detail = "" if pivot is None else f" (pivot={pivot!r})"
        super().__init__(f"matrix not positive definite at pivot {pivot_index}{detail}")


class PdFailure(NumericalError):
    def __init__(self, iteration: int, pivot_index: int, reason: str = "") -> None:
        self.iteration = iteration
        self.pivot_index = pivot_index
        message = f"positive definiteness lost at iteration {iteration} (pivot {pivot_index})"
        if reason:
            message = f"{message}: {reason}"
        super().__init__(message)


class NonFiniteLoss(NumericalError):
    def __init__(self, log_params: Sequence[float], value: float) -> None:
        self.log_params = tuple(float(v) for v in log_params)
        self.value = value
        super().__init__(f"loss is {value!r} at log-params {self.log_params}")
