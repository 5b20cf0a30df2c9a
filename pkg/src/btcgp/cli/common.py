"""Argument types and the parser class shared by every sub-command."""

from __future__ import annotations

import argparse
import math
import sys
from typing import Any, Callable, Dict, List, Mapping, NoReturn

from btcgp.errors import UsageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose errors surface as :class:`UsageError` (exit 1)."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return value


def int_at_least(minimum: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}, got {value}")
        return value

    parse.__name__ = f"int>={minimum}"
    return parse


def parse_int_list(text: str) -> List[int]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise UsageError("expected a non-empty comma separated list of integers")
    try:
        return [int(item) for item in items]
    except ValueError as exc:
        raise UsageError(f"invalid integer list {text!r}: {exc}") from exc


def _to_dict(cfg: Any) -> Dict[str, Any]:
    if hasattr(cfg, "to_dict"):
        return cfg.to_dict()
    if isinstance(cfg, Mapping):
        return dict(cfg)
    raise TypeError("Unsupported config type")


def setting(cfg: Any, key: str, default: Any = None) -> Any:
    return _to_dict(cfg).get(key, default)
