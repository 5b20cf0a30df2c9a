"""``bandwidth`` sub-command."""

from __future__ import annotations

import argparse
from typing import Any

from btcgp.config import PESSIMISTIC_BANDWIDTH
from btcgp.kernels.se import bandwidth_ratio, clamp_bandwidth, theoretical_bandwidth
from btcgp.models import SeHyperParams

from .common import EXIT_OK, int_at_least, positive_float


def add_bandwidth_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Register the ``bandwidth`` sub-command."""

    p = subparsers.add_parser(
        "bandwidth",
        help="Theoretical bandwidth for given hyperparameters and spacing",
        description="Smallest bandwidth that keeps the cut-off covariance positive definite.",
    )
    p.add_argument("--sigma2", type=positive_float, required=True, help="Signal variance")
    p.add_argument("--lengthscale", type=positive_float, required=True)
    p.add_argument("--noise", type=positive_float, required=True, help="Noise variance")
    p.add_argument("--delta", type=positive_float, required=True, help="Minimum input spacing")
    p.add_argument("--n", type=int_at_least(1), default=None, help="Clamp to n - 1")
    p.set_defaults(func=run_bandwidth_cmd)


def run_bandwidth_cmd(args: argparse.Namespace, cfg: Any) -> int:
    params = SeHyperParams(signal_var=args.sigma2, lengthscale=args.lengthscale, noise_var=args.noise)
    ratio = bandwidth_ratio(params, args.delta)
    k = theoretical_bandwidth(params, args.delta)

    print(f"k: {k}")
    if ratio > 1.0:
        print(f"branch: log-ratio (2*s2*l^2/(3*sn2*delta^2) = {ratio:.6g} > 1)")
    else:
        print(f"branch: fallback (2*s2*l^2/(3*sn2*delta^2) = {ratio:.6g} <= 1)")
    if args.n is not None:
        clamped = clamp_bandwidth(k, args.n)
        if clamped != k:
            print(f"clamped: {clamped} (n - 1 for n={args.n})")
    if k > PESSIMISTIC_BANDWIDTH:
        print(
            f"warning: bandwidth {k} is very large; the spacing is tiny relative to the "
            "lengthscale, consider thinning the inputs or a spacing quantile"
        )
    return EXIT_OK
