"""NMSE against bandwidth on the reference cases"""

import pytest

from btcgp.config import Config
from btcgp.kernels.se import REFERENCE_CASES
from btcgp.models import ExperimentConfig, MethodSpec, SyntheticSpec
from btcgp.sim.engine import run_experiment

pytestmark = pytest.mark.integration


def sweep(case, tmp_path, *, n, ks, folds, max_iters=200):
    config = ExperimentConfig(
        name=f"sweep_{case.name}",
        synthetic=SyntheticSpec(
            signal_var=case.signal_var,
            lengthscale=case.lengthscale,
            noise_var=case.noise_var,
            delta=case.delta,
            n=n,
        ),
        methods=[MethodSpec(kind="exact"), MethodSpec(kind="btc", k=ks)],
        folds=folds,
        seed=7,
        max_iters=max_iters,
        output_dir=str(tmp_path),
    )
    exact, *btc = run_experiment(config, settings=Config(), write=False)
    return exact, btc


def assert_flat_above_theoretical(case, exact, btc):
    assert exact.pd_valid_all
    by_k = {report.k: report for report in btc}
    assert by_k[case.k].pd_valid_all
    for k, report in by_k.items():
        if k >= case.k and report.pd_valid_all:
            assert report.nmse_mean == pytest.approx(exact.nmse_mean, rel=0.10)


def test_reference_bandwidth_matches_exact(tmp_path, isolated_env):
    case = REFERENCE_CASES[0]
    exact, btc = sweep(case, tmp_path, n=400, ks=[case.k, case.k + 10], folds=2)
    assert_flat_above_theoretical(case, exact, btc)


@pytest.mark.slow
@pytest.mark.parametrize("case", REFERENCE_CASES, ids=lambda case: case.name)
def test_full_sweep(case, tmp_path, isolated_env):
    exact, btc = sweep(case, tmp_path, n=2000, ks=list(range(1, 51)), folds=5)
    assert_flat_above_theoretical(case, exact, btc)
