import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))
TESTS = Path(__file__).resolve().parent
if str(TESTS) not in sys.path:
    sys.path.insert(0, str(TESTS))

from btcgp.data.series import Dataset1D, equispaced_inputs  # noqa: E402
from btcgp.kernels.se import REFERENCE_CASES  # noqa: E402
from btcgp.models import SeHyperParams  # noqa: E402
from btcgp.sim.datasets import sample_gp  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def case_a():
    return REFERENCE_CASES[0]


@pytest.fixture
def unit_params():
    return SeHyperParams(signal_var=1.0, lengthscale=1.0, noise_var=0.1)


def make_series(n, params, delta, seed=0):
    x = equispaced_inputs(n, delta)
    return Dataset1D.from_arrays(x, sample_gp(x, params, seed))


@pytest.fixture
def small_series(unit_params):
    """40 equispaced points drawn from a unit SE GP."""
    return make_series(40, unit_params, 0.25, seed=11)


@pytest.fixture
def case_a_series(case_a):
    """300 points of the first reference case."""
    return make_series(300, case_a.params, case_a.delta, seed=5)


@pytest.fixture
def isolated_env(monkeypatch, tmp_path):
    """No BTCGP_* variables and a cwd without a .env file."""
    import os

    for key in list(os.environ):
        if key.startswith("BTCGP_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path
