"""Unit tests for cross-validation splits and GP sampling"""

import numpy as np
import pytest

from btcgp.data.series import equispaced_inputs
from btcgp.errors import InputError, TooFewPoints, TooLargeForDenseCheck
from btcgp.kernels.se import REFERENCE_CASES, gram_dense
from btcgp.models import SeHyperParams, SyntheticSpec
from btcgp.sim.datasets import kfold_split, sample_gp, sample_gp_banded, synthetic_dataset

pytestmark = pytest.mark.unit


class TestKfold:
    def test_sizes_for_even_split(self):
        splits = kfold_split(10, 5, seed=0)
        assert len(splits) == 5
        assert all(len(test) == 2 and len(train) == 8 for train, test in splits)

    def test_remainder_goes_to_first_folds(self):
        sizes = [len(test) for _, test in kfold_split(11, 5, seed=3)]
        assert sizes == [3, 2, 2, 2, 2]

    @pytest.mark.parametrize("n, folds, seed", [(2, 2, 0), (17, 4, 1), (100, 5, 9), (53, 10, 4)])
    def test_partition(self, n, folds, seed):
        splits = kfold_split(n, folds, seed)
        tests = np.concatenate([test for _, test in splits])
        assert np.array_equal(np.sort(tests), np.arange(n))
        for train, test in splits:
            assert not set(train) & set(test)
            assert len(train) + len(test) == n
            assert np.all(np.diff(train) > 0) and np.all(np.diff(test) > 0)

    def test_seed_determinism(self):
        first = kfold_split(40, 5, seed=7)
        second = kfold_split(40, 5, seed=7)
        other = kfold_split(40, 5, seed=8)
        assert all(np.array_equal(a[1], b[1]) for a, b in zip(first, second))
        assert not all(np.array_equal(a[1], b[1]) for a, b in zip(first, other))

    def test_invalid(self):
        with pytest.raises(TooFewPoints):
            kfold_split(3, 5, seed=0)
        with pytest.raises(InputError):
            kfold_split(10, 1, seed=0)


class TestSampling:
    def test_seed_determinism(self):
        x = equispaced_inputs(50, 0.2)
        params = REFERENCE_CASES[0].params
        assert np.array_equal(sample_gp(x, params, 4), sample_gp(x, params, 4))
        assert not np.array_equal(sample_gp(x, params, 4), sample_gp(x, params, 5))

    def test_noise_only_limit(self):
        x = equispaced_inputs(2000, 0.2)
        params = SeHyperParams(signal_var=1e-12, lengthscale=1.0, noise_var=0.5)
        y = sample_gp(x, params, 0)
        assert np.var(y) == pytest.approx(0.5, rel=0.1)

    def test_variance_within_three_standard_errors(self):
        case = REFERENCE_CASES[0]
        x = equispaced_inputs(2000, case.delta)
        y = sample_gp(x, case.params, 1)
        cov = gram_dense(x, x, case.params) + case.noise_var * np.eye(2000)
        # standard error of mean(y^2) for correlated zero-mean Gaussian draws
        standard_error = np.sqrt(2.0 * np.sum(cov**2)) / 2000
        assert abs(np.mean(y**2) - (case.signal_var + case.noise_var)) < 3 * standard_error

    def test_dense_limit(self):
        with pytest.raises(TooLargeForDenseCheck):
            sample_gp(equispaced_inputs(11, 1.0), REFERENCE_CASES[0].params, 0, limit=10)

    def test_banded_sampler(self):
        x = equispaced_inputs(300, 0.2)
        params = REFERENCE_CASES[0].params
        y = sample_gp_banded(x, params, 2)
        assert y.shape == (300,)
        assert np.array_equal(y, sample_gp_banded(x, params, 2))
        assert np.all(np.isfinite(y))

    def test_synthetic_dataset(self):
        spec = SyntheticSpec(signal_var=1.0, lengthscale=1.0, noise_var=0.1, delta=0.5, n=30)
        data = synthetic_dataset(spec, seed=3)
        assert data.n == 30
        assert data.delta == pytest.approx(0.5)
        assert np.array_equal(data.y, synthetic_dataset(spec, seed=3).y)

    def test_synthetic_dataset_prefers_own_seed(self):
        spec = SyntheticSpec(signal_var=1.0, lengthscale=1.0, noise_var=0.1, delta=0.5, n=30, seed=12)
        assert np.array_equal(synthetic_dataset(spec, seed=1).y, synthetic_dataset(spec, seed=2).y)

    def test_synthetic_dataset_falls_back_to_banded(self):
        spec = SyntheticSpec(signal_var=1.0, lengthscale=1.0, noise_var=0.1, delta=0.5, n=40)
        assert synthetic_dataset(spec, seed=0, limit=20).n == 40
