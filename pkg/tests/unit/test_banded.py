"""Unit tests for band storage and the banded Cholesky"""

import numpy as np
import pytest

from btcgp.errors import AsymmetricInput, BandwidthOutOfRange, DimensionMismatch, InputError, NotPositiveDefinite
from btcgp.linalg.banded import (
    BandedSymMatrix,
    add_diagonal,
    band_from_dense,
    cholesky_banded,
    factor_matvec,
    logdet_banded,
    quad_form,
    solve_banded,
    to_dense,
)
from dense_reference import cutoff, random_spd_banded, relative_error

pytestmark = pytest.mark.unit

THREE = np.array([[1.0, 0.5, 0.1], [0.5, 1.0, 0.5], [0.1, 0.5, 1.0]])


def identity(n, k=0):
    band = np.zeros((k + 1, n))
    band[0] = 1.0
    return BandedSymMatrix(n=n, k=k, band=band)


class TestBandFromDense:
    """Cut-off operator and dense round trip"""

    def test_full_bandwidth_keeps_everything(self):
        assert np.array_equal(to_dense(band_from_dense(THREE, 2)), THREE)

    def test_bandwidth_one_zeroes_corners(self):
        expected = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, 0.5], [0.0, 0.5, 1.0]])
        assert np.array_equal(to_dense(band_from_dense(THREE, 1)), expected)

    def test_bandwidth_zero_is_diagonal(self):
        assert np.array_equal(to_dense(band_from_dense(THREE, 0)), np.eye(3))

    def test_padding_is_zero(self):
        B = band_from_dense(THREE, 2)
        assert B.band[1, 2] == 0.0
        assert np.all(B.band[2, 1:] == 0.0)

    def test_rejects_asymmetric(self):
        A = THREE.copy()
        A[0, 1] += 1e-6
        with pytest.raises(AsymmetricInput):
            band_from_dense(A, 1)

    @pytest.mark.parametrize("k", [-1, 3])
    def test_rejects_out_of_range_bandwidth(self, k):
        with pytest.raises(BandwidthOutOfRange):
            band_from_dense(THREE, k)

    def test_round_trip_is_bit_exact(self, rng):
        for n, k in [(1, 0), (7, 3), (40, 39), (60, 5)]:
            A = cutoff(random_spd_banded(rng, n, min(k, n - 1)), k)
            B = band_from_dense(A, k)
            assert np.array_equal(to_dense(B), A)
            again = band_from_dense(to_dense(B), k)
            assert np.array_equal(again.band, B.band)

    def test_cutoff_is_idempotent_and_linear(self, rng):
        A = random_spd_banded(rng, 30, 29)
        C = random_spd_banded(rng, 30, 29)
        once = to_dense(band_from_dense(A, 4))
        assert np.array_equal(to_dense(band_from_dense(once, 4)), once)
        combined = to_dense(band_from_dense(2.0 * A + 3.0 * C, 4))
        separate = 2.0 * once + 3.0 * to_dense(band_from_dense(C, 4))
        np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-13)

    def test_band_is_read_only(self):
        B = band_from_dense(THREE, 1)
        with pytest.raises(ValueError):
            B.band[0, 0] = 2.0

    def test_constructor_copies_caller_array(self):
        band = np.ones((1, 3))
        B = BandedSymMatrix(n=3, k=0, band=band)
        band[0, 0] = 5.0
        assert B.band[0, 0] == 1.0

    @pytest.mark.parametrize("value", [0.25, -1e-300, np.nan])
    def test_non_zero_padding_rejected(self, value):
        band = np.zeros((3, 4))
        band[0] = 1.0
        band[2, 3] = value
        with pytest.raises(InputError, match="padding"):
            BandedSymMatrix(n=4, k=2, band=band)

    def test_zero_padding_round_trips(self):
        band = np.zeros((2, 3))
        band[0] = 1.0
        band[1, :2] = 0.5
        B = BandedSymMatrix(n=3, k=1, band=band)
        assert np.array_equal(band_from_dense(to_dense(B), 1).band, B.band)


class TestAddDiagonal:
    def test_shifts_identity(self):
        shifted = add_diagonal(identity(5, 1), 2.0)
        assert np.array_equal(to_dense(shifted), 3.0 * np.eye(5))
        assert shifted.k == 1

    def test_zero_shift_is_identity_operation(self):
        B = band_from_dense(THREE, 1)
        assert add_diagonal(B, 0.0) is B

    def test_negative_shift_rejected(self):
        with pytest.raises(InputError):
            add_diagonal(identity(3), -1.0)

    def test_commutes_with_cutoff(self, rng):
        A = random_spd_banded(rng, 25, 24)
        left = to_dense(add_diagonal(band_from_dense(A, 3), 0.7))
        right = to_dense(band_from_dense(A + 0.7 * np.eye(25), 3))
        np.testing.assert_allclose(left, right, rtol=0, atol=1e-15)


class TestCholesky:
    """Banded factorisation against hand values and numpy"""

    def test_identity(self):
        L = cholesky_banded(identity(4, 2))
        assert np.array_equal(L.to_dense(), np.eye(4))

    def test_two_by_two(self):
        L = cholesky_banded(band_from_dense(np.array([[4.0, 2.0], [2.0, 5.0]]), 1))
        np.testing.assert_allclose(L.to_dense(), [[2.0, 0.0], [1.0, 2.0]], rtol=1e-15)

    def test_indefinite_reports_pivot(self):
        with pytest.raises(NotPositiveDefinite) as info:
            cholesky_banded(band_from_dense(np.array([[1.0, 2.0], [2.0, 1.0]]), 1))
        assert info.value.pivot_index == 1

    def test_non_finite_entries_rejected(self):
        band = np.ones((1, 3))
        band[0, 2] = np.inf
        with pytest.raises(NotPositiveDefinite) as info:
            cholesky_banded(BandedSymMatrix(n=3, k=0, band=band))
        assert info.value.pivot_index == 2

    def test_matches_numpy(self, rng):
        A = random_spd_banded(rng, 200, 10)
        L = cholesky_banded(band_from_dense(A, 10))
        expected = np.linalg.cholesky(A)
        assert relative_error(L.to_dense(), expected) < 1e-10

    def test_factor_reconstructs_matrix(self, rng):
        A = random_spd_banded(rng, 80, 6)
        L = cholesky_banded(band_from_dense(A, 6)).to_dense()
        np.testing.assert_allclose(L @ L.T, A, rtol=0, atol=1e-12 * np.abs(A).max())
        assert np.all(np.diag(L) > 0)
        assert np.array_equal(np.triu(L, 1), np.zeros_like(L))

    def test_factor_keeps_bandwidth(self, rng):
        A = random_spd_banded(rng, 50, 4)
        L = cholesky_banded(band_from_dense(A, 4)).to_dense()
        offsets = np.subtract.outer(np.arange(50), np.arange(50))
        assert np.all(L[offsets > 4] == 0.0)


class TestSolveLogdetQuad:
    def test_solve_identity(self):
        L = cholesky_banded(identity(3, 1))
        assert np.array_equal(solve_banded(L, np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])

    def test_solve_two_by_two(self):
        L = cholesky_banded(band_from_dense(np.array([[4.0, 2.0], [2.0, 5.0]]), 1))
        np.testing.assert_allclose(solve_banded(L, np.array([4.0, 2.0])), [1.0, 0.0], atol=1e-15)

    def test_solve_matches_numpy(self, rng):
        A = random_spd_banded(rng, 300, 15)
        rhs = rng.standard_normal(300)
        L = cholesky_banded(band_from_dense(A, 15))
        assert relative_error(solve_banded(L, rhs), np.linalg.solve(A, rhs)) < 1e-9

    def test_solve_matrix_rhs(self, rng):
        A = random_spd_banded(rng, 60, 5)
        rhs = rng.standard_normal((60, 4))
        X = solve_banded(cholesky_banded(band_from_dense(A, 5)), rhs)
        assert X.shape == (60, 4)
        np.testing.assert_allclose(A @ X, rhs, atol=1e-8)

    def test_solve_dimension_mismatch(self):
        L = cholesky_banded(identity(3))
        with pytest.raises(DimensionMismatch):
            solve_banded(L, np.ones(4))

    def test_logdet(self, rng):
        assert logdet_banded(cholesky_banded(identity(6, 2))) == 0.0
        L = cholesky_banded(band_from_dense(np.array([[4.0, 2.0], [2.0, 5.0]]), 1))
        assert logdet_banded(L) == pytest.approx(np.log(16.0), rel=1e-15)
        A = random_spd_banded(rng, 250, 12)
        sign, expected = np.linalg.slogdet(A)
        assert sign == 1.0
        assert logdet_banded(cholesky_banded(band_from_dense(A, 12))) == pytest.approx(expected, abs=1e-9)

    def test_quad_form(self, rng):
        L = cholesky_banded(identity(2))
        assert quad_form(L, np.zeros(2)) == 0.0
        assert quad_form(L, np.array([3.0, 4.0])) == 25.0
        A = random_spd_banded(rng, 120, 9)
        y = rng.standard_normal(120)
        expected = y @ np.linalg.solve(A, y)
        assert quad_form(cholesky_banded(band_from_dense(A, 9)), y) == pytest.approx(expected, rel=1e-9)

    def test_quad_form_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            quad_form(cholesky_banded(identity(3)), np.ones(2))

    def test_factor_matvec(self, rng):
        A = random_spd_banded(rng, 40, 3)
        L = cholesky_banded(band_from_dense(A, 3))
        z = rng.standard_normal(40)
        np.testing.assert_allclose(factor_matvec(L, z), L.to_dense() @ z, rtol=1e-13, atol=1e-13)
