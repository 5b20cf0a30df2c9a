import numpy as np
import pytest

from btcgp.data.series import Dataset1D, equispaced_inputs, load_series_csv, write_series_csv
from btcgp.errors import DimensionMismatch, DuplicatePoints, InputError

pytestmark = pytest.mark.unit


def test_from_arrays_records_spacing():
    data = Dataset1D.from_arrays([0.0, 0.5, 2.0], [1.0, 2.0, 3.0])
    assert data.n == 3
    assert data.delta == pytest.approx(0.5)


def test_single_point_has_infinite_spacing():
    assert Dataset1D.from_arrays([1.0], [2.0]).delta == np.inf


def test_sort_option_keeps_pairs_together():
    data = Dataset1D.from_arrays([2.0, 0.0, 1.0], [20.0, 0.0, 10.0], sort=True)
    np.testing.assert_array_equal(data.x, [0.0, 1.0, 2.0])
    np.testing.assert_array_equal(data.y, [0.0, 10.0, 20.0])


def test_unsorted_without_sort_is_rejected():
    with pytest.raises(DuplicatePoints):
        Dataset1D.from_arrays([1.0, 0.0], [0.0, 0.0])


@pytest.mark.parametrize(
    "x, y, error",
    [
        ([0.0, 1.0], [0.0], DimensionMismatch),
        ([], [], InputError),
        ([0.0, np.nan], [0.0, 1.0], InputError),
        ([0.0, 1.0], [0.0, np.inf], InputError),
    ],
)
def test_invalid_arrays(x, y, error):
    with pytest.raises(error):
        Dataset1D.from_arrays(x, y)


def test_arrays_are_read_only():
    data = Dataset1D.from_arrays([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        data.y[0] = 5.0


def test_subset_and_window():
    data = Dataset1D.from_arrays(equispaced_inputs(6, 1.0), np.arange(6.0))
    sub = data.subset([4, 1, 2])
    np.testing.assert_array_equal(sub.x, [1.0, 2.0, 4.0])
    assert sub.delta == 1.0
    window = data.window(2, 5)
    np.testing.assert_array_equal(window.y, [2.0, 3.0, 4.0])


def test_fingerprint_tracks_content():
    a = Dataset1D.from_arrays([0.0, 1.0], [1.0, 2.0])
    b = Dataset1D.from_arrays([0.0, 1.0], [1.0, 2.0])
    c = Dataset1D.from_arrays([0.0, 1.0], [1.0, 2.0000001])
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != c.fingerprint()


def test_equispaced_inputs():
    np.testing.assert_allclose(equispaced_inputs(4, 0.2, start=1.0), [1.0, 1.2, 1.4, 1.6])
    assert equispaced_inputs(0, 0.2).shape == (0,)
    with pytest.raises(InputError):
        equispaced_inputs(3, 0.0)


class TestCsv:
    """CSV loading and writing"""

    def test_round_trip_is_exact(self, tmp_path, rng):
        data = Dataset1D.from_arrays(np.sort(rng.uniform(0, 1, 20)), rng.standard_normal(20))
        loaded = load_series_csv(write_series_csv(data, tmp_path / "series.csv"))
        assert np.array_equal(loaded.x, data.x)
        assert np.array_equal(loaded.y, data.y)

    def test_rows_are_sorted_on_load(self, tmp_path):
        path = tmp_path / "unsorted.csv"
        path.write_text("X,Y\n2,20\n0,0\n1,10\n")
        data = load_series_csv(path)
        np.testing.assert_array_equal(data.x, [0.0, 1.0, 2.0])
        np.testing.assert_array_equal(data.y, [0.0, 10.0, 20.0])

    def test_duplicate_inputs_rejected(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("x,y\n0,1\n1,2\n1,3\n")
        with pytest.raises(DuplicatePoints):
            load_series_csv(path)

    @pytest.mark.parametrize(
        "content",
        ["a,b\n1,2\n", "x,y\n1,abc\n", "x,y\n1,2\n2,\n", ""],
        ids=["wrong-header", "non-numeric", "missing-value", "empty"],
    )
    def test_malformed(self, tmp_path, content):
        path = tmp_path / "bad.csv"
        path.write_text(content)
        with pytest.raises(InputError):
            load_series_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_series_csv(tmp_path / "nope.csv")
