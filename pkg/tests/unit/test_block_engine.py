"""
Unit tests for block maxima and pseudo-observations
"""
import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modules.block_engine import (
    DataMatrix,
    block_maxima,
    block_size_from_scale,
    disjoint_maxima,
    pseudo_observations,
    sliding_maxima,
)
from modules.errors import BlockSizeError, ExperimentError, InvalidModelError

pytestmark = pytest.mark.unit

COLUMN = [3.0, 1.0, 4.0, 1.0, 5.0]


def _two_columns(column):
    column = np.asarray(column, dtype=float)
    return np.column_stack([column, column[::-1]])


def _brute_sliding(values, m):
    return np.array([values[i:i + m].max(axis=0) for i in range(values.shape[0] - m + 1)])


def _brute_ranks(values):
    k = values.shape[0]
    return np.array([[np.sum(values[:, j] <= values[i, j]) for j in range(values.shape[1])] for i in range(k)]) / k


class TestDataMatrix:
    """Tests for the data container"""

    def test_shape_properties(self, small_data):
        """n and d follow the array"""
        data = DataMatrix(small_data)
        assert (data.n, data.d) == (300, 2)
        assert data.columns == ["x1", "x2"]

    def test_read_only(self, small_data):
        """Stored values cannot be modified"""
        data = DataMatrix(small_data)
        with pytest.raises(ValueError):
            data.values[0, 0] = 0.0

    def test_rejects_single_column(self):
        """d >= 2"""
        with pytest.raises(InvalidModelError):
            DataMatrix(np.ones((5, 1)))

    def test_rejects_nan(self):
        """Non-finite entries are rejected"""
        with pytest.raises(InvalidModelError):
            DataMatrix(np.array([[1.0, np.nan]]))

    def test_ties_are_reported(self):
        """Repeated values mark the column"""
        data = DataMatrix(_two_columns(COLUMN))
        assert data.has_ties
        assert data.tied_columns == [0, 1]

    def test_csv_round_trip(self, tmp_path, small_data):
        """to_csv then from_csv restores values and column names"""
        path = str(tmp_path / "x.csv")
        DataMatrix(small_data, ["a", "b"]).to_csv(path)
        data = DataMatrix.from_csv(path)
        assert data.columns == ["a", "b"]
        assert np.allclose(data.values, small_data, rtol=0, atol=1e-15)

    def test_csv_non_numeric(self, tmp_path):
        """Text cells fail with the path in the message"""
        path = tmp_path / "bad.csv"
        pd.DataFrame({"a": ["x", "y"], "b": [1, 2]}).to_csv(path, index=False)
        with pytest.raises(ExperimentError, match="bad.csv"):
            DataMatrix.from_csv(str(path))

    def test_csv_missing_file(self, tmp_path):
        """Unreadable files raise ExperimentError"""
        with pytest.raises(ExperimentError):
            DataMatrix.from_csv(str(tmp_path / "missing.csv"))


class TestSlidingMaxima:
    """Tests for sliding block maxima"""

    def test_hand_example(self):
        """[3,1,4,1,5] with m = 2 gives [3,4,4,5]"""
        panel = sliding_maxima(_two_columns(COLUMN), 2)
        assert panel.maxima[:, 0].tolist() == [3.0, 4.0, 4.0, 5.0]
        assert panel.k == 4

    def test_block_size_one_is_identity(self, small_data):
        """m = 1 copies the data"""
        assert np.array_equal(sliding_maxima(small_data, 1).maxima, small_data)

    def test_full_block(self, small_data):
        """m = n gives one row of column maxima"""
        panel = sliding_maxima(small_data, small_data.shape[0])
        assert np.array_equal(panel.maxima, small_data.max(axis=0, keepdims=True))

    @pytest.mark.parametrize("m", [0, 301, 2.5])
    def test_out_of_range(self, small_data, m):
        """m outside [1, n] raises"""
        with pytest.raises(BlockSizeError):
            sliding_maxima(small_data, m)

    def test_brute_force_oracle(self):
        """200 random cases match window-by-window maxima"""
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 60))
            d = int(rng.integers(2, 5))
            m = int(rng.integers(1, n + 1))
            values = rng.normal(size=(n, d))
            assert np.array_equal(sliding_maxima(values, m).maxima, _brute_sliding(values, m))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(-20, 20), min_size=1, max_size=40), st.data())
    def test_property_matches_brute_force(self, column, data):
        """Any integer column, any valid m"""
        values = _two_columns(column)
        m = data.draw(st.integers(1, len(column)))
        assert np.array_equal(sliding_maxima(values, m).maxima, _brute_sliding(values, m))


class TestDisjointMaxima:
    """Tests for disjoint block maxima"""

    def test_hand_example(self):
        """[3,1,4,1,5] with m = 2 gives [3,4]; the fifth row is discarded"""
        panel = disjoint_maxima(_two_columns(COLUMN), 2)
        assert panel.maxima[:, 0].tolist() == [3.0, 4.0]

    def test_block_size_one_is_identity(self, small_data):
        """m = 1 copies the data"""
        assert np.array_equal(disjoint_maxima(small_data, 1).maxima, small_data)

    def test_block_count(self, small_data):
        """floor(n / m) blocks"""
        assert disjoint_maxima(small_data, 7).k == 300 // 7

    def test_unknown_scheme(self, small_data):
        """Only sliding and disjoint exist"""
        with pytest.raises(InvalidModelError):
            block_maxima(small_data, 2, "overlapping")


class TestPseudoObservations:
    """Tests for max-rank pseudo-observations"""

    def test_hand_example(self):
        """[3,4,4,5] gives [0.25, 0.75, 0.75, 1.0]"""
        panel = sliding_maxima(_two_columns(COLUMN), 2)
        pseudo = pseudo_observations(panel)
        assert pseudo.u_hat[:, 0].tolist() == [0.25, 0.75, 0.75, 1.0]

    def test_increasing_column(self):
        """Strictly increasing column gives 1/k, ..., 1"""
        values = _two_columns(np.arange(1.0, 9.0))
        pseudo = pseudo_observations(block_maxima(values, 1))
        assert np.allclose(pseudo.u_hat[:, 0], np.arange(1, 9) / 8)

    def test_constant_column(self):
        """Every entry of a constant column is 1"""
        values = np.column_stack([np.ones(6), np.arange(6.0)])
        pseudo = pseudo_observations(block_maxima(values, 2, "disjoint"))
        assert np.all(pseudo.u_hat[:, 0] == 1.0)

    def test_counting_oracle(self):
        """Ranks equal definition-level counting on random panels"""
        rng = np.random.default_rng(11)
        for _ in range(50):
            values = rng.integers(0, 6, size=(int(rng.integers(1, 30)), 3)).astype(float)
            panel = block_maxima(values, 1)
            assert np.array_equal(pseudo_observations(panel).u_hat, _brute_ranks(values))


class TestBlockSizeFromScale:
    """Tests for floor(m a)"""

    def test_values(self):
        """floor with a guard against representation error"""
        assert block_size_from_scale(10, 1.5) == 15
        assert block_size_from_scale(10, 0.3) == 3
        assert block_size_from_scale(7, 0.5) == 3

    def test_negative_scale(self):
        """a < 0 raises"""
        with pytest.raises(BlockSizeError):
            block_size_from_scale(10, -1.0)
