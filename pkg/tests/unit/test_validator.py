"""
Unit tests for validator module
"""
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

import config
from modules import validator
from modules.simlab import EstimatorConfig, ExperimentSpec, preset_model
from modules.validator import check_experiment_admission, format_bytes, validate_data_csv

pytestmark = pytest.mark.unit


def _spec():
    return ExperimentSpec(
        name="M1",
        model=preset_model("M1"),
        n=100,
        reps=2,
        grid=[[0.5, 0.5]],
        m_values=(1, 2),
        estimators=[EstimatorConfig("sliding")],
    )


class TestDataValidation:
    """Tests for uploaded data files"""

    def test_valid_file(self, data_csv):
        """A numeric CSV is accepted with its shape"""
        result = validate_data_csv(data_csv)
        assert result.is_valid is True
        assert (result.data["n"], result.data["d"]) == (300, 2)
        assert result.data["matrix"].columns == ["x1", "x2"]

    def test_nonexistent_file(self):
        """Missing files are rejected"""
        result = validate_data_csv("/nonexistent/data.csv")
        assert result.is_valid is False
        assert "not found" in result.message.lower()

    def test_empty_file(self, tmp_path):
        """Zero-byte files are rejected"""
        path = tmp_path / "empty.csv"
        path.write_text("")
        assert "empty" in validate_data_csv(str(path)).message.lower()

    def test_wrong_extension(self, tmp_path):
        """Only .csv files"""
        path = tmp_path / "data.txt"
        path.write_text("a,b\n1,2\n")
        assert validate_data_csv(str(path)).is_valid is False

    def test_non_numeric(self, tmp_path):
        """Text cells are reported"""
        path = tmp_path / "data.csv"
        pd.DataFrame({"a": ["x", "y"], "b": [1.0, 2.0]}).to_csv(path, index=False)
        result = validate_data_csv(str(path))
        assert result.is_valid is False
        assert result.message.startswith("Invalid data file")

    def test_single_column(self, tmp_path):
        """At least two coordinates are needed"""
        path = tmp_path / "data.csv"
        pd.DataFrame({"a": [1.0, 2.0]}).to_csv(path, index=False)
        assert validate_data_csv(str(path)).is_valid is False

    def test_too_few_rows(self, data_csv):
        """min_rows guards the largest block size"""
        result = validate_data_csv(data_csv, min_rows=301)
        assert result.is_valid is False
        assert "301" in result.message

    def test_too_large(self, data_csv, monkeypatch):
        """Files above MAX_UPLOAD_BYTES are rejected"""
        monkeypatch.setattr(config, "MAX_UPLOAD_BYTES", 10)
        assert "too large" in validate_data_csv(data_csv).message.lower()

    def test_ties_are_mentioned(self, tmp_path):
        """Tied columns are accepted with a note"""
        path = tmp_path / "data.csv"
        pd.DataFrame({"a": [1.0, 1.0, 2.0], "b": np.arange(3.0)}).to_csv(path, index=False)
        result = validate_data_csv(str(path))
        assert result.is_valid is True
        assert result.data["tied_columns"] == [0]
        assert "ties" in result.message


class TestAdmission:
    """Tests for the memory admission check"""

    @pytest.fixture
    def available(self, monkeypatch):
        """Pin the reported free memory"""
        def _set(value):
            monkeypatch.setattr(validator.psutil, "virtual_memory", lambda: SimpleNamespace(available=value))
        return _set

    def test_allowed(self, available, monkeypatch):
        """Small experiments are admitted"""
        available(8 * 1024 ** 3)
        monkeypatch.setattr(validator, "estimate_memory_bytes", lambda spec, workers=None: 1024)
        result = check_experiment_admission(_spec())
        assert result["allowed"] is True
        assert result["estimated_ram"] == 1024

    def test_too_big(self, available, monkeypatch):
        """Experiments larger than free memory are refused with advice"""
        available(512 * 1024 ** 2)
        monkeypatch.setattr(validator, "estimate_memory_bytes", lambda spec, workers=None: 1024 ** 3)
        result = check_experiment_admission(_spec())
        assert result["allowed"] is False
        assert "Reduce reps" in result["message"]

    def test_server_low_on_memory(self, available):
        """Below MIN_FREE_RAM_REQUIRED nothing is admitted"""
        available(1024)
        result = check_experiment_admission(_spec())
        assert result["allowed"] is False
        assert "insufficient" in result["message"]


class TestFormatBytes:
    """Tests for byte formatting"""

    @pytest.mark.parametrize("size,expected", [
        (512, "512.0 B"),
        (1536, "1.5 KB"),
        (5 * 1024 ** 2, "5.0 MB"),
        (3 * 1024 ** 3, "3.0 GB"),
    ])
    def test_format(self, size, expected):
        """Units step by 1024"""
        assert format_bytes(size) == expected
