"""
Validator Module - Data CSV validation and experiment admission checks
"""
import os
from typing import Dict, Optional

import psutil

import config
from modules.block_engine import DataMatrix
from modules.errors import BlockmaxError
from modules.simlab import ExperimentSpec, estimate_memory_bytes


class ValidationResult:
    """Result of a validation check"""
    def __init__(self, is_valid: bool, message: str, data: Dict = None):
        self.is_valid = is_valid
        self.message = message
        self.data = data or {}


def validate_data_csv(file_path: str, min_rows: int = 1) -> ValidationResult:
    """
    Validate an uploaded data file: header row, one numeric column per coordinate.

    Args:
        file_path: Path to the CSV file
        min_rows: Smallest acceptable number of rows (e.g. the largest block size)

    Returns:
        ValidationResult; on success data holds the DataMatrix and its shape
    """
    if not os.path.exists(file_path):
        return ValidationResult(False, "File not found")

    file_size = os.path.getsize(file_path)
    if file_size == 0:
        return ValidationResult(False, "The uploaded file is empty")
    if file_size > config.MAX_UPLOAD_BYTES:
        return ValidationResult(
            False,
            f"File too large ({format_bytes(file_size)}). Maximum allowed: {format_bytes(config.MAX_UPLOAD_BYTES)}"
        )
    if not file_path.lower().endswith(".csv"):
        return ValidationResult(False, "File must be a CSV")

    try:
        data = DataMatrix.from_csv(file_path)
    except BlockmaxError as e:
        return ValidationResult(False, f"Invalid data file: {str(e)}")

    if data.n < min_rows:
        return ValidationResult(False, f"Data has {data.n} rows, at least {min_rows} are needed")

    message = "Data is valid"
    if data.has_ties:
        message = f"Data is valid (ties in columns {data.tied_columns}; continuous margins are assumed)"
    return ValidationResult(
        True,
        message,
        data={"matrix": data, "n": data.n, "d": data.d, "file_size": file_size, "tied_columns": data.tied_columns},
    )


def check_experiment_admission(spec: ExperimentSpec, workers: Optional[int] = None) -> Dict:
    """
    Check whether the server has memory for an experiment before queueing it.

    Returns:
        Dictionary with allowed status, estimated and available RAM and a message
    """
    estimated = estimate_memory_bytes(spec, workers)
    available = psutil.virtual_memory().available

    if available < config.MIN_FREE_RAM_REQUIRED:
        return {
            "allowed": False,
            "estimated_ram": estimated,
            "available_ram": available,
            "message": "Server memory is currently insufficient. Please try again later.",
        }
    if estimated + config.MIN_RAM_BUFFER > available:
        return {
            "allowed": False,
            "estimated_ram": estimated,
            "available_ram": available,
            "message": (
                f"Experiment needs about {format_bytes(estimated)}, only {format_bytes(available)} available. "
                "Reduce reps, n or the number of block sizes."
            ),
        }
    return {
        "allowed": True,
        "estimated_ram": estimated,
        "available_ram": available,
        "message": "Experiment can be queued",
    }


def format_bytes(size: int) -> str:
    """
    Format bytes into human-readable string.

    Args:
        size: Size in bytes

    Returns:
        Formatted string (e.g., "1.5 MB")
    """
    size = float(size)
    for unit in ["B", "KB", "MB", "GB", "TB"]:
        if size < 1024.0:
            return f"{size:.1f} {unit}"
        size /= 1024.0
    return f"{size:.1f} PB"
