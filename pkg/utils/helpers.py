"""
Helper utility functions
"""
import logging
import os
import shutil
import uuid
from typing import Dict, List, Optional

import numpy as np
from dotenv import dotenv_values

import config

logger = logging.getLogger(__name__)


def generate_job_id() -> str:
    """
    Generate a unique job ID.

    Returns:
        Unique job identifier
    """
    return str(uuid.uuid4())


def ensure_directories_exist():
    """
    Ensure all required directories exist.
    """
    for directory in (config.TEMP_DIR, config.UPLOAD_DIR, config.OUTPUT_DIR):
        os.makedirs(directory, exist_ok=True)


def job_output_dir(job_id: str) -> str:
    return os.path.join(config.OUTPUT_DIR, job_id)


def cleanup_job_files(job_id: str) -> bool:
    """
    Remove the uploaded data file and the output directory of a job.

    Args:
        job_id: Job identifier

    Returns:
        True if cleanup successful
    """
    try:
        out_dir = job_output_dir(job_id)
        if os.path.exists(out_dir):
            shutil.rmtree(out_dir)

        upload_path = os.path.join(config.UPLOAD_DIR, f"{job_id}.csv")
        if os.path.exists(upload_path):
            os.remove(upload_path)

        return True
    except OSError as e:
        logger.error("[CLEANUP] Error cleaning up job %s: %s", job_id, str(e))
        return False


def get_file_extension(filename: str) -> str:
    return os.path.splitext(filename)[1].lower()


def is_allowed_file(filename: str) -> bool:
    return get_file_extension(filename) in config.ALLOWED_EXTENSIONS


def parse_range(text: str) -> List[int]:
    """
    Parse an inclusive integer range 'lo..hi' (or a single integer).

    Raises:
        ValueError: malformed text or lo > hi
    """
    text = str(text).strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
    else:
        lo = hi = int(text)
    if lo > hi:
        raise ValueError(f"Empty range '{text}'")
    return list(range(lo, hi + 1))


def parse_axis(text: str) -> np.ndarray:
    """
    Parse 'start:stop:step' (inclusive stop) or a comma list into grid values.

    Values are rounded to 10 decimals so 0.1:0.9:0.1 yields exactly 0.1, ..., 0.9.
    """
    text = str(text).strip()
    if ":" not in text:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    parts = [float(x) for x in text.split(":")]
    if len(parts) != 3 or parts[2] <= 0.0 or parts[1] < parts[0]:
        raise ValueError(f"Grid axis must be start:stop:step with step > 0, got '{text}'")
    start, stop, step = parts
    count = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(count), 10)


def product_grid(values, d: int) -> np.ndarray:
    """All points of values^d, first coordinate varying slowest"""
    values = np.asarray(values, dtype=float)
    mesh = np.meshgrid(*([values] * d), indexing="ij")
    return np.column_stack([axis.ravel() for axis in mesh])


def diagonal_grid(values, d: int) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.repeat(values[:, None], d, axis=1)


def load_flat_config(path: Optional[str]) -> Dict[str, str]:
    """
    Read a flat key=value file; keys use underscores in place of dashes.

    Returns:
        Mapping of lower-case keys to string values (empty when path is None)
    """
    if not path:
        return {}
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    return {
        key.strip().lower().replace("-", "_"): value
        for key, value in dotenv_values(path).items()
        if value is not None
    }


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=getattr(logging, (level or config.LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
