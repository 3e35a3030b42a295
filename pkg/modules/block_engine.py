"""
Block Engine Module - Sliding and disjoint block maxima and their rank-based pseudo-observations
"""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
import pandas as pd
from scipy import ndimage, stats

from modules.errors import BlockSizeError, ExperimentError, InvalidModelError

logger = logging.getLogger(__name__)

SLIDING = "sliding"
DISJOINT = "disjoint"


@dataclass(frozen=True)
class DataMatrix:
    """n x d observation window of a stationary multivariate series"""
    values: np.ndarray
    columns: List[str] = field(default_factory=list)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidModelError(f"Data must be a 2-D matrix, got shape {values.shape}")
        if values.shape[0] < 1:
            raise InvalidModelError("Data must contain at least one row")
        if values.shape[1] < 2:
            raise InvalidModelError(f"Data must have d >= 2 columns, got {values.shape[1]}")
        if not np.all(np.isfinite(values)):
            raise InvalidModelError("Data contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if not self.columns:
            object.__setattr__(self, "columns", [f"x{j + 1}" for j in range(values.shape[1])])
        elif len(self.columns) != values.shape[1]:
            raise InvalidModelError("Column names do not match the data width")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def tied_columns(self) -> List[int]:
        """Columns holding repeated values (continuous margins are assumed)"""
        return [
            j for j in range(self.d)
            if np.unique(self.values[:, j]).size < self.n
        ]

    @property
    def has_ties(self) -> bool:
        return bool(self.tied_columns)

    @classmethod
    def from_csv(cls, path: str) -> "DataMatrix":
        """
        Load a data CSV: header row, one column per coordinate, reals.

        Raises:
            ExperimentError: if the file cannot be read or parsed
        """
        try:
            frame = pd.read_csv(path)
        except Exception as e:
            raise ExperimentError(f"Failed to read data file {path}: {str(e)}") from e
        try:
            values = frame.to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            raise ExperimentError(f"Data file {path} contains non-numeric entries: {str(e)}") from e
        data = cls(values, [str(c) for c in frame.columns])
        if data.has_ties:
            logger.warning("[DATA] %s: ties in columns %s", os.path.basename(path), data.tied_columns)
        return data

    def to_csv(self, path: str) -> str:
        try:
            pd.DataFrame(self.values, columns=self.columns).to_csv(path, index=False)
        except OSError as e:
            raise ExperimentError(f"Failed to write data file {path}: {str(e)}") from e
        return path


@dataclass(frozen=True)
class BlockMaximaPanel:
    """Componentwise block maxima for one block size"""
    block_size: int
    maxima: np.ndarray
    scheme: str

    @property
    def k(self) -> int:
        return self.maxima.shape[0]


@dataclass(frozen=True)
class PseudoObservations:
    """Max-rank pseudo-observations rank / k of a block maxima panel"""
    u_hat: np.ndarray
    k: int


def as_data_matrix(data: Union[DataMatrix, np.ndarray]) -> DataMatrix:
    return data if isinstance(data, DataMatrix) else DataMatrix(np.asarray(data, dtype=float))


def block_size_from_scale(m: int, a: float) -> int:
    """Block size floor(m * a) for a >= 0"""
    if a < 0:
        raise BlockSizeError(f"Block scale must be nonnegative, got {a}")
    return int(math.floor(m * a + 1e-12))


def _check_block_size(m, n: int) -> int:
    if isinstance(m, bool) or int(m) != m or not 1 <= int(m) <= n:
        raise BlockSizeError(f"Block size must be an integer in [1, {n}], got {m}")
    return int(m)


def sliding_maxima(data: Union[DataMatrix, np.ndarray], m: int) -> BlockMaximaPanel:
    """
    Sliding block maxima: row i is the componentwise max of rows [i, i+m).

    scipy's maximum filter runs a monotone-wedge (deque) pass per column, so
    the cost is O(n * d) for every block size.

    Args:
        data: n x d data
        m: Block size in [1, n]

    Returns:
        BlockMaximaPanel with n - m + 1 rows

    Raises:
        BlockSizeError: if m is out of range
    """
    data = as_data_matrix(data)
    m = _check_block_size(m, data.n)
    if m == 1:
        return BlockMaximaPanel(1, data.values.copy(), SLIDING)
    # centred window of size m covers [i - m//2, i - m//2 + m)
    filtered = ndimage.maximum_filter1d(data.values, size=m, axis=0, mode="nearest")
    start = m // 2
    maxima = filtered[start:start + data.n - m + 1]
    return BlockMaximaPanel(m, np.ascontiguousarray(maxima), SLIDING)


def disjoint_maxima(data: Union[DataMatrix, np.ndarray], m: int) -> BlockMaximaPanel:
    """Disjoint block maxima over rows [m(h-1), mh); the trailing remainder is discarded"""
    data = as_data_matrix(data)
    m = _check_block_size(m, data.n)
    blocks = data.n // m
    maxima = data.values[: blocks * m].reshape(blocks, m, data.d).max(axis=1)
    return BlockMaximaPanel(m, maxima, DISJOINT)


def block_maxima(data: Union[DataMatrix, np.ndarray], m: int, scheme: str = SLIDING) -> BlockMaximaPanel:
    if scheme == SLIDING:
        return sliding_maxima(data, m)
    if scheme == DISJOINT:
        return disjoint_maxima(data, m)
    raise InvalidModelError(f"Unknown block scheme '{scheme}'")


def pseudo_observations(panel: BlockMaximaPanel) -> PseudoObservations:
    """
    Max-rank pseudo-observations: count of rows <= value, divided by k.

    Ties share the maximal rank, which is the empirical marginal CDF of the
    maxima evaluated at its own arguments.
    """
    k = panel.k
    if k == 0:
        raise BlockSizeError("Cannot rank an empty block maxima panel")
    ranks = stats.rankdata(panel.maxima, method="max", axis=0)
    return PseudoObservations(u_hat=ranks / k, k=k)
