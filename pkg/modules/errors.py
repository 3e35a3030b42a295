"""
Errors Module - Exception hierarchy shared by the numerical modules and the lab server
"""
from typing import Optional, Sequence


class BlockmaxError(Exception):
    """Base class for every error raised by the library"""


class InvalidModelError(BlockmaxError, ValueError):
    """Invalid parameters, dimension mismatch or out-of-domain arguments"""


class UnsupportedModelError(BlockmaxError):
    """Operation not available for this family/dimension combination"""


class BlockSizeError(BlockmaxError, ValueError):
    """Block size outside [1, n]"""


class DegenerateDenominatorError(BlockmaxError):
    """Bias-correction denominator (m'/m)^rho - 1 is numerically zero"""


class SingularMomentMatrixError(BlockmaxError):
    """Regression moment matrix is singular for the given block set"""

    def __init__(self, blocks: Sequence[int], condition: float):
        self.blocks = list(blocks)
        self.condition = condition
        super().__init__(
            f"Moment matrix is singular for M={self.blocks} (condition number {condition:.3e})"
        )


class QuadratureError(BlockmaxError):
    """Adaptive quadrature failed to reach the requested tolerance"""

    def __init__(self, message: str, achieved: Optional[float] = None):
        self.achieved = achieved
        if achieved is not None:
            message = f"{message} (achieved error estimate {achieved:.3e})"
        super().__init__(message)


class EstimatorError(BlockmaxError):
    """Estimator undefined for the given data or configuration"""


class ExperimentError(BlockmaxError):
    """Invalid experiment configuration or failed experiment I/O"""
