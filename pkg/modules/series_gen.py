"""
Series Generator Module - Stationary multivariate series with a known block-maxima attractor
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Union

import numpy as np

from modules.copula_models import CopulaModel, model_from_config, model_to_config
from modules.errors import InvalidModelError

COEFF_TOL = 1e-12


@dataclass(frozen=True)
class MovingMaxSpec:
    """
    Moving-maximum process U_tj = max_i W_{t-i,j}^{1/a_ij} of order p.

    Coefficients are given for lags 1..p; the lag-0 row is derived as
    a_0j = 1 - sum_{i>=1} a_ij. p = 0 is the i.i.d. stream of the base copula.
    """
    base: CopulaModel
    lag_coeffs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        lags = np.array(self.lag_coeffs, dtype=float)
        if lags.size == 0:
            lags = np.zeros((0, self.base.d))
        lags = np.atleast_2d(lags)
        if lags.shape[1] != self.base.d:
            raise InvalidModelError(
                f"Coefficient rows need {self.base.d} entries, got shape {lags.shape}"
            )
        if not np.all(np.isfinite(lags)) or np.any(lags < 0.0):
            raise InvalidModelError("Moving-maximum coefficients must be finite and nonnegative")
        lag0 = 1.0 - lags.sum(axis=0)
        if np.any(lag0 < -COEFF_TOL):
            raise InvalidModelError(
                f"Lag coefficients sum above 1 in columns {np.flatnonzero(lag0 < -COEFF_TOL).tolist()}"
            )
        lags.setflags(write=False)
        object.__setattr__(self, "lag_coeffs", lags)

    @property
    def p(self) -> int:
        return self.lag_coeffs.shape[0]

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def coeffs(self) -> np.ndarray:
        """Full (p+1) x d coefficient matrix, lag 0 first"""
        lag0 = np.clip(1.0 - self.lag_coeffs.sum(axis=0), 0.0, None)
        return np.vstack([lag0, self.lag_coeffs])

    def to_config(self) -> Dict[str, str]:
        block = model_to_config(self.base, prefix="base_")
        block["p"] = str(self.p)
        for i, row in enumerate(self.lag_coeffs, start=1):
            block[f"lag{i}"] = ",".join(repr(float(a)) for a in row)
        return block

    def describe(self) -> str:
        if self.p == 0:
            return f"iid {self.base.describe()}"
        return f"moving-max(p={self.p}) {self.base.describe()}"


def as_moving_max(model: Union[MovingMaxSpec, CopulaModel]) -> MovingMaxSpec:
    return model if isinstance(model, MovingMaxSpec) else MovingMaxSpec(base=model)


def moving_max_from_config(block: Mapping[str, object]) -> MovingMaxSpec:
    """Inverse of MovingMaxSpec.to_config"""
    base = model_from_config(block, prefix="base_")
    try:
        p = int(block.get("p", 0))
        rows: Sequence[Sequence[float]] = [
            [float(a) for a in str(block[f"lag{i}"]).split(",")] for i in range(1, p + 1)
        ]
    except (KeyError, ValueError) as e:
        raise InvalidModelError(f"Failed to parse moving-maximum block: {str(e)}") from e
    return MovingMaxSpec(base=base, lag_coeffs=np.array(rows) if rows else np.zeros((0, base.d)))


def generate(spec: Union[MovingMaxSpec, CopulaModel], n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Generate n rows of the moving-maximum process.

    Args:
        spec: Moving-maximum spec (or a bare copula model for i.i.d. data)
        n: Number of rows
        rng: Caller-owned random stream

    Returns:
        n x d array with uniform margins; p burn-in innovation rows are
        drawn and discarded

    Raises:
        InvalidModelError: invalid spec or n
    """
    spec = as_moving_max(spec)
    if isinstance(n, bool) or int(n) != n or int(n) < 1:
        raise InvalidModelError(f"Series length must be a positive integer, got {n}")
    n = int(n)
    innovations = spec.base.sample(n + spec.p, rng)
    if spec.p == 0:
        return innovations
    coeffs = spec.coeffs
    out = np.zeros((n, spec.d))
    for i in range(spec.p + 1):
        lagged = innovations[spec.p - i: spec.p - i + n]
        for j in range(spec.d):
            a = coeffs[i, j]
            if a > 0.0:  # w^{1/0} = 0 contributes nothing
                np.maximum(out[:, j], np.power(lagged[:, j], 1.0 / a), out=out[:, j])
    return out


def attractor_of(spec: Union[MovingMaxSpec, CopulaModel]) -> CopulaModel:
    """Block-maxima attractor of the process: the base copula's i.i.d. attractor"""
    return as_moving_max(spec).base.attractor()
