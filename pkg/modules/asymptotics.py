"""
Asymptotics Module - Limiting covariances of the block-maxima empirical copula processes

Covariance functional gamma(v, u, c, a) of the sliding-blocks process (by
quadrature and in closed form), its disjoint-blocks counterpart, and the
plug-in variances of the estimated-margins limits built from both.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate

import config
from modules.copula_models import CopulaModel, GumbelHougaard
from modules.errors import InvalidModelError, QuadratureError

logger = logging.getLogger(__name__)

SLIDING = "sliding"
DISJOINT = "disjoint"


@dataclass(frozen=True)
class CovarianceQuery:
    """
    Arguments of gamma(v, u, c, a) = Cov(C(u, a), C(v, c)).

    Queries with a > c are answered through the swapped query.
    """
    copula: CopulaModel
    u: Tuple[float, ...]
    v: Tuple[float, ...]
    a: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        u = tuple(float(x) for x in np.ravel(self.u))
        v = tuple(float(x) for x in np.ravel(self.v))
        if len(u) != self.copula.d or len(v) != self.copula.d:
            raise InvalidModelError(f"Query points need {self.copula.d} coordinates")
        if any(not 0.0 <= x <= 1.0 for x in u + v):
            raise InvalidModelError("Query points must lie in [0, 1]^d")
        if not (self.a > 0.0 and self.c > 0.0):
            raise InvalidModelError(f"Block scales must be positive, got a={self.a}, c={self.c}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def ordered(self) -> "CovarianceQuery":
        if self.a <= self.c:
            return self
        return CovarianceQuery(self.copula, u=self.v, v=self.u, a=self.c, c=self.a)


def _scaled_min(v: Sequence[float], sv: float, u: Sequence[float], su: float) -> np.ndarray:
    """Componentwise v^sv ∧ u^su, taken in log space"""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        log_v = sv * np.log(v)
        log_u = su * np.log(u)
    return np.exp(np.minimum(log_v, log_u))


def _power(base: np.ndarray, exponent: float) -> np.ndarray:
    if exponent == 0.0:
        return np.ones_like(base, dtype=float)
    with np.errstate(divide="ignore"):
        return np.exp(exponent * np.log(base))


def _log_mean(x, y) -> np.ndarray:
    """(x - y) / (ln x - ln y), continued by x where the logs coincide and by 0 at x or y = 0"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    x, y = np.broadcast_arrays(x, y)
    positive = (x > 0.0) & (y > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = np.log(x) - np.log(y)
        close = positive & (np.abs(gap) < config.LOG_RATIO_EPS)
        regular = positive & ~close
        out[regular] = (x[regular] - y[regular]) / gap[regular]
    out[close] = x[close]
    return out


def _closed_form(P, Q, R, a: float, c: float) -> np.ndarray:
    """
    Three-branch closed form of gamma with P = C(v^{a/c} ∧ u),
    Q = C(v^{a/c}) C(u) and R = C(v^{1 - a/c}).
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)
    general = R * (2.0 * a * _log_mean(P, Q) + (c - a) * P - (c + a) * Q)
    out = np.where(P == 0.0, -(c + a) * R * Q, general)
    return np.where(P == Q, 0.0, out)


def gamma_closed_form(q: CovarianceQuery) -> float:
    """
    gamma(v, u, c, a) through its closed form.

    Args:
        q: Covariance query (any order of a and c)

    Returns:
        Limiting covariance of the sliding-blocks process
    """
    q = q.ordered()
    ratio = q.a / q.c
    limit = q.copula.limit_copula
    va = _power(np.asarray(q.v), ratio)
    values = limit(np.vstack([_scaled_min(q.v, ratio, q.u, 1.0), va, q.u, _power(np.asarray(q.v), 1.0 - ratio)]))
    P, c_va, c_u, R = (float(x) for x in values)
    return float(_closed_form(P, c_va * c_u, R, q.a, q.c))


def _quad(f, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    result = integrate.quad(f, lo, hi, epsabs=config.QUAD_ABS_TOL, limit=config.QUAD_LIMIT, full_output=1)
    if len(result) > 3:
        raise QuadratureError(f"Quadrature over [{lo:g}, {hi:g}] did not converge: {result[3]}", achieved=result[1])
    return float(result[0])


def gamma_quadrature(q: CovarianceQuery) -> float:
    """
    gamma(v, u, c, a) from its defining block-overlap integrals.

    The xi integration runs over (-a, 0), (0, c - a) and (c - a, c): an a-block
    starting before, inside and straddling the end of a c-block.

    Raises:
        QuadratureError: if an integral misses the absolute tolerance
    """
    q = q.ordered()
    a, c = q.a, q.c
    limit = q.copula.limit_copula
    values = limit(np.vstack([
        _power(np.asarray(q.u), 1.0 / a),
        _power(np.asarray(q.v), 1.0 / c),
        _scaled_min(q.v, 1.0 / c, q.u, 1.0 / a),
        q.u,
        q.v,
    ]))
    # python floats keep 0.0 ** 0.0 == 1.0 at the block boundaries
    A, B, P, c_u, c_v = (float(x) for x in values)
    before = _quad(lambda xi: A ** (-xi) * P ** (xi + a) * B ** (c - xi - a), -a, 0.0)
    inside = _quad(lambda xi: B ** (c - a) * P ** a, 0.0, c - a)
    after = _quad(lambda xi: B ** xi * P ** (c - xi) * A ** (xi + a - c), c - a, c)
    return before + inside + after - (c + a) * c_v * c_u


def gamma_disjoint(copula: CopulaModel, u, v) -> float:
    """C(u ∧ v) - C(u) C(v)"""
    values = copula.limit_copula(np.vstack([np.minimum(u, v), u, v]))
    return float(values[0] - values[1] * values[2])


# ---------------------------------------------------------------------------
# Estimated-margins limits
# ---------------------------------------------------------------------------

def _expansion(copula: CopulaModel, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Points (u, u^(1), ..., u^(d)) and coefficients (1, -Cdot_1(u), ..., -Cdot_d(u)).

    Boundary coordinates take the zero-derivative convention.
    """
    d = copula.d
    points = np.ones((d + 1, d))
    points[0] = u
    coeffs = np.ones(d + 1)
    for j in range(d):
        points[j + 1, j] = u[j]
        coeffs[j + 1] = -float(copula.limit_partial_derivative(j, u))
    return points, coeffs


def _sliding_kernel(copula: CopulaModel, points: np.ndarray, a: float) -> np.ndarray:
    """gamma(p_i, p_k, a, a) for all pairs; with equal scales the closed form needs no powers"""
    count, d = points.shape
    meet = np.minimum(points[:, None, :], points[None, :, :]).reshape(-1, d)
    P = np.asarray(copula.limit_copula(meet)).reshape(count, count)
    single = np.asarray(copula.limit_copula(points))
    return _closed_form(P, np.outer(single, single), np.ones_like(P), a, a)


def _disjoint_kernel(copula: CopulaModel, points: np.ndarray) -> np.ndarray:
    count, d = points.shape
    meet = np.minimum(points[:, None, :], points[None, :, :]).reshape(-1, d)
    P = np.asarray(copula.limit_copula(meet)).reshape(count, count)
    single = np.asarray(copula.limit_copula(points))
    return P - np.outer(single, single)


def hat_covariance(copula: CopulaModel, points, scheme: str = SLIDING, a: float = 1.0, margins: str = "estimated") -> np.ndarray:
    """
    Covariance matrix of the limit process on a finite point set.

    Args:
        copula: Model providing C_inf and its partial derivatives
        points: k x d array of points in [0, 1]^d
        scheme: 'sliding' (gamma at block scale a) or 'disjoint' (gamma^D)
        a: Block scale for the sliding scheme
        margins: 'estimated' for the rank-based limit, 'known' for the raw process

    Returns:
        k x k symmetric matrix
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != copula.d:
        raise InvalidModelError(f"Points need {copula.d} coordinates, got shape {points.shape}")
    if margins not in ("estimated", "known"):
        raise InvalidModelError(f"Unknown margins mode '{margins}'")
    if margins == "known":
        expanded, weights = points, np.eye(points.shape[0])
    else:
        blocks = [_expansion(copula, u) for u in points]
        expanded = np.vstack([p for p, _ in blocks])
        weights = np.zeros((points.shape[0], expanded.shape[0]))
        width = copula.d + 1
        for i, (_, coeffs) in enumerate(blocks):
            weights[i, i * width:(i + 1) * width] = coeffs
    if scheme == SLIDING:
        kernel = _sliding_kernel(copula, expanded, a)
    elif scheme == DISJOINT:
        kernel = _disjoint_kernel(copula, expanded)
    else:
        raise InvalidModelError(f"Unknown block scheme '{scheme}'")
    cov = weights @ kernel @ weights.T
    return 0.5 * (cov + cov.T)


def var_sliding_hat(copula: CopulaModel, u, a: float = 1.0) -> float:
    """Variance of the sliding-blocks estimated-margins limit at (u, a)"""
    return float(hat_covariance(copula, np.atleast_2d(u), SLIDING, a)[0, 0])


def var_disjoint_hat(copula: CopulaModel, u) -> float:
    return float(hat_covariance(copula, np.atleast_2d(u), DISJOINT)[0, 0])


def gumbel_diagonal_variances(beta: float, u) -> Tuple[np.ndarray, np.ndarray]:
    """
    Explicit diagonal variances for the bivariate Gumbel-Hougaard copula.

    Args:
        beta: Shape parameter (>= 1)
        u: Diagonal value(s) in (0, 1)

    Returns:
        (var_sliding at a = 1, var_disjoint) at the points (u, u)
    """
    GumbelHougaard(beta)  # validates beta
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise InvalidModelError("Diagonal values must lie in (0, 1)")
    index = 2.0 ** (1.0 / beta)
    C = u ** index
    D = u ** (index - 1.0) * 2.0 ** (1.0 / beta - 1.0)
    u2 = u * u
    cross = (_log_mean(u, u2) - u2) + (beta > 1.0) * (_log_mean(C, u2) - u2)
    var_sliding = (
        2.0 * (_log_mean(C, C * C) - C * C)
        + 4.0 * D * D * cross
        - 8.0 * D * (_log_mean(C, C * u) - C * u)
    )
    var_disjoint = C - C * C + 2.0 * D * D * (u - u2 + C - u2) - 4.0 * D * (C - C * u)
    return var_sliding, var_disjoint


def variance_curve(copula: CopulaModel, diag_values: Iterable[float], a_values: Iterable[float] = (1.0,)) -> pd.DataFrame:
    """
    Asymptotic variances along the diagonal (t, ..., t).

    Returns:
        DataFrame with columns u, a, var_sliding, var_disjoint, ratio
        (ratio = var_disjoint / var_sliding, NaN where var_sliding is 0)
    """
    rows = []
    for t in diag_values:
        point = np.full(copula.d, float(t))
        var_d = var_disjoint_hat(copula, point)
        for a in a_values:
            var_s = var_sliding_hat(copula, point, float(a))
            ratio = var_d / var_s if var_s > 0.0 else float("nan")
            rows.append({"u": float(t), "a": float(a), "var_sliding": var_s, "var_disjoint": var_d, "ratio": ratio})
    return pd.DataFrame(rows, columns=["u", "a", "var_sliding", "var_disjoint", "ratio"])


@dataclass
class DominanceReport:
    """Outcome of comparing disjoint and sliding limit covariances"""
    grid: np.ndarray
    differences: np.ndarray
    min_difference: float
    min_eigenvalue: float
    point_sets: int

    @property
    def dominated(self) -> bool:
        return self.min_difference >= -1e-9 and self.min_eigenvalue >= -1e-9

    def to_dict(self) -> dict:
        return {
            "min_difference": self.min_difference,
            "min_eigenvalue": self.min_eigenvalue,
            "point_sets": self.point_sets,
            "dominated": self.dominated,
        }


def variance_dominance_check(
    copula: CopulaModel,
    grid,
    point_sets: Optional[List[np.ndarray]] = None,
    n_sets: int = 100,
    max_k: int = 4,
    rng: Optional[np.random.Generator] = None,
) -> DominanceReport:
    """
    Check Var^D - Var^sliding >= 0 on a grid and Cov^D - Cov^sliding >= 0
    (Loewner order) on finite point sets.

    Args:
        copula: Model providing C_inf
        grid: Points for the pointwise variance comparison
        point_sets: Explicit point sets; random ones are drawn when omitted
        n_sets: Number of random point sets
        max_k: Largest random point-set size
        rng: Stream for the random point sets

    Returns:
        DominanceReport with the pointwise differences and minima
    """
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    differences = np.array([var_disjoint_hat(copula, u) - var_sliding_hat(copula, u) for u in grid])
    if point_sets is None:
        rng = rng or np.random.default_rng(config.MASTER_SEED)
        point_sets = [
            rng.uniform(0.02, 0.98, size=(int(rng.integers(1, max_k + 1)), copula.d))
            for _ in range(n_sets)
        ]
    min_eigenvalue = math.inf
    for points in point_sets:
        gap = hat_covariance(copula, points, DISJOINT) - hat_covariance(copula, points, SLIDING)
        min_eigenvalue = min(min_eigenvalue, float(np.linalg.eigvalsh(gap).min()))
    report = DominanceReport(
        grid=grid,
        differences=differences,
        min_difference=float(differences.min()) if differences.size else 0.0,
        min_eigenvalue=min_eigenvalue if point_sets else 0.0,
        point_sets=len(point_sets),
    )
    logger.info("[VARIANCE] dominance check on %d points and %d sets: %s", grid.shape[0], len(point_sets), report.to_dict())
    return report
