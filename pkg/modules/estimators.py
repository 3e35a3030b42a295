"""
Estimators Module - Block-maxima copula estimators, bias corrections and second-order parameter estimators

All estimators work on a BlockEstimateTable: the empirical copulas
C_{n,k} of one dataset, memoised per (scheme, block size) and evaluated on
a fixed grid. Passing raw data builds a throwaway table.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

import config
from modules.block_engine import (
    DISJOINT,
    SLIDING,
    DataMatrix,
    PseudoObservations,
    as_data_matrix,
    block_maxima,
    block_size_from_scale,
    pseudo_observations,
)
from modules.errors import (
    BlockSizeError,
    DegenerateDenominatorError,
    EstimatorError,
    InvalidModelError,
    SingularMomentMatrixError,
)
from utils.helpers import parse_range

logger = logging.getLogger(__name__)

ESTIMATOR_NAMES = ("sliding", "disjoint", "agg", "bc_naive", "bc_agg", "bc_reg")
FLAT_CURVE_SS = 1e-24


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightScheme:
    """Block set M with positive weights summing to one"""
    blocks: Tuple[int, ...]
    weights: np.ndarray

    def __post_init__(self):
        blocks = tuple(int(k) for k in self.blocks)
        if not blocks:
            raise InvalidModelError("Block set M must not be empty")
        if any(k < 1 for k in blocks) or len(set(blocks)) != len(blocks):
            raise InvalidModelError(f"Block set M must hold distinct positive integers, got {list(blocks)}")
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (len(blocks),):
            raise InvalidModelError("One weight per block size is required")
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise InvalidModelError("Weights must be finite and positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidModelError(f"Weights must sum to 1, got {weights.sum()!r}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_raw(cls, blocks: Iterable[int], raw: Sequence[float]) -> "WeightScheme":
        raw = np.asarray(raw, dtype=float)
        if np.any(raw <= 0.0):
            raise InvalidModelError("Raw weights must be positive")
        return cls(tuple(blocks), raw / raw.sum())

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.blocks, self.weights.tolist()))


def harmonic_weights(blocks: Iterable[int]) -> WeightScheme:
    """w_k = k^-1 / sum_{l in M} l^-1"""
    blocks = tuple(blocks)
    if not blocks:
        raise InvalidModelError("Block set M must not be empty")
    inverse = 1.0 / np.asarray(blocks, dtype=float)
    return WeightScheme(blocks, inverse / inverse.sum())


def uniform_weights(blocks: Iterable[int]) -> WeightScheme:
    blocks = tuple(blocks)
    if not blocks:
        raise InvalidModelError("Block set M must not be empty")
    return WeightScheme(blocks, np.full(len(blocks), 1.0 / len(blocks)))


WEIGHT_RULES = {"harmonic": harmonic_weights, "uniform": uniform_weights}


def weight_scheme(blocks: Iterable[int], rule: str = "harmonic") -> WeightScheme:
    if rule not in WEIGHT_RULES:
        raise InvalidModelError(f"Unknown weight rule '{rule}' (use harmonic or uniform)")
    return WEIGHT_RULES[rule](blocks)


@dataclass(frozen=True)
class RhoConfig:
    """Tuning of the penalised second-order parameter estimator"""
    k_lo: float
    k_hi: float
    eta: float
    m_rho: int
    blocks: Tuple[int, ...]
    U: np.ndarray
    grid_step: float = 0.01
    refine_tol: float = 1e-4

    def __post_init__(self):
        if not self.k_lo < self.k_hi < 0.0:
            raise InvalidModelError(f"Need K' < K'' < 0, got K'={self.k_lo}, K''={self.k_hi}")
        if self.eta < 0.0:
            raise InvalidModelError(f"Penalty eta must be >= 0, got {self.eta}")
        if self.grid_step <= 0.0:
            raise InvalidModelError("Grid step must be positive")
        U = np.atleast_2d(np.asarray(self.U, dtype=float))
        if U.size == 0 or np.any(U <= 0.0) or np.any(U >= 1.0):
            raise InvalidModelError("U must be a nonempty set of interior points of (0,1)^d")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "blocks", tuple(int(k) for k in self.blocks))
        if len(self.blocks) < 2:
            raise InvalidModelError("The rho regression needs at least two block sizes")

    @property
    def candidates(self) -> np.ndarray:
        count = int(round((self.k_hi - self.k_lo) / self.grid_step)) + 1
        return np.linspace(self.k_lo, self.k_hi, max(count, 2))

    def key(self) -> tuple:
        return (self.k_lo, self.k_hi, self.eta, self.m_rho, self.blocks, self.U.tobytes(), self.grid_step, self.refine_tol)


def default_rho_config(d: int = 2, **overrides) -> RhoConfig:
    """
    Defaults of the simulation protocol: K' = -2, K'' = -0.1, eta = 1/2,
    M = {2..50}, U = diagonal points (.1,..,.1), (.11,..,.11), ..., (.5,..,.5).
    """
    steps = int(round((config.RHO_DIAG_HI - config.RHO_DIAG_LO) / config.RHO_DIAG_STEP)) + 1
    diag = np.round(np.linspace(config.RHO_DIAG_LO, config.RHO_DIAG_HI, steps), 10)
    blocks = tuple(parse_range(config.RHO_BLOCKS))
    params = dict(
        k_lo=config.RHO_K_LO,
        k_hi=config.RHO_K_HI,
        eta=config.RHO_ETA,
        m_rho=min(blocks),
        blocks=blocks,
        U=np.repeat(diag[:, None], d, axis=1),
        grid_step=config.RHO_GRID_STEP,
        refine_tol=config.RHO_REFINE_TOL,
    )
    params.update(overrides)
    return RhoConfig(**params)


@dataclass(frozen=True)
class RhoEstimate:
    """Second-order parameter estimate, flagged when undefined at a point"""
    value: float
    defined: bool = True
    reason: Optional[str] = None
    skipped: int = 0

    @classmethod
    def undefined(cls, reason: str) -> "RhoEstimate":
        return cls(value=float("nan"), defined=False, reason=reason)


@dataclass
class EstimatorValue:
    """Estimator output on a grid of points"""
    name: str
    grid: np.ndarray
    values: np.ndarray
    meta: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class EstimatorRequest:
    """Which estimator to evaluate, with its block-size parameters"""
    name: str
    m: int
    m_prime: Optional[int] = None
    blocks: Tuple[int, ...] = ()
    weights: str = "harmonic"
    rho: str = "pen_agg"
    m_ref: Optional[int] = None

    def __post_init__(self):
        if self.name not in ESTIMATOR_NAMES:
            raise InvalidModelError(f"Unknown estimator '{self.name}' (known: {', '.join(ESTIMATOR_NAMES)})")
        parse_rho_option(self.rho)
        if self.weights not in WEIGHT_RULES:
            raise InvalidModelError(f"Unknown weight rule '{self.weights}'")


def parse_rho_option(text: str) -> Tuple[str, Optional[float]]:
    """Parse 'pen_agg' or 'fixed:<val>' (val < 0)"""
    text = str(text).strip()
    if text == "pen_agg":
        return "pen_agg", None
    if text.startswith("fixed:"):
        try:
            value = float(text.split(":", 1)[1])
        except ValueError as e:
            raise InvalidModelError(f"Invalid fixed rho '{text}'") from e
        if not value < 0.0:
            raise InvalidModelError(f"Fixed rho must be negative, got {value}")
        return "fixed", value
    raise InvalidModelError(f"Unknown rho option '{text}' (use pen_agg or fixed:<val>)")


# ---------------------------------------------------------------------------
# Empirical copula and the per-dataset estimate table
# ---------------------------------------------------------------------------

def _as_grid(u_grid, d: int) -> np.ndarray:
    grid = np.atleast_2d(np.asarray(u_grid, dtype=float))
    if grid.ndim != 2 or grid.shape[1] != d:
        raise InvalidModelError(f"Grid points need {d} coordinates, got shape {np.shape(u_grid)}")
    if np.any(grid < 0.0) or np.any(grid > 1.0):
        raise InvalidModelError("Grid points must lie in [0, 1]^d")
    return grid


def _count_dominated(rows: np.ndarray, points: np.ndarray) -> np.ndarray:
    # rows sorted by the first coordinate; each point only scans its prefix
    order = np.argsort(rows[:, 0], kind="stable")
    ordered = rows[order]
    cuts = np.searchsorted(ordered[:, 0], points[:, 0], side="right")
    counts = np.empty(points.shape[0], dtype=np.int64)
    for i, (cut, point) in enumerate(zip(cuts, points)):
        counts[i] = np.count_nonzero(np.all(ordered[:cut, 1:] <= point[1:], axis=1))
    return counts


def empirical_copula(pseudo: PseudoObservations, u) -> Union[float, np.ndarray]:
    """
    Fraction of pseudo-observation rows componentwise <= u.

    Args:
        pseudo: Pseudo-observations of one block maxima panel
        u: Single point (d,) or grid (g, d)

    Returns:
        Float for a single point, array of length g for a grid
    """
    d = pseudo.u_hat.shape[1]
    single = np.ndim(u) == 1
    grid = _as_grid(u, d)
    values = _count_dominated(pseudo.u_hat, grid) / pseudo.k
    return float(values[0]) if single else values


class BlockEstimateTable:
    """
    Memoised empirical copulas C_{n,k} of one dataset on one grid.

    Tables derived with ``with_grid`` share the pseudo-observation and rho
    caches, so one replication ranks each block size once.
    """

    def __init__(self, data: Union[DataMatrix, np.ndarray], grid, _shared: Optional[dict] = None):
        self.data = as_data_matrix(data)
        self.grid = _as_grid(grid, self.data.d)
        self._shared = _shared if _shared is not None else {"pseudo": {}, "rho": {}}
        self._estimates: Dict[Tuple[str, int], np.ndarray] = {}

    @property
    def n(self) -> int:
        return self.data.n

    def with_grid(self, grid) -> "BlockEstimateTable":
        return BlockEstimateTable(self.data, grid, _shared=self._shared)

    def pseudo(self, k: int, scheme: str = SLIDING) -> PseudoObservations:
        key = (scheme, int(k))
        cache = self._shared["pseudo"]
        if key not in cache:
            cache[key] = pseudo_observations(block_maxima(self.data, int(k), scheme))
        return cache[key]

    def estimate(self, k: int, scheme: str = SLIDING) -> np.ndarray:
        key = (scheme, int(k))
        if key not in self._estimates:
            self._estimates[key] = np.asarray(empirical_copula(self.pseudo(k, scheme), self.grid))
        return self._estimates[key]

    def curve(self, blocks: Iterable[int], scheme: str = SLIDING) -> np.ndarray:
        """Stacked estimates, one row per block size"""
        return np.vstack([self.estimate(k, scheme) for k in blocks])

    def cached_rho(self, cfg: RhoConfig) -> Optional[RhoEstimate]:
        return self._shared["rho"].get(cfg.key())

    def rho(self, cfg: RhoConfig) -> RhoEstimate:
        key = cfg.key()
        cache = self._shared["rho"]
        if key not in cache:
            cache[key] = rho_pen_aggregated(self, cfg)
        return cache[key]


def _table(data, u_grid) -> BlockEstimateTable:
    if isinstance(data, BlockEstimateTable):
        return data if u_grid is None else data.with_grid(u_grid)
    if u_grid is None:
        raise InvalidModelError("A grid of evaluation points is required")
    return BlockEstimateTable(data, u_grid)


def _check_blocks(blocks: Iterable[int], n: int) -> None:
    for k in blocks:
        if not 1 <= int(k) <= n:
            raise BlockSizeError(f"Block size {k} outside [1, {n}]")


def _check_rho(rho: float) -> float:
    if not (isinstance(rho, (int, float)) and math.isfinite(rho) and rho < 0.0):
        raise InvalidModelError(f"rho must be a negative real, got {rho}")
    return float(rho)


# ---------------------------------------------------------------------------
# Plain and aggregated estimators
# ---------------------------------------------------------------------------

def sliding_estimator(data, m: int, u_grid=None) -> EstimatorValue:
    table = _table(data, u_grid)
    _check_blocks([m], table.n)
    return EstimatorValue("sliding", table.grid, table.estimate(m, SLIDING).copy(), {"m": m})


def disjoint_estimator(data, m: int, u_grid=None) -> EstimatorValue:
    table = _table(data, u_grid)
    _check_blocks([m], table.n)
    return EstimatorValue("disjoint", table.grid, table.estimate(m, DISJOINT).copy(), {"m": m})


def aggregated_estimator(data, scheme: WeightScheme, u_grid=None) -> EstimatorValue:
    """Weighted average sum_k w_k C_{n,k}(u) of sliding estimators over M"""
    table = _table(data, u_grid)
    _check_blocks(scheme.blocks, table.n)
    values = scheme.weights @ table.curve(scheme.blocks)
    return EstimatorValue("agg", table.grid, values, {"M": list(scheme.blocks)})


# ---------------------------------------------------------------------------
# Bias corrections
# ---------------------------------------------------------------------------

def naive_correction(c_m, c_m_prime, m: int, m_prime: int, rho: float) -> np.ndarray:
    """
    C_m - (C_m' - C_m) / ((m'/m)^rho - 1) on precomputed estimates.

    Raises:
        DegenerateDenominatorError: when |(m'/m)^rho - 1| < 1e-10
    """
    rho = _check_rho(rho)
    denominator = (m_prime / m) ** rho - 1.0
    if abs(denominator) < config.DEGENERATE_EPS:
        raise DegenerateDenominatorError(
            f"Degenerate bias correction for m={m}, m'={m_prime}, rho={rho}: (m'/m)^rho - 1 = {denominator:.3e}"
        )
    c_m = np.asarray(c_m, dtype=float)
    return c_m - (np.asarray(c_m_prime, dtype=float) - c_m) / denominator


def bc_naive(data, m: int, m_prime: int, rho: float, u_grid=None) -> EstimatorValue:
    table = _table(data, u_grid)
    _check_blocks([m, m_prime], table.n)
    values = naive_correction(table.estimate(m), table.estimate(m_prime), m, m_prime, rho)
    return EstimatorValue("bc_naive", table.grid, values, {"m": m, "m_prime": m_prime, "rho": rho})


def bc_aggregated(data, m_prime: int, scheme: WeightScheme, rho: float, u_grid=None) -> EstimatorValue:
    """sum_k w_k * bc_naive(m', k): naive corrections against m' aggregated over M"""
    if m_prime in scheme.blocks:
        raise InvalidModelError(f"m'={m_prime} must not belong to M={list(scheme.blocks)}")
    table = _table(data, u_grid)
    _check_blocks(list(scheme.blocks) + [m_prime], table.n)
    base = table.estimate(m_prime)
    values = np.zeros(table.grid.shape[0])
    for k, w in zip(scheme.blocks, scheme.weights):
        values += w * naive_correction(base, table.estimate(k), m_prime, k, rho)
    return EstimatorValue("bc_agg", table.grid, values, {"m_prime": m_prime, "M": list(scheme.blocks), "rho": rho})


def regression_fit(curve, scheme: WeightScheme, rho: float, m_ref: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Weighted least squares of C_{n,k}(u) on 1 and (k/m_ref)^rho.

    Solves the 2 x 2 system [[mu0, mu1], [mu1, mu2]] (b, c) = (sum w C, sum w x C)
    with mu_v = sum_k w_k (k/m_ref)^(v rho).

    Args:
        curve: |M| x g estimates (rows follow scheme.blocks)
        scheme: Block set and weights
        rho: Second-order parameter (< 0)
        m_ref: Reference block size (defaults to min(M))

    Returns:
        (intercept, slope) arrays of length g

    Raises:
        SingularMomentMatrixError: condition number above 1e12
    """
    rho = _check_rho(rho)
    m_ref = min(scheme.blocks) if m_ref is None else m_ref
    x = (np.asarray(scheme.blocks, dtype=float) / m_ref) ** rho
    w = scheme.weights
    moments = np.array([[w.sum(), w @ x], [w @ x, w @ (x * x)]])
    condition = np.linalg.cond(moments)
    if not np.isfinite(condition) or condition > config.MAX_CONDITION:
        raise SingularMomentMatrixError(scheme.blocks, condition)
    curve = np.atleast_2d(np.asarray(curve, dtype=float))
    rhs = np.vstack([w @ curve, (w * x) @ curve])
    solution = np.linalg.solve(moments, rhs)
    return solution[0], solution[1]


def bc_regression(data, m_ref: Optional[int], scheme: WeightScheme, rho: float, u_grid=None) -> Tuple[EstimatorValue, EstimatorValue]:
    """
    Regression-based bias correction.

    Returns:
        (c_inf, b_m): the bias-corrected copula estimate (intercept) and the
        slope, an estimate of phi(m_ref) S(u)
    """
    table = _table(data, u_grid)
    _check_blocks(scheme.blocks, table.n)
    m_ref = min(scheme.blocks) if m_ref is None else m_ref
    intercept, slope = regression_fit(table.curve(scheme.blocks), scheme, rho, m_ref)
    meta = {"M": list(scheme.blocks), "m_ref": m_ref, "rho": rho}
    return (
        EstimatorValue("bc_reg", table.grid, intercept, dict(meta)),
        EstimatorValue("bc_reg_slope", table.grid, slope, dict(meta)),
    )


# ---------------------------------------------------------------------------
# Second-order parameter
# ---------------------------------------------------------------------------

def naive_rho_from_values(c_m: float, c_ma: float, c_ma2: float, a: float) -> RhoEstimate:
    """log_a((C_{ma^2} - C_m) / (C_{ma} - C_m) - 1), flagged when undefined"""
    denominator = c_ma - c_m
    if not math.isfinite(denominator) or abs(denominator) < config.DEGENERATE_EPS:
        return RhoEstimate.undefined("denominator C_{ma} - C_m vanishes at this u")
    excess = (c_ma2 - c_m) / denominator - 1.0
    if not excess > 0.0:
        return RhoEstimate.undefined("ratio - 1 is not positive at this u")
    return RhoEstimate(value=math.log(excess) / math.log(a))


def rho_naive(data, m_rho: int, a: float, u) -> RhoEstimate:
    """
    Naive estimator from the three block sizes m_rho, floor(m_rho a), floor(m_rho a^2).

    Raises:
        InvalidModelError: a <= 0 or a = 1
        EstimatorError: the scaled block sizes coincide with m_rho
    """
    if not a > 0.0 or a == 1.0:
        raise InvalidModelError(f"Scale a must be positive and different from 1, got {a}")
    k1 = block_size_from_scale(m_rho, a)
    k2 = block_size_from_scale(m_rho, a * a)
    if k1 == m_rho or k2 == m_rho or k1 < 1 or k2 < 1:
        raise EstimatorError(
            f"Block sizes floor(m a)={k1} and floor(m a^2)={k2} must differ from m={m_rho} (increase m_rho or |log a|)"
        )
    point = np.atleast_2d(np.asarray(u, dtype=float))
    table = _table(data, point)
    _check_blocks([m_rho, k1, k2], table.n)
    c0, c1, c2 = (float(table.estimate(k)[0]) for k in (m_rho, k1, k2))
    return naive_rho_from_values(c0, c1, c2, a)


def _profile_rss(y: np.ndarray, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """
    Weighted residual sum of squares after profiling out (b0, b1).

    Args:
        y: |M| response values
        x: R x |M| regressors, one row per candidate rho
        w: |M| weights summing to one
    """
    y_c = y - w @ y
    x_c = x - (x @ w)[:, None]
    sxx = np.sum(w * x_c * x_c, axis=1)
    sxy = x_c @ (w * y_c)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(sxx > 0.0, sxy / sxx, 0.0)
    residual = y_c[None, :] - slope[:, None] * x_c
    return np.sum(w * residual * residual, axis=1)


def penalized_rho_from_curve(values, scheme: WeightScheme, cfg: RhoConfig) -> RhoEstimate:
    """
    Penalised profile least squares for rho on one estimate curve k -> C_{n,k}(u).

    Minimises RSS~(rho) + (eta/|rho|) min_kappa RSS~(kappa) over [K', K''] on a
    grid of step cfg.grid_step, then refines once inside the best bracket.
    Ties go to the more negative rho.
    """
    y = np.asarray(values, dtype=float)
    if y.shape != (len(scheme.blocks),) or not np.all(np.isfinite(y)):
        return RhoEstimate.undefined("estimate curve is not finite at this u")
    w = scheme.weights
    ratio = np.asarray(scheme.blocks, dtype=float) / cfg.m_rho

    def rss(rhos) -> np.ndarray:
        rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
        return _profile_rss(y, ratio[None, :] ** rhos[:, None], w)

    total_ss = float(w @ (y - w @ y) ** 2)
    if total_ss <= FLAT_CURVE_SS:
        # every rho fits a flat curve exactly
        return RhoEstimate(value=cfg.k_lo)

    rhos = cfg.candidates
    rss_grid = rss(rhos)
    i = int(np.argmin(rss_grid))
    refined = _refine(lambda r: float(rss(r)[0]), rhos, i, cfg.refine_tol)
    min_rss = min(float(rss_grid[i]), refined[1])

    def objective(r) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return rss(r) + cfg.eta / np.abs(r) * min_rss

    obj_grid = objective(rhos)
    best = float(obj_grid.min())
    tolerance = 1e-12 * max(best, total_ss * 1e-12)
    i = int(np.flatnonzero(obj_grid <= best + tolerance)[0])
    x_best, f_best = _refine(lambda r: float(objective(r)[0]), rhos, i, cfg.refine_tol)
    value = x_best if f_best < obj_grid[i] - tolerance else float(rhos[i])
    return RhoEstimate(value=float(np.clip(value, cfg.k_lo, cfg.k_hi)))


def _refine(f, grid: np.ndarray, i: int, tol: float) -> Tuple[float, float]:
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if hi <= lo:
        return float(grid[i]), f(grid[i])
    result = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return float(result.x), float(result.fun)


def rho_penalized(data, cfg: RhoConfig, u) -> RhoEstimate:
    point = np.atleast_2d(np.asarray(u, dtype=float))
    table = _table(data, point)
    _check_blocks(cfg.blocks, table.n)
    curve = table.curve(cfg.blocks)[:, 0]
    return penalized_rho_from_curve(curve, harmonic_weights(cfg.blocks), cfg)


def rho_regression(data, cfg: RhoConfig, u) -> RhoEstimate:
    """Unpenalised profile least squares (eta = 0)"""
    return rho_penalized(data, _replace_eta(cfg, 0.0), u)


def _replace_eta(cfg: RhoConfig, eta: float) -> RhoConfig:
    return RhoConfig(cfg.k_lo, cfg.k_hi, eta, cfg.m_rho, cfg.blocks, cfg.U, cfg.grid_step, cfg.refine_tol)


def rho_pen_aggregated(data, cfg: RhoConfig) -> RhoEstimate:
    """
    Mean of the penalised estimates over cfg.U, skipping undefined points.

    Raises:
        EstimatorError: if every point of U is undefined
    """
    table = _table(data, cfg.U)
    _check_blocks(cfg.blocks, table.n)
    curves = table.curve(cfg.blocks)
    scheme = harmonic_weights(cfg.blocks)
    estimates = [penalized_rho_from_curve(curves[:, i], scheme, cfg) for i in range(curves.shape[1])]
    defined = [e.value for e in estimates if e.defined]
    skipped = len(estimates) - len(defined)
    if not defined:
        raise EstimatorError(f"rho undefined at all {len(estimates)} points of U")
    if skipped:
        logger.debug("[RHO] skipped %d undefined points of U", skipped)
    return RhoEstimate(value=float(np.mean(defined)), skipped=skipped)


# ---------------------------------------------------------------------------
# Request dispatch
# ---------------------------------------------------------------------------

def resolve_rho(option: str, table: BlockEstimateTable, rho_config: Optional[RhoConfig] = None) -> float:
    kind, value = parse_rho_option(option)
    if kind == "fixed":
        return value
    cfg = rho_config or default_rho_config(table.data.d)
    return table.rho(cfg).value


def evaluate(request: EstimatorRequest, data, u_grid=None, rho_config: Optional[RhoConfig] = None) -> EstimatorValue:
    """
    Evaluate one configured estimator.

    Args:
        request: Estimator name and parameters
        data: DataMatrix, array or an existing BlockEstimateTable
        u_grid: Evaluation grid (optional when a table is passed)
        rho_config: Tuning for rho = pen_agg

    Returns:
        EstimatorValue on the grid
    """
    table = _table(data, u_grid)
    name = request.name
    blocks = request.blocks or tuple(range(request.m, request.m + config.DEFAULT_BLOCK_SPAN))
    if name == "sliding":
        return sliding_estimator(table, request.m)
    if name == "disjoint":
        return disjoint_estimator(table, request.m)
    if name == "agg":
        return aggregated_estimator(table, weight_scheme(blocks, request.weights))
    rho = resolve_rho(request.rho, table, rho_config)
    m_prime = 1 if request.m_prime is None else request.m_prime
    if name == "bc_naive":
        return bc_naive(table, request.m, m_prime, rho)
    if name == "bc_agg":
        return bc_aggregated(table, m_prime, weight_scheme(blocks, request.weights), rho)
    c_inf, _ = bc_regression(table, request.m_ref, weight_scheme(blocks, request.weights), rho)
    return c_inf
