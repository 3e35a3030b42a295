"""
Simulation Lab Module - Seeded parallel Monte Carlo experiments over block sizes and estimators

Every replication draws its data from its own stream derived from
(master_seed, replication index), evaluates every configured estimator at
every block size, and hands back per-point estimates. Results are reduced
in replication order, so the summary does not depend on the worker count.
"""
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import config
from modules.block_engine import SLIDING
from modules.copula_models import OuterPowerClayton, TCopula
from modules.errors import BlockmaxError, ExperimentError, InvalidModelError, UnsupportedModelError
from modules.estimators import (
    ESTIMATOR_NAMES,
    WEIGHT_RULES,
    BlockEstimateTable,
    EstimatorRequest,
    RhoConfig,
    default_rho_config,
    evaluate,
    parse_rho_option,
)
from modules.series_gen import MovingMaxSpec, as_moving_max, attractor_of, generate
from utils.helpers import product_grid

logger = logging.getLogger(__name__)

STATS = ("mse", "bias2", "var")
SUMMARY_COLUMNS = ["model", "estimator", "m", "stat", "value"]
PILOT_STREAM = 2 ** 32 - 1
OPC_BETA = math.log(2.0) / math.log(1.75)

StatusCallback = Callable[..., None]


# ---------------------------------------------------------------------------
# Experiment description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EstimatorConfig:
    """
    One estimator line of an experiment.

    Aggregated estimators use M = extra_blocks ∪ {m, ..., m + span - 1}.
    Block sizes below min_block are skipped.
    """
    name: str
    m_prime: int = 1
    span: int = config.DEFAULT_BLOCK_SPAN
    extra_blocks: Tuple[int, ...] = ()
    weights: str = "harmonic"
    rho: str = "pen_agg"
    min_block: int = 1
    label: str = ""

    def __post_init__(self):
        if self.name not in ESTIMATOR_NAMES:
            raise InvalidModelError(f"Unknown estimator '{self.name}' (known: {', '.join(ESTIMATOR_NAMES)})")
        if self.weights not in WEIGHT_RULES:
            raise InvalidModelError(f"Unknown weight rule '{self.weights}'")
        if self.span < 1 or self.min_block < 1 or self.m_prime < 1:
            raise InvalidModelError("span, min_block and m_prime must be positive")
        parse_rho_option(self.rho)
        object.__setattr__(self, "extra_blocks", tuple(int(k) for k in self.extra_blocks))
        if not self.label:
            object.__setattr__(self, "label", self.name)

    @property
    def aggregated(self) -> bool:
        return self.name in ("agg", "bc_agg", "bc_reg")

    def applies(self, m: int) -> bool:
        return m >= self.min_block

    def blocks(self, m: int) -> Tuple[int, ...]:
        return tuple(sorted(set(self.extra_blocks) | set(range(m, m + self.span))))

    def largest_block(self, m: int) -> int:
        sizes = list(self.blocks(m)) if self.aggregated else [m]
        if self.name in ("bc_naive", "bc_agg"):
            sizes.append(self.m_prime)
        return max(sizes)

    def request(self, m: int) -> EstimatorRequest:
        return EstimatorRequest(
            name=self.name,
            m=m,
            m_prime=self.m_prime,
            blocks=self.blocks(m) if self.aggregated else (),
            weights=self.weights,
            rho=self.rho,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "label": self.label,
            "m_prime": self.m_prime,
            "span": self.span,
            "extra_blocks": list(self.extra_blocks),
            "weights": self.weights,
            "rho": self.rho,
            "min_block": self.min_block,
        }


def default_estimators() -> List[EstimatorConfig]:
    """Line-up of the bias and bias-correction comparisons"""
    return [
        EstimatorConfig("sliding"),
        EstimatorConfig("disjoint"),
        EstimatorConfig("agg"),
        EstimatorConfig("bc_naive", m_prime=1, min_block=2),
        EstimatorConfig("bc_agg", m_prime=1, min_block=2),
        EstimatorConfig("bc_reg", extra_blocks=(1,), min_block=2),
    ]


def select_estimators(labels: Optional[Sequence[str]] = None) -> List[EstimatorConfig]:
    """Subset of the default line-up by label, in the order given"""
    lineup = default_estimators()
    if not labels:
        return lineup
    known = {est.label: est for est in lineup}
    unknown = [label for label in labels if label not in known]
    if unknown:
        raise ExperimentError(f"Unknown estimators {unknown} (known: {sorted(known)})")
    return [known[label] for label in labels]


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce one Monte Carlo experiment"""
    name: str
    model: MovingMaxSpec
    n: int
    reps: int
    grid: np.ndarray
    m_values: Tuple[int, ...]
    estimators: List[EstimatorConfig] = field(default_factory=default_estimators)
    master_seed: int = config.MASTER_SEED
    truth: str = "exact"
    rho_config: Optional[RhoConfig] = None

    def __post_init__(self):
        self.model = as_moving_max(self.model)
        self.grid = np.atleast_2d(np.asarray(self.grid, dtype=float))
        self.m_values = tuple(int(m) for m in self.m_values)
        self.validate()

    @property
    def d(self) -> int:
        return self.model.d

    def validate(self) -> None:
        if self.reps < 1:
            raise ExperimentError(f"reps must be >= 1, got {self.reps}")
        if self.n < 1:
            raise ExperimentError(f"n must be >= 1, got {self.n}")
        if self.grid.size == 0 or self.grid.shape[1] != self.d:
            raise ExperimentError(f"Grid must be a nonempty set of {self.d}-dimensional points")
        if np.any(self.grid < 0.0) or np.any(self.grid > 1.0):
            raise ExperimentError("Grid points must lie in [0, 1]^d")
        if not self.m_values or min(self.m_values) < 1:
            raise ExperimentError("Block sizes must be positive integers")
        if not self.estimators:
            raise ExperimentError("At least one estimator is required")
        if self.truth not in ("exact", "pilot"):
            raise ExperimentError(f"truth must be 'exact' or 'pilot', got '{self.truth}'")
        for est in self.estimators:
            for m in self.m_values:
                if est.applies(m) and est.largest_block(m) > self.n:
                    raise ExperimentError(
                        f"Estimator {est.label} at m={m} needs block size {est.largest_block(m)} > n={self.n}"
                    )
        labels = [est.label for est in self.estimators]
        if len(set(labels)) != len(labels):
            raise ExperimentError(f"Estimator labels must be unique, got {labels}")

    def rho(self) -> RhoConfig:
        return self.rho_config or default_rho_config(self.d)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "model": self.model.to_config(),
            "description": self.model.describe(),
            "n": self.n,
            "reps": self.reps,
            "grid": self.grid.tolist(),
            "m_values": list(self.m_values),
            "estimators": [est.to_dict() for est in self.estimators],
            "master_seed": self.master_seed,
            "truth": self.truth,
        }


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _alternating_lags(d: int) -> List[List[float]]:
    if d == 2:
        return [[0.25, 0.5]]
    return [[0.25 if j % 2 == 0 else 0.75 for j in range(d)]]


def _preset_grid(d: int) -> np.ndarray:
    if d == 2:
        return product_grid(np.round(np.arange(1, 10) / 10.0, 10), 2)
    if d == 4:
        return product_grid([0.25, 0.5, 0.75], 4)
    return product_grid([0.25, 0.75], d)


# name -> (base model factory, moving maximum?)
_PRESETS: Dict[str, Tuple[Callable[[], object], bool]] = {
    "M1": (lambda: OuterPowerClayton(theta=1.0, beta=OPC_BETA, d=2), False),
    "M2": (lambda: OuterPowerClayton(theta=1.0, beta=OPC_BETA, d=2), True),
    "M3": (lambda: TCopula(nu=5, theta=0.5, d=2), False),
    "M4": (lambda: TCopula(nu=5, theta=0.5, d=2), True),
    "M5": (lambda: TCopula(nu=3, theta=0.25, d=2), True),
    "M6": (lambda: OuterPowerClayton(theta=1.0, beta=OPC_BETA, d=4), False),
    "M7": (lambda: OuterPowerClayton(theta=1.0, beta=OPC_BETA, d=4), True),
    "M8": (lambda: TCopula(nu=5, theta=0.5, d=4), False),
    "M9": (lambda: TCopula(nu=5, theta=0.5, d=4), True),
    "M10": (lambda: TCopula(nu=3, theta=0.25, d=4), True),
    "M11": (lambda: OuterPowerClayton(theta=1.0, beta=OPC_BETA, d=8), False),
    "M12": (lambda: OuterPowerClayton(theta=1.0, beta=OPC_BETA, d=8), True),
    "M13": (lambda: TCopula(nu=5, theta=0.5, d=8), False),
    "M14": (lambda: TCopula(nu=5, theta=0.5, d=8), True),
    "M15": (lambda: TCopula(nu=3, theta=0.25, d=8), True),
}

PRESET_NAMES = tuple(_PRESETS)


def preset_model(name: str) -> MovingMaxSpec:
    if name not in _PRESETS:
        raise ExperimentError(f"Unknown preset '{name}' (known: {', '.join(PRESET_NAMES)})")
    factory, moving = _PRESETS[name]
    base = factory()
    return MovingMaxSpec(base, np.array(_alternating_lags(base.d)) if moving else np.zeros((0, base.d)))


def preset(
    name: str,
    n: Optional[int] = None,
    reps: Optional[int] = None,
    full_scale: bool = False,
    master_seed: Optional[int] = None,
    m_values: Optional[Sequence[int]] = None,
    estimators: Optional[List[EstimatorConfig]] = None,
) -> ExperimentSpec:
    """
    Build the experiment of a named model.

    Args:
        name: One of M1..M15
        n: Sample size (defaults to config.DEFAULT_N)
        reps: Replications (defaults to DEFAULT_REPS, or FULL_SCALE_REPS with full_scale)
        full_scale: Use the full replication count
        master_seed: Seed of the replication streams
        m_values: Block sizes (defaults to 1..20)
        estimators: Estimator line-up (defaults to default_estimators())

    Returns:
        ExperimentSpec; t-copula models with d >= 3 use pilot ground truth
    """
    model = preset_model(name)
    if reps is None:
        reps = config.FULL_SCALE_REPS if full_scale else config.DEFAULT_REPS
    truth = "pilot" if isinstance(model.base, TCopula) and model.d >= 3 else "exact"
    return ExperimentSpec(
        name=name,
        model=model,
        n=config.DEFAULT_N if n is None else n,
        reps=reps,
        grid=_preset_grid(model.d),
        m_values=tuple(m_values) if m_values else tuple(range(1, 21)),
        estimators=estimators or default_estimators(),
        master_seed=config.MASTER_SEED if master_seed is None else master_seed,
        truth=truth,
    )


def list_presets() -> List[dict]:
    return [
        {"name": name, "model": preset_model(name).describe(), "d": preset_model(name).d}
        for name in PRESET_NAMES
    ]


# ---------------------------------------------------------------------------
# Streams and ground truth
# ---------------------------------------------------------------------------

def replication_rng(master_seed: int, replication: int) -> np.random.Generator:
    """Independent stream for one replication, keyed by (master_seed, replication)"""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(replication,)))


def pilot_truth(spec: ExperimentSpec) -> np.ndarray:
    """Sliding estimate at PILOT_BLOCK on a PILOT_N-row series from a dedicated stream"""
    rng = replication_rng(spec.master_seed, PILOT_STREAM)
    data = generate(spec.model, config.PILOT_N, rng)
    return BlockEstimateTable(data, spec.grid).estimate(config.PILOT_BLOCK, SLIDING).copy()


def ground_truth(spec: ExperimentSpec) -> np.ndarray:
    """
    C_inf on the experiment grid.

    Raises:
        ExperimentError: exact truth requested for a model without a known attractor
    """
    if spec.truth == "pilot":
        logger.info("[SIMLAB] %s: pilot ground truth from n=%d, m=%d", spec.name, config.PILOT_N, config.PILOT_BLOCK)
        return pilot_truth(spec)
    try:
        return np.asarray(attractor_of(spec.model).cdf(spec.grid), dtype=float)
    except UnsupportedModelError as e:
        raise ExperimentError(f"No exact ground truth for {spec.model.describe()}; use truth=pilot ({str(e)})") from e


# ---------------------------------------------------------------------------
# Replications
# ---------------------------------------------------------------------------

@dataclass
class ReplicationResult:
    """Per-point estimates of one replication, keyed by (estimator label, m)"""
    index: int
    estimates: Dict[Tuple[str, int], np.ndarray]
    failures: Dict[Tuple[str, int], str]
    rho: Optional[float] = None


def run_replication(spec: ExperimentSpec, index: int) -> ReplicationResult:
    rng = replication_rng(spec.master_seed, index)
    data = generate(spec.model, spec.n, rng)
    table = BlockEstimateTable(data, spec.grid)
    rho_config = spec.rho()
    estimates: Dict[Tuple[str, int], np.ndarray] = {}
    failures: Dict[Tuple[str, int], str] = {}
    for est in spec.estimators:
        for m in spec.m_values:
            if not est.applies(m):
                continue
            try:
                estimates[(est.label, m)] = evaluate(est.request(m), table, rho_config=rho_config).values
            except BlockmaxError as e:
                failures[(est.label, m)] = str(e)
    cached = table.cached_rho(rho_config)
    rho = cached.value if cached is not None else None
    return ReplicationResult(index=index, estimates=estimates, failures=failures, rho=rho)


@dataclass
class SummaryTable:
    """
    Grid-averaged statistics (scaled by SCORE_SCALE) in long format,
    with optional per-point values and per-cell failure accounting.
    """
    model: str
    frame: pd.DataFrame
    points: Optional[pd.DataFrame] = None
    failures: Dict[str, int] = field(default_factory=dict)
    flagged: List[str] = field(default_factory=list)
    reps: int = 0
    spec: Optional[dict] = None
    elapsed_seconds: float = 0.0
    rho_mean: Optional[float] = None

    def value(self, estimator: str, m: int, stat: str) -> float:
        rows = self.frame[(self.frame["estimator"] == estimator) & (self.frame["m"] == m) & (self.frame["stat"] == stat)]
        if rows.empty:
            raise KeyError(f"No {stat} for {estimator} at m={m}")
        return float(rows["value"].iloc[0])

    def curve(self, estimator: str, stat: str) -> pd.Series:
        rows = self.frame[(self.frame["estimator"] == estimator) & (self.frame["stat"] == stat)]
        return rows.set_index("m")["value"].sort_index()


def _cell_key(label: str, m: int) -> str:
    return f"{label}:{m}"


def summarize(spec: ExperimentSpec, results: List[ReplicationResult], truth: np.ndarray) -> SummaryTable:
    """
    Reduce replications in index order into bias^2, variance and MSE.

    Variance uses the population convention; mse = bias2 + var per point.
    """
    results = sorted(results, key=lambda r: r.index)
    rows = []
    point_rows = []
    failures: Dict[str, int] = {}
    flagged: List[str] = []
    coord_names = [f"u{j + 1}" for j in range(spec.d)]
    for est in spec.estimators:
        for m in spec.m_values:
            if not est.applies(m):
                continue
            key = (est.label, m)
            values = [r.estimates[key] for r in results if key in r.estimates]
            failed = sum(1 for r in results if key in r.failures)
            if failed:
                failures[_cell_key(*key)] = failed
                if failed / len(results) > config.FAILURE_FLAG_RATE:
                    flagged.append(_cell_key(*key))
            if not values:
                continue
            stack = np.vstack(values)
            mean = stack.mean(axis=0)
            bias2 = (mean - truth) ** 2
            var = stack.var(axis=0)
            per_stat = {"mse": bias2 + var, "bias2": bias2, "var": var}
            for stat in STATS:
                rows.append({
                    "model": spec.name,
                    "estimator": est.label,
                    "m": m,
                    "stat": stat,
                    "value": float(per_stat[stat].mean() * config.SCORE_SCALE),
                })
                for point, value in zip(spec.grid, per_stat[stat]):
                    point_rows.append({
                        "model": spec.name, "estimator": est.label, "m": m,
                        **dict(zip(coord_names, point.tolist())),
                        "stat": stat, "value": float(value * config.SCORE_SCALE),
                    })
    rho_values = [r.rho for r in results if r.rho is not None]
    return SummaryTable(
        model=spec.name,
        frame=pd.DataFrame(rows, columns=SUMMARY_COLUMNS),
        points=pd.DataFrame(point_rows, columns=["model", "estimator", "m", *coord_names, "stat", "value"]),
        failures=failures,
        flagged=flagged,
        reps=len(results),
        spec=spec.to_dict(),
        rho_mean=float(np.mean(rho_values)) if rho_values else None,
    )


def run(
    spec: ExperimentSpec,
    workers: Optional[int] = None,
    status_callback: Optional[StatusCallback] = None,
) -> SummaryTable:
    """
    Run every replication of an experiment and summarise.

    Args:
        spec: Experiment description
        workers: Parallel replications (defaults to config.MAX_PARALLEL_WORKERS)
        status_callback: Optional callback(status, progress=...) for progress updates

    Returns:
        SummaryTable, identical for every worker count

    Raises:
        ExperimentError: invalid spec or missing ground truth
    """
    started = time.perf_counter()
    workers = workers or config.MAX_PARALLEL_WORKERS
    spec.validate()

    if status_callback:
        status_callback("generating", progress=1)
    truth = ground_truth(spec)

    if status_callback:
        status_callback("estimating", progress=5)
    results: List[ReplicationResult] = []
    completed = 0
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {executor.submit(run_replication, spec, r): r for r in range(spec.reps)}
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            try:
                results.append(future.result())
            except BlockmaxError as e:
                raise ExperimentError(f"Replication {index} failed: {str(e)}") from e
            completed += 1
            if status_callback:
                status_callback("estimating", progress=5 + int(completed / spec.reps * 85))

    if status_callback:
        status_callback("summarizing", progress=92)
    table = summarize(spec, results, truth)
    table.elapsed_seconds = time.perf_counter() - started
    for cell in table.flagged:
        logger.warning("[SIMLAB] %s: cell %s failed in %d of %d replications", spec.name, cell, table.failures[cell], spec.reps)
    logger.info("[SIMLAB] %s: %d replications in %.1fs", spec.name, spec.reps, table.elapsed_seconds)
    return table


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def emit(table: SummaryTable, path: str, per_point: bool = False) -> Dict[str, str]:
    """
    Write summary.csv, optionally points.csv, and manifest.json into a directory.

    Existing files are overwritten.

    Returns:
        Mapping of artifact name to written path

    Raises:
        ExperimentError: on I/O failure
    """
    written = {}
    try:
        os.makedirs(path, exist_ok=True)
        written["summary"] = os.path.join(path, "summary.csv")
        table.frame.to_csv(written["summary"], index=False)
        if per_point and table.points is not None:
            written["points"] = os.path.join(path, "points.csv")
            table.points.to_csv(written["points"], index=False)
        written["manifest"] = os.path.join(path, "manifest.json")
        manifest = {
            "version": config.VERSION,
            "model": table.model,
            "reps": table.reps,
            "spec": table.spec,
            "failures": table.failures,
            "flagged": table.flagged,
            "elapsed_seconds": table.elapsed_seconds,
            "rho_mean": table.rho_mean,
            "score_scale": config.SCORE_SCALE,
        }
        with open(written["manifest"], "w") as f:
            json.dump(manifest, f, indent=2)
    except OSError as e:
        raise ExperimentError(f"Failed to write results to {path}: {str(e)}") from e
    return written


def load_summary(path: str) -> SummaryTable:
    """Parse an emitted summary.csv (and its manifest, when present) back into a table"""
    csv_path = os.path.join(path, "summary.csv") if os.path.isdir(path) else path
    try:
        frame = pd.read_csv(csv_path, float_precision="round_trip", dtype={"model": str, "estimator": str, "stat": str})
    except (OSError, pd.errors.ParserError) as e:
        raise ExperimentError(f"Failed to read summary {csv_path}: {str(e)}") from e
    if list(frame.columns) != SUMMARY_COLUMNS:
        raise ExperimentError(f"{csv_path} is not a summary table (columns {list(frame.columns)})")
    manifest = {}
    manifest_path = os.path.join(os.path.dirname(csv_path), "manifest.json")
    if os.path.exists(manifest_path):
        with open(manifest_path) as f:
            manifest = json.load(f)
    model = manifest.get("model") or (str(frame["model"].iloc[0]) if not frame.empty else "")
    return SummaryTable(
        model=model,
        frame=frame,
        failures=manifest.get("failures", {}),
        flagged=manifest.get("flagged", []),
        reps=manifest.get("reps", 0),
        spec=manifest.get("spec"),
        elapsed_seconds=manifest.get("elapsed_seconds", 0.0),
        rho_mean=manifest.get("rho_mean"),
    )


# ---------------------------------------------------------------------------
# Timing and resources
# ---------------------------------------------------------------------------

def time_estimators(spec: ExperimentSpec, m_values: Optional[Sequence[int]] = None, repeats: int = 3) -> pd.DataFrame:
    """
    Wall-clock seconds per estimator for one generated dataset.

    Each repeat starts from a fresh estimate table, so shared block maxima
    are recomputed; the median over repeats is reported.
    """
    data = generate(spec.model, spec.n, replication_rng(spec.master_seed, 0))
    m_values = tuple(m_values) if m_values else spec.m_values
    rho_config = spec.rho()
    rows = []
    for est in spec.estimators:
        timings = []
        for _ in range(max(repeats, 1)):
            table = BlockEstimateTable(data, spec.grid)
            started = time.perf_counter()
            for m in m_values:
                if est.applies(m):
                    try:
                        evaluate(est.request(m), table, rho_config=rho_config)
                    except BlockmaxError as e:
                        logger.debug("[TIMING] %s at m=%d failed: %s", est.label, m, str(e))
            timings.append(time.perf_counter() - started)
        rows.append({"estimator": est.label, "seconds": float(np.median(timings)), "blocks": len(m_values)})
    return pd.DataFrame(rows, columns=["estimator", "seconds", "blocks"])


def estimate_memory_bytes(spec: ExperimentSpec, workers: Optional[int] = None) -> int:
    """Rough peak memory: stored per-point estimates plus the per-worker block maxima cache"""
    workers = workers or config.MAX_PARALLEL_WORKERS
    cells = sum(1 for est in spec.estimators for m in spec.m_values if est.applies(m))
    stored = spec.reps * cells * spec.grid.shape[0] * 8
    cached_blocks = len(set(range(1, max(spec.m_values) + config.DEFAULT_BLOCK_SPAN)) | set(spec.rho().blocks))
    working = workers * cached_blocks * spec.n * spec.d * 8 * 2
    pilot = config.PILOT_N * spec.d * 8 * 3 if spec.truth == "pilot" else 0
    return int((stored + working + pilot) * config.RAM_USAGE_MULTIPLIER)
