"""Monte-Carlo convergence studies, slope fitting and result emission."""

import csv
import hashlib
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from enum import Enum
from functools import lru_cache
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from scipy import stats
from tqdm import tqdm

from .config import (DEFAULT_BOOTSTRAP, DEFAULT_DENSITY, DEFAULT_FLUCT_DELTA, DEFAULT_KERNEL,
                     DEFAULT_N_GRID, DEFAULT_SEED, DEFAULT_SHAPE, DEFAULT_SINGULAR_FACTOR,
                     DEFAULT_TRIALS, solver_settings)
from .constants import WORKERS_ENV
from .errors import ArgumentError, ExperimentError, ProblemTooLargeError
from .estimators import (EstimatorConfig, VarifoldVariant, bandwidth_rule, default_tau,
                         density_estimate, measure_estimate, projector_truncate,
                         split_measure_estimate, split_varifold_estimate, tangent_sigmas,
                         varifold_estimate)
from .geometry import ShapeModel, shape_by_name
from .kernels import KernelKind, NormalizedKernel
from .measures import Discrete
from .metrics import Ball, FlatMetricProblem, FlatNormResult, flat_norm, matrix_distance
from .sampling import sample, sample_split

logger = logging.getLogger(__name__)

BOOTSTRAP_STREAM = 7919
VARIANTS = ("W", "V", "split")
MAX_COARSEN_DOUBLINGS = 4


class ExperimentKind(Enum):
    RATE = "rate"
    MEASURE = "measure"
    FLUCT = "fluct"
    TANGENT = "tangent"
    DENSITY = "density"


TRIAL_COLUMNS: Dict[ExperimentKind, Tuple[str, ...]] = {
    ExperimentKind.RATE: ("grid_index", "n", "delta", "trial", "seed", "value", "mass", "support",
                          "exact"),
    ExperimentKind.MEASURE: ("grid_index", "n", "delta", "trial", "seed", "value", "mass", "support",
                             "exact"),
    ExperimentKind.FLUCT: ("grid_index", "n", "delta", "trial", "seed", "value"),
    ExperimentKind.TANGENT: ("grid_index", "n", "delta", "trial", "seed", "value", "unrestricted",
                             "kept_fraction"),
    ExperimentKind.DENSITY: ("grid_index", "n", "delta", "trial", "seed", "value", "estimate"),
}
FLAT_KINDS = (ExperimentKind.RATE, ExperimentKind.MEASURE)


def workers_from_env() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError as e:
        raise ArgumentError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from e
    return max(1, workers)


def _as_tuple(value, cast) -> Optional[tuple]:
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    return tuple(cast(v) for v in value)


@dataclass
class ExperimentConfig:
    """Settings of one convergence study; keys match the CLI flags."""

    shape: str = DEFAULT_SHAPE
    density: str = DEFAULT_DENSITY
    variant: str = "split"
    n_grid: Tuple[int, ...] = DEFAULT_N_GRID
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    delta: Optional[float] = None
    delta_grid: Optional[Tuple[float, ...]] = None
    tau: Optional[float] = None
    h: Optional[float] = None
    ball: Optional[str] = None
    point: Optional[Tuple[float, ...]] = None
    kernel: str = DEFAULT_KERNEL
    singular_factor: float = DEFAULT_SINGULAR_FACTOR
    bootstrap: int = DEFAULT_BOOTSTRAP
    solver: str = "auto"
    matrix_norm: str = "op"
    out: Optional[str] = None
    quiet: bool = False
    workers: int = field(default_factory=workers_from_env, compare=False)

    def __post_init__(self):
        self.n_grid = _as_tuple(self.n_grid, int)
        self.delta_grid = _as_tuple(self.delta_grid, float)
        self.point = _as_tuple(self.point, float)
        self.validate()

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ArgumentError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ArgumentError("n_grid must hold positive sample sizes")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ArgumentError(f"n_grid must be strictly increasing, got {self.n_grid}")
        if self.delta_grid is not None:
            if any(d <= 0 for d in self.delta_grid) or any(
                    b <= a for a, b in zip(self.delta_grid, self.delta_grid[1:])):
                raise ArgumentError("delta_grid must be positive and strictly increasing")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ArgumentError("trials must be a positive integer")
        if self.delta is not None and self.delta <= 0:
            raise ArgumentError("delta must be positive")
        if self.tau is not None and not 0 < self.tau <= 1:
            raise ArgumentError("tau must lie in (0, 1]")
        if self.h is not None and self.h <= 0:
            raise ArgumentError("h must be positive")
        if self.bootstrap < 0 or self.singular_factor < 0:
            raise ArgumentError("bootstrap and singular_factor must be nonnegative")
        if self.solver not in ("auto", "exact", "sparse"):
            raise ArgumentError(f"Unknown solver {self.solver!r}")
        if self.ball is not None:
            Ball.parse(self.ball)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """Build from a config-file mapping; dashes in keys are accepted for underscores."""
        known = {f.name for f in fields(cls)}
        normalized = {str(k).replace("-", "_"): v for k, v in data.items()}
        unknown = sorted(set(normalized) - known)
        if unknown:
            raise ArgumentError(f"Unknown configuration keys: {unknown}")
        return cls(**normalized)

    def to_mapping(self) -> Dict[str, Any]:
        """JSON-friendly echo without runtime-only fields."""
        data = asdict(self)
        for key in ("workers", "quiet"):
            data.pop(key)
        for key in ("n_grid", "delta_grid", "point"):
            if data[key] is not None:
                data[key] = list(data[key])
        return data

    def sample_size(self, n: int) -> int:
        """Points entering one estimator: N per part when splitting, 4N otherwise."""
        return n if self.variant == "split" else 4 * n

    def bandwidths(self, shape: ShapeModel) -> List[float]:
        if self.delta is not None:
            return [self.delta] * len(self.n_grid)
        reg = shape.regularity
        return [bandwidth_rule(self.sample_size(n), shape.intrinsic_dim, reg.a, reg.b) for n in self.n_grid]

    def resolution(self, shape: ShapeModel) -> float:
        """Quadrature resolution h, at most min delta / 10."""
        limit = min(self.bandwidths(shape)) / 10
        if self.h is None:
            return limit
        if self.h > limit * (1 + 1e-12):
            raise ArgumentError(f"h={self.h} exceeds min delta / 10 = {limit:.6g}")
        return self.h


@dataclass
class RateResult:
    kind: str
    grid: List[float]
    deltas: List[float]
    means: List[float]
    stderrs: List[float]
    medians: List[float]
    slope: Optional[float]
    slope_half_width: Optional[float]
    intercept: Optional[float]
    rows: List[Dict[str, Any]]
    config: Dict[str, Any]
    secondary: Dict[str, List[float]] = field(default_factory=dict)
    seeds: List[List[int]] = field(default_factory=list)
    all_exact: Optional[bool] = None

    @property
    def monotone_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.medians, self.medians[1:]))


def trial_seed(seed: int, grid_index: int, trial: int) -> int:
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(grid_index), int(trial)))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


@lru_cache(maxsize=8)
def _shape(spec: str, density: str) -> ShapeModel:
    return shape_by_name(spec, density)


@lru_cache(maxsize=4)
def _reference(spec: str, density: str, h: float, weights_only: bool) -> Discrete:
    reference = _shape(spec, density).quadrature_varifold(h)
    logger.info("reference quadrature for %s: %d cells (h=%.4g)", spec, reference.size, h)
    return reference.as_measure() if weights_only else reference


def _tau(cfg: ExperimentConfig, shape: ShapeModel) -> float:
    if cfg.tau is not None:
        return cfg.tau
    eta = NormalizedKernel.by_name(cfg.kernel, KernelKind.DENSITY, shape.intrinsic_dim)
    return default_tau(shape.intrinsic_dim, eta, shape.ahlfors_C0)


def _estimator(cfg: ExperimentConfig, shape: ShapeModel, delta: float) -> EstimatorConfig:
    variant = VarifoldVariant.W if cfg.variant == "W" else VarifoldVariant.V
    return EstimatorConfig.with_kernels(shape.intrinsic_dim, delta, _tau(cfg, shape),
                                        eta=cfg.kernel, phi=cfg.kernel,
                                        splitting=cfg.variant == "split", variant=variant)


def _flat(cfg: ExperimentConfig, estimate: Discrete, reference: Discrete, h: float) -> FlatNormResult:
    """Flat distance of one trial; ``auto`` solves exactly whenever the size cap allows."""
    ball = Ball.parse(cfg.ball) if cfg.ball else None
    problem = FlatMetricProblem(estimate, reference, localization=ball, matrix_norm=cfg.matrix_norm)
    settings = dict(solver_settings)
    if cfg.solver == "auto":
        settings['exact_threshold'] = settings['size_cap']
    grid_h = h
    for _ in range(MAX_COARSEN_DOUBLINGS):
        try:
            return flat_norm(problem, settings, method=cfg.solver, coarsen_h=grid_h)
        except ProblemTooLargeError:
            grid_h *= 2
            logger.warning("coarsened support over the size cap; retrying with grid %.4g", grid_h)
    return flat_norm(problem, settings, method=cfg.solver, coarsen_h=grid_h)


def _rate_trial(cfg: ExperimentConfig, kind: ExperimentKind, n: int, delta: float, seed: int) -> Dict[str, Any]:
    shape = _shape(cfg.shape, cfg.density)
    h = cfg.resolution(shape)
    weights_only = kind is ExperimentKind.MEASURE
    reference = _reference(cfg.shape, cfg.density, h, weights_only)
    reg = shape.regularity
    d = shape.intrinsic_dim
    if cfg.variant == "split":
        parts = sample_split(shape, n, seed)
        if weights_only:
            estimate = split_measure_estimate(parts, d, reg.a, reg.b, _tau(cfg, shape), cfg.kernel, delta)
        else:
            estimate = split_varifold_estimate(parts, d, reg.a, reg.b, _tau(cfg, shape),
                                               cfg.kernel, cfg.kernel, delta)
    else:
        batch = sample(shape, cfg.sample_size(n), seed)
        est_cfg = _estimator(cfg, shape, delta)
        estimate = measure_estimate(batch, est_cfg) if weights_only else varifold_estimate(batch, est_cfg)
    result = _flat(cfg, estimate, reference, h)
    if not result.exact:
        logger.debug("N=%d seed=%d solved on sparsified arcs", n, seed)
    return {"value": result.value, "mass": estimate.total_mass, "support": estimate.size,
            "exact": bool(result.exact)}


def _tangent_trial(cfg: ExperimentConfig, n: int, delta: float, seed: int) -> Dict[str, Any]:
    shape = _shape(cfg.shape, cfg.density)
    est_cfg = _estimator(cfg, shape, delta)
    if cfg.variant == "split":
        parts = sample_split(shape, n, seed)
        points = parts.x.points
        sigmas = tangent_sigmas(parts.y_tilde, parts.z, points, est_cfg)
    else:
        points = sample(shape, cfg.sample_size(n), seed).points
        sigmas = tangent_sigmas(points, points, points, est_cfg)
    errors = matrix_distance(projector_truncate(sigmas, shape.intrinsic_dim),
                             shape.tangent_projectors(points), cfg.matrix_norm)
    kept = shape.singular_distance(points) >= cfg.singular_factor * delta
    restricted = float(np.mean(errors[kept])) if np.any(kept) else float("nan")
    return {"value": restricted, "unrestricted": float(np.mean(errors)),
            "kept_fraction": float(np.mean(kept))}


def _query_point(cfg: ExperimentConfig, shape: ShapeModel) -> np.ndarray:
    return np.asarray(cfg.point if cfg.point is not None else shape.anchor_point, dtype=float)


def _fluct_trial(cfg: ExperimentConfig, n: int, delta: float, seed: int) -> Dict[str, Any]:
    shape = _shape(cfg.shape, cfg.density)
    batch = sample(shape, n, seed)
    return {"value": density_estimate(batch, None, _query_point(cfg, shape), _estimator(cfg, shape, delta))}


def _density_trial(cfg: ExperimentConfig, n: int, delta: float, seed: int) -> Dict[str, Any]:
    shape = _shape(cfg.shape, cfg.density)
    x = _query_point(cfg, shape)
    batch = sample(shape, cfg.sample_size(n), seed)
    estimate = density_estimate(batch, None, x, _estimator(cfg, shape, delta))
    return {"value": abs(estimate - shape.density_at(x)), "estimate": estimate}


def _run_trial(job: Tuple[ExperimentKind, ExperimentConfig, int, int, float, int]) -> Dict[str, Any]:
    kind, cfg, grid_index, n, delta, trial = job
    seed = trial_seed(cfg.seed, grid_index, trial)
    try:
        if kind is ExperimentKind.TANGENT:
            row = _tangent_trial(cfg, n, delta, seed)
        elif kind is ExperimentKind.FLUCT:
            row = _fluct_trial(cfg, n, delta, seed)
        elif kind is ExperimentKind.DENSITY:
            row = _density_trial(cfg, n, delta, seed)
        else:
            row = _rate_trial(cfg, kind, n, delta, seed)
    except ExperimentError:
        raise
    except Exception as e:
        raise ExperimentError(f"{kind.value} trial failed: {e}", n, trial, seed) from e
    logger.debug("%s N=%d trial=%d value=%.6g", kind.value, n, trial, row["value"])
    return {"grid_index": grid_index, "n": n, "delta": delta, "trial": trial, "seed": seed, **row}


def _execute(kind: ExperimentKind, cfg: ExperimentConfig, grid: List[Tuple[int, float]]) -> List[Dict[str, Any]]:
    jobs = [(kind, cfg, i, n, delta, t) for i, (n, delta) in enumerate(grid) for t in range(cfg.trials)]
    progress = tqdm(total=len(jobs), desc=kind.value, unit="trial",
                    disable=cfg.quiet or not sys.stderr.isatty())
    rows: List[Dict[str, Any]] = []
    with progress:
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for row in pool.map(_run_trial, jobs):
                    rows.append(row)
                    progress.update()
        else:
            for job in jobs:
                rows.append(_run_trial(job))
                progress.update()
    return rows


def _statistic(kind: ExperimentKind):
    if kind is ExperimentKind.FLUCT:
        return lambda values: np.std(values, ddof=1, axis=-1) if np.shape(values)[-1] > 1 else np.zeros(
            np.shape(values)[:-1])
    return lambda values: np.mean(values, axis=-1)


def fit_slope(grid, values) -> Tuple[Optional[float], Optional[float]]:
    """Least-squares slope and intercept of log(values) against log(grid)."""
    grid, values = np.asarray(grid, dtype=float), np.asarray(values, dtype=float)
    ok = np.isfinite(values) & (values > 0)
    if np.sum(ok) < 2:
        return None, None
    fit = stats.linregress(np.log(grid[ok]), np.log(values[ok]))
    return float(fit.slope), float(fit.intercept)


def bootstrap_half_width(kind: ExperimentKind, grid, samples: List[np.ndarray], resamples: int,
                         seed: int) -> Optional[float]:
    """Half-width of the 95% percentile interval of the slope, resampling trials per grid point."""
    if resamples < 1 or len(samples) < 2 or min(len(s) for s in samples) < 2:
        return None
    statistic = _statistic(kind)
    log_grid = np.log(np.asarray(grid, dtype=float))

    def slope(*resampled):
        values = np.array([statistic(np.asarray(s)) for s in resampled])
        return np.polyfit(log_grid, np.log(np.maximum(values, np.finfo(float).tiny)), 1)[0]

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(BOOTSTRAP_STREAM,)))
    result = stats.bootstrap(tuple(samples), slope, n_resamples=resamples, paired=False,
                             vectorized=False, method="percentile", random_state=rng)
    low, high = result.confidence_interval
    return float((high - low) / 2)


def _aggregate(kind: ExperimentKind, cfg: ExperimentConfig, grid_values: List[float],
               deltas: List[float], rows: List[Dict[str, Any]]) -> RateResult:
    statistic = _statistic(kind)
    samples, means, stderrs, medians, seeds = [], [], [], [], []
    secondary: Dict[str, List[float]] = {}
    for i in range(len(grid_values)):
        group = [r for r in rows if r["grid_index"] == i]
        values = np.array([r["value"] for r in group], dtype=float)
        samples.append(values[np.isfinite(values)])
        seeds.append([r["seed"] for r in group])
        means.append(float(statistic(values)))
        spread = np.std(values, ddof=1) if values.size > 1 else 0.0
        if kind is ExperimentKind.FLUCT:
            stderrs.append(float(spread / np.sqrt(2 * (values.size - 1))) if values.size > 1 else 0.0)
        else:
            stderrs.append(float(spread / np.sqrt(values.size)))
        medians.append(float(np.median(values)))
        for key in TRIAL_COLUMNS[kind][6:]:
            if key in ("mass", "unrestricted"):
                secondary.setdefault(f"{key}_median", []).append(float(np.median([r[key] for r in group])))
                secondary.setdefault(f"{key}_mean", []).append(float(np.mean([r[key] for r in group])))
    slope, intercept = fit_slope(grid_values, means)
    half = bootstrap_half_width(kind, grid_values, samples, cfg.bootstrap, cfg.seed) if slope is not None else None
    if slope is None:
        logger.info("%s: slope undefined on a grid of %d point(s)", kind.value, len(grid_values))
    else:
        logger.info("%s: fitted slope %.4f", kind.value, slope)
    all_exact = all(r["exact"] for r in rows) if kind in FLAT_KINDS else None
    if all_exact is False:
        logger.warning("%s: %d of %d flat distances came from the sparsified solver", kind.value,
                       sum(not r["exact"] for r in rows), len(rows))
    return RateResult(kind.value, list(grid_values), list(deltas), means, stderrs, medians, slope, half,
                      intercept, rows, cfg.to_mapping(), secondary, seeds, all_exact)


def _check_query_point(cfg: ExperimentConfig, shape: ShapeModel, widest: float) -> None:
    if shape.singular_distance(_query_point(cfg, shape)) < cfg.singular_factor * widest:
        raise ArgumentError(f"x must stay {cfg.singular_factor} * delta away from the singular set")


def _run(kind: ExperimentKind, cfg: ExperimentConfig) -> RateResult:
    shape = _shape(cfg.shape, cfg.density)
    deltas = cfg.bandwidths(shape)
    if kind in FLAT_KINDS:
        cfg.resolution(shape)
    if kind is ExperimentKind.DENSITY:
        _check_query_point(cfg, shape, max(deltas))
    logger.info("%s experiment on %r, N-grid %s, %d trials", kind.value, shape, cfg.n_grid, cfg.trials)
    rows = _execute(kind, cfg, list(zip(cfg.n_grid, deltas)))
    return _aggregate(kind, cfg, [float(n) for n in cfg.n_grid], deltas, rows)


def run_rate_experiment(cfg: ExperimentConfig) -> RateResult:
    """Mean beta(V^, W_S) per N against a reference quadrature, with the log-log slope."""
    return _run(ExperimentKind.RATE, cfg)


def run_measure_experiment(cfg: ExperimentConfig) -> RateResult:
    """As the rate experiment, comparing nu^ with the quadrature of H^d|S."""
    return _run(ExperimentKind.MEASURE, cfg)


def run_tangent_experiment(cfg: ExperimentConfig) -> RateResult:
    """Mean operator-norm tangent error over the sample points.

    ``value`` excludes points within singular_factor * delta_N of the singular
    set; ``unrestricted`` keeps every point.
    """
    return _run(ExperimentKind.TANGENT, cfg)


def run_density_experiment(cfg: ExperimentConfig) -> RateResult:
    """Mean |theta_{delta_N,N}(x) - theta(x)| per N at a regular point x.

    x is ``cfg.point`` or the shape's anchor point and must stay
    singular_factor * delta_N away from the singular set.
    """
    return _run(ExperimentKind.DENSITY, cfg)


def run_fluctuation_experiment(cfg: ExperimentConfig, x=None) -> RateResult:
    """Standard deviation of theta_{delta,N}(x) across seeds.

    Runs over the N-grid at fixed delta (``cfg.delta``, default 0.2) or, when
    ``cfg.delta_grid`` is set, over that grid at the single N of ``cfg.n_grid``.
    """
    shape = _shape(cfg.shape, cfg.density)
    if x is not None:
        cfg = ExperimentConfig.from_mapping({**cfg.to_mapping(), "point": list(np.ravel(x)),
                                             "workers": cfg.workers, "quiet": cfg.quiet})
    if cfg.delta_grid is not None:
        if len(cfg.n_grid) != 1:
            raise ArgumentError("a delta grid needs exactly one N")
        grid = [(cfg.n_grid[0], delta) for delta in cfg.delta_grid]
        grid_values = list(cfg.delta_grid)
    else:
        delta = cfg.delta if cfg.delta is not None else DEFAULT_FLUCT_DELTA
        grid = [(n, delta) for n in cfg.n_grid]
        grid_values = [float(n) for n in cfg.n_grid]
    _check_query_point(cfg, shape, max(delta for _, delta in grid))
    rows = _execute(ExperimentKind.FLUCT, cfg, grid)
    return _aggregate(ExperimentKind.FLUCT, cfg, grid_values, [delta for _, delta in grid], rows)


def run_experiment(kind: Union[str, ExperimentKind], cfg: ExperimentConfig) -> RateResult:
    kind = ExperimentKind(kind)
    if kind is ExperimentKind.FLUCT:
        return run_fluctuation_experiment(cfg)
    return _run(kind, cfg)


def package_versions() -> Dict[str, str]:
    versions = {}
    for name in ("numpy", "scipy", "pot", "ortools", "tqdm"):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def trials_csv(result: RateResult) -> str:
    columns = TRIAL_COLUMNS[ExperimentKind(result.kind)]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in result.rows:
        writer.writerow([repr(float(row[c])) if isinstance(row[c], float) else row[c] for c in columns])
    return buffer.getvalue()


def summary_mapping(result: RateResult) -> Dict[str, Any]:
    """Summary in a fixed field order, without the timestamp and hash."""
    return {
        "experiment": result.kind,
        "config": result.config,
        "grid": result.grid,
        "deltas": result.deltas,
        "means": result.means,
        "stderrs": result.stderrs,
        "medians": result.medians,
        "secondary": result.secondary,
        "slope": result.slope,
        "slope_half_width": result.slope_half_width,
        "intercept": result.intercept,
        "all_exact": result.all_exact,
        "seeds": result.seeds,
        "versions": package_versions(),
    }


def emit_results(result: RateResult, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write ``trials.csv`` and ``summary.json`` into ``out_dir``.

    The summary's ``hash`` covers the CSV and every summary field except the
    timestamp, so identical runs share a hash.
    """
    out_dir = Path(out_dir)
    table = trials_csv(result)
    summary = summary_mapping(result)
    digest = hashlib.sha256()
    digest.update(table.encode("utf-8"))
    digest.update(json.dumps(summary, sort_keys=False).encode("utf-8"))
    summary["hash"] = digest.hexdigest()
    summary["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    paths = {"trials": out_dir / "trials.csv", "summary": out_dir / "summary.json"}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths["trials"].write_text(table, encoding="utf-8")
        paths["summary"].write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise ExperimentError(f"Cannot write results to {out_dir}: {e}") from e
    logger.info("wrote %s and %s", paths["trials"], paths["summary"])
    return paths
