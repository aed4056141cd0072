"""Bounded-Lipschitz (flat) distances between discrete measures and varifolds.

The distance max { sum_i f_i c_i : |f_i| <= rho_i, |f_i - f_j| <= d(i, j) } is
computed as an optimal transport problem on the support extended by a
ground node g, with d(i, g) = rho_i and d(i, j) capped at rho_i + rho_j.
Transport through g is destruction followed by creation.  Without
localization rho_i = 1, so the cap is the usual min(d, 2).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence

import numpy as np
import ot
from ortools.graph.python import min_cost_flow
from scipy.optimize import linprog
from scipy.spatial import cKDTree

from .config import solver_settings, validate_solver_settings
from .constants import MAX_ORACLE_POINTS
from .errors import (ArgumentError, DegenerateGapError, FlowSolverError,
                     OracleTooLargeError, ProblemTooLargeError)
from .estimators import projector_truncate, snap_to_projector
from .measures import Discrete, DiscreteMeasure, DiscreteVarifold

logger = logging.getLogger(__name__)

_BLOCK_ENTRIES = 1 << 20


class MetricKind(Enum):
    EUCLIDEAN = "euclidean"
    PRODUCT_VARIFOLD = "product_varifold"


def matrix_distance(a, b, norm: str = "op") -> np.ndarray:
    """||A - B|| for symmetric matrices, operator norm by default."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if norm == "op":
        return np.max(np.abs(np.linalg.eigvalsh(diff)), axis=-1)
    if norm == "fro":
        return np.linalg.norm(diff, axis=(-2, -1))
    raise ArgumentError(f"Unknown matrix norm: {norm!r}")


def varifold_metric(p, q, norm: str = "op") -> float:
    """|x - y| + ||A - B|| between two points (x, A), (y, B) of R^n x Sym(n)."""
    (x, a), (y, b) = p, q
    spatial = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))
    return spatial + float(matrix_distance(a, b, norm))


@dataclass
class MetricSpaceView:
    """Merged support of two discrete objects with its pairwise distances."""

    points: np.ndarray
    matrices: Optional[np.ndarray] = None
    matrix_norm: str = "op"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.matrices is not None:
            self.matrices = np.asarray(self.matrices, dtype=float)
            if self.matrices.shape[0] != self.points.shape[0]:
                raise ArgumentError("one matrix per point is required")
        if self.matrix_norm not in ("op", "fro"):
            raise ArgumentError(f"Unknown matrix norm: {self.matrix_norm!r}")

    @property
    def kind(self) -> MetricKind:
        return MetricKind.EUCLIDEAN if self.matrices is None else MetricKind.PRODUCT_VARIFOLD

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @classmethod
    def merge(cls, a: Discrete, b: Discrete, matrix_norm: str = "op") -> "MetricSpaceView":
        """Support of ``a`` followed by the support of ``b``."""
        points = np.vstack([a.points, b.points])
        if isinstance(a, DiscreteVarifold):
            return cls(points, np.concatenate([a.matrices, b.matrices]), matrix_norm)
        return cls(points, None, matrix_norm)

    def pair_distances(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """d(rows[k], cols[k]) for paired index arrays."""
        rows, cols = np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp)
        dist = np.linalg.norm(self.points[rows] - self.points[cols], axis=-1)
        if self.matrices is not None:
            dist = dist + matrix_distance(self.matrices[rows], self.matrices[cols], self.matrix_norm)
        return dist

    def distances(self, rows: Optional[Sequence[int]] = None,
                  cols: Optional[Sequence[int]] = None) -> np.ndarray:
        """Dense distance block between the ``rows`` and ``cols`` index sets."""
        rows = np.arange(self.size) if rows is None else np.asarray(rows, dtype=np.intp)
        cols = np.arange(self.size) if cols is None else np.asarray(cols, dtype=np.intp)
        out = np.empty((rows.size, cols.size))
        if not rows.size or not cols.size:
            return out
        step = max(1, _BLOCK_ENTRIES // cols.size)
        for start in range(0, rows.size, step):
            block = rows[start:start + step]
            rr, cc = np.meshgrid(block, cols, indexing="ij")
            out[start:start + block.size] = self.pair_distances(rr.ravel(), cc.ravel()).reshape(rr.shape)
        return out

    def check_triangle(self, rng: np.random.Generator, trials: int = 1000, tol: float = 1e-9) -> bool:
        """Spot-check symmetry, zero diagonal and the triangle inequality on random triples."""
        if not self.size:
            return True
        i, j, k = rng.integers(0, self.size, size=(3, trials))
        dij, djk, dik = self.pair_distances(i, j), self.pair_distances(j, k), self.pair_distances(i, k)
        symmetric = np.allclose(dij, self.pair_distances(j, i), rtol=0, atol=tol)
        zero = np.allclose(self.pair_distances(i, i), 0.0, atol=tol)
        return bool(symmetric and zero and np.all(dik <= dij + djk + tol))


@dataclass(frozen=True)
class Ball:
    """Open ball B(center, radius) in the spatial factor."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(-1)
        if not self.radius > 0:
            raise ArgumentError("ball radius must be positive")
        object.__setattr__(self, "center", center)

    @classmethod
    def parse(cls, spec: str) -> "Ball":
        """Parse ``"c1,...,cn,R"``."""
        try:
            values = [float(v) for v in spec.split(",") if v.strip()]
        except ValueError as e:
            raise ArgumentError(f"Malformed ball {spec!r}") from e
        if len(values) < 2:
            raise ArgumentError(f"ball needs a center and a radius, got {spec!r}")
        return cls(np.array(values[:-1]), values[-1])

    def margin(self, points) -> np.ndarray:
        """min(1, dist(p, complement of B)) per point."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.center.size:
            raise ArgumentError("ball and points live in different dimensions")
        inner = self.radius - np.linalg.norm(points - self.center, axis=-1)
        return np.clip(inner, 0.0, 1.0)

    def __str__(self) -> str:
        return ",".join(f"{v:g}" for v in (*self.center, self.radius))


@dataclass
class FlatMetricProblem:
    measure_a: Discrete
    measure_b: Discrete
    space: Optional[MetricSpaceView] = None
    localization: Optional[Ball] = None
    matrix_norm: str = "op"

    def __post_init__(self):
        if type(self.measure_a) is not type(self.measure_b):
            raise ArgumentError("cannot compare a measure with a varifold")
        if self.measure_a.ambient_dim != self.measure_b.ambient_dim:
            raise ArgumentError("measures live in different ambient dimensions")
        if self.space is None:
            self.space = MetricSpaceView.merge(self.measure_a, self.measure_b, self.matrix_norm)
        if self.space.size != self.size:
            raise ArgumentError("metric view does not match the merged support")

    @property
    def size(self) -> int:
        return self.measure_a.size + self.measure_b.size

    @property
    def charges(self) -> np.ndarray:
        """Weights of a minus weights of b on the merged support."""
        return np.concatenate([self.measure_a.weights, -self.measure_b.weights])

    def margins(self) -> np.ndarray:
        if self.localization is None:
            return np.ones(self.size)
        return self.localization.margin(self.space.points)

    def localized(self, ball: Optional[Ball]) -> "FlatMetricProblem":
        return FlatMetricProblem(self.measure_a, self.measure_b, None, ball, self.matrix_norm)


@dataclass
class FlatNormResult:
    value: float
    witness: Optional[np.ndarray] = None
    plan: Optional[np.ndarray] = None
    exact: bool = True
    support_size: int = 0
    info: Dict[str, float] = field(default_factory=dict)


def coarsen(obj: Discrete, grid_h: float) -> Discrete:
    """Merge atoms sharing a grid cell of diameter ``grid_h``.

    Merged atoms sit at the weighted centroid of their cell, so no atom moves
    by more than ``grid_h``. Matrices are weight-averaged and, for projector
    varifolds, snapped back to rank-d projectors.

    Sending each atom to its merged cell bounds the change of beta. For
    measures it is at most ``grid_h`` times the total mass. For varifolds each
    atom (p_i, A_i, w_i) also pays its matrix move, so the change is at most
    ``grid_h * mass + sum_i w_i ||A_i - A_cell(i)||``, where ``A_cell`` is the
    merged matrix after snapping; the snap itself adds at most
    ``||A_bar - snap(A_bar)||`` per unit of cell mass to the plain average.
    """
    if not grid_h > 0:
        raise ArgumentError("grid_h must be positive")
    if not obj.size:
        return obj
    n = obj.ambient_dim
    keys = np.floor(obj.points / (grid_h / np.sqrt(n))).astype(np.int64)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    cells = int(inverse.max()) + 1
    mass = np.bincount(inverse, weights=obj.weights, minlength=cells)
    counts = np.bincount(inverse, minlength=cells)
    # zero-mass cells fall back to unweighted averages
    factor = np.where(mass[inverse] > 0, obj.weights, 1.0)
    norm = np.bincount(inverse, weights=factor, minlength=cells)

    def average(values: np.ndarray) -> np.ndarray:
        flat = values.reshape(obj.size, -1) * factor[:, None]
        sums = np.stack([np.bincount(inverse, weights=flat[:, k], minlength=cells)
                         for k in range(flat.shape[1])], axis=1)
        return (sums / norm[:, None]).reshape((cells,) + values.shape[1:])

    points = average(obj.points)
    logger.debug("coarsened %d atoms into %d cells (h=%.4g, max merge %d)",
                 obj.size, cells, grid_h, int(counts.max()))
    if isinstance(obj, DiscreteMeasure):
        return DiscreteMeasure(points, mass)
    matrices = average(obj.matrices)
    matrices = (matrices + np.swapaxes(matrices, 1, 2)) / 2
    if obj.is_projector:
        try:
            matrices = snap_to_projector(matrices, obj.d)
        except DegenerateGapError:
            logger.warning("degenerate merged tangent while coarsening; using top-%d truncation", obj.d)
            matrices = projector_truncate(matrices, obj.d)
    return DiscreteVarifold(points, mass, matrices, obj.is_projector, obj.d)


def _ground_costs(problem: FlatMetricProblem, rho: np.ndarray) -> np.ndarray:
    """Cost matrix between (a atoms + g) and (b atoms + g)."""
    m_a, m_b = problem.measure_a.size, problem.measure_b.size
    rows, cols = np.arange(m_a), np.arange(m_a, m_a + m_b)
    costs = np.zeros((m_a + 1, m_b + 1))
    costs[:m_a, :m_b] = np.minimum(problem.space.distances(rows, cols),
                                   rho[rows][:, None] + rho[cols][None, :])
    costs[:m_a, m_b] = rho[rows]
    costs[m_a, :m_b] = rho[cols]
    return costs


def _potential_witness(problem: FlatMetricProblem, rho: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Clamped c-transform of the sink potentials, shifted to vanish at g."""
    m_a, m_b = problem.measure_a.size, problem.measure_b.size
    cols = np.arange(m_a, m_a + m_b)
    every = np.arange(m_a + m_b)
    to_b = np.minimum(problem.space.distances(every, cols), rho[:, None] + rho[cols][None, :])
    f = np.min(np.concatenate([to_b - v[None, :m_b], (rho - v[m_b])[:, None]], axis=1), axis=1)
    f_ground = min(np.min(rho[cols] - v[:m_b]) if m_b else np.inf, -v[m_b])
    return np.clip(f - f_ground, -rho, rho)


def _solve_exact(problem: FlatMetricProblem, rho: np.ndarray, settings: Dict[str, float],
                 witness: bool) -> FlatNormResult:
    wa, wb = problem.measure_a.weights, problem.measure_b.weights
    mu = np.append(wa, wb.sum())
    nu = np.append(wb, wa.sum())
    costs = _ground_costs(problem, rho)
    plan, log = ot.emd(mu, nu, costs, numItermax=int(settings['num_iter_max']), log=True)
    if log.get('result_code', 1) != 1:
        raise FlowSolverError(f"network simplex stopped: {log.get('warning')}")
    value = max(float(log['cost']), 0.0)
    f = _potential_witness(problem, rho, np.asarray(log['v'])) if witness else None
    return FlatNormResult(value, f, plan, True, problem.size)


def _solve_sparse(problem: FlatMetricProblem, rho: np.ndarray,
                  settings: Dict[str, float]) -> FlatNormResult:
    """Integer min-cost flow restricted to k-nearest cross arcs plus ground arcs."""
    m_a, m_b = problem.measure_a.size, problem.measure_b.size
    k = int(min(settings['knn'], m_b))
    ground = m_a + m_b
    tails, heads = [np.arange(m_a), np.full(m_b, ground)], [np.full(m_a, ground), np.arange(m_a, ground)]
    costs = [rho[:m_a], rho[m_a:]]
    if k and m_a:
        candidates = min(2 * k, m_b)
        _, nearest = cKDTree(problem.measure_b.points).query(problem.measure_a.points, k=candidates)
        nearest = nearest.reshape(m_a, candidates)
        rows = np.repeat(np.arange(m_a), candidates)
        cols = nearest.ravel() + m_a
        dist = np.minimum(problem.space.pair_distances(rows, cols), rho[rows] + rho[cols])
        keep = np.argsort(dist.reshape(m_a, candidates), axis=1)[:, :k]
        picked = (keep + np.arange(m_a)[:, None] * candidates).ravel()
        tails.append(rows[picked])
        heads.append(cols[picked])
        costs.append(dist[picked])
    tails, heads, costs = np.concatenate(tails), np.concatenate(heads), np.concatenate(costs)

    mass_scale, cost_scale = settings['mass_scale'], settings['cost_scale']
    supply_a = np.rint(problem.measure_a.weights * mass_scale).astype(np.int64)
    demand_b = np.rint(problem.measure_b.weights * mass_scale).astype(np.int64)
    supplies = np.concatenate([supply_a, -demand_b, [demand_b.sum() - supply_a.sum()]])
    capacity = max(int(supply_a.sum() + demand_b.sum()), 1)

    solver = min_cost_flow.SimpleMinCostFlow()
    solver.add_arcs_with_capacity_and_unit_cost(
        tails.astype(np.int64), heads.astype(np.int64), np.full(tails.size, capacity, dtype=np.int64),
        np.rint(costs * cost_scale).astype(np.int64))
    solver.set_nodes_supplies(np.arange(ground + 1, dtype=np.int64), supplies)
    status = solver.solve()
    if status != solver.OPTIMAL:
        raise FlowSolverError(f"min-cost flow returned status {status}")
    value = solver.optimal_cost() / (mass_scale * cost_scale)
    logger.warning("sparsified flat-norm solve on %d points (k=%d); value is an upper bound", problem.size, k)
    return FlatNormResult(value, None, None, False, problem.size, {'arcs': float(tails.size)})


def flat_norm(problem: FlatMetricProblem, settings: Optional[Dict[str, float]] = None,
              method: str = "auto", coarsen_h: Optional[float] = None,
              witness: bool = False) -> FlatNormResult:
    """Solve the (localized) bounded-Lipschitz problem.

    Args:
        problem: Pair of measures or varifolds, optionally with a localization ball
        settings: Solver settings, defaults to ``config.solver_settings``
        method: ``exact`` (network simplex on all arcs), ``sparse`` (k-NN integer
            flow) or ``auto`` (exact up to the exactness threshold)
        coarsen_h: Grid diameter used to coarsen both inputs when over the size cap
        witness: Also return the optimal test function on the merged support

    Raises:
        ProblemTooLargeError: If the merged support exceeds the cap and coarsening is off
        FlowSolverError: If the backend does not reach optimality
    """
    settings = dict(solver_settings if settings is None else settings)
    validate_solver_settings(settings)
    if method not in ("auto", "exact", "sparse"):
        raise ArgumentError(f"Unknown flat-norm method: {method!r}")

    if problem.size > settings['size_cap']:
        if coarsen_h is None:
            raise ProblemTooLargeError(
                f"merged support has {problem.size} points, cap is {int(settings['size_cap'])}")
        coarse = FlatMetricProblem(coarsen(problem.measure_a, coarsen_h), coarsen(problem.measure_b, coarsen_h),
                                   None, problem.localization, problem.matrix_norm)
        logger.info("coarsened flat-norm problem from %d to %d points", problem.size, coarse.size)
        if coarse.size > settings['size_cap']:
            raise ProblemTooLargeError(
                f"coarsened support still has {coarse.size} points, cap is {int(settings['size_cap'])}")
        problem = coarse

    wa, wb = problem.measure_a.weights, problem.measure_b.weights
    if not problem.size or (not np.any(wa > 0) and not np.any(wb > 0)):
        return FlatNormResult(0.0, np.zeros(problem.size), None, True, problem.size)

    rho = problem.margins()
    if method == "sparse" or (method == "auto" and problem.size > settings['exact_threshold']):
        return _solve_sparse(problem, rho, settings)
    return _solve_exact(problem, rho, settings, witness)


def bl_distance(problem: FlatMetricProblem, **kwargs) -> float:
    """beta(a, b) = sup { int f d(a - b) : ||f||_inf <= 1, Lip f <= 1 }."""
    if problem.localization is not None:
        problem = problem.localized(None)
    return flat_norm(problem, **kwargs).value


def bl_distance_localized(problem: FlatMetricProblem, ball: Optional[Ball] = None, **kwargs) -> float:
    """beta_B: test functions additionally bounded by dist(., complement of B)."""
    ball = ball or problem.localization
    if ball is None:
        raise ArgumentError("localized distance needs a ball")
    if ball is not problem.localization:
        problem = problem.localized(ball)
    return flat_norm(problem, **kwargs).value


def lp_oracle(problem: FlatMetricProblem) -> float:
    """Primal LP over all pairwise Lipschitz constraints; for small test instances.

    Raises:
        OracleTooLargeError: If the merged support has more than 15 points
    """
    m = problem.size
    if m > MAX_ORACLE_POINTS:
        raise OracleTooLargeError(f"LP oracle accepts at most {MAX_ORACLE_POINTS} points, got {m}")
    if not m:
        return 0.0
    rho = problem.margins()
    dist = problem.space.distances()
    i, j = np.triu_indices(m, k=1)
    rows = np.zeros((2 * i.size, m))
    rows[np.arange(i.size), i], rows[np.arange(i.size), j] = 1.0, -1.0
    rows[i.size + np.arange(i.size), i], rows[i.size + np.arange(i.size), j] = -1.0, 1.0
    result = linprog(-problem.charges, A_ub=rows if i.size else None,
                     b_ub=np.concatenate([dist[i, j], dist[i, j]]) if i.size else None,
                     bounds=list(zip(-rho, rho)), method="highs")
    if not result.success:
        raise FlowSolverError(f"LP oracle failed: {result.message}")
    return max(-float(result.fun), 0.0)
