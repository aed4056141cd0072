"""Seeded i.i.d. sampling from theta H^d|S, sample splitting and range queries."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from .constants import MAX_REJECTION_FACTOR
from .errors import ArgumentError, SamplerError
from .geometry import ShapeModel, UniformDensity
from .measures import DiscreteMeasure
from .utils import as_points

logger = logging.getLogger(__name__)

KDTREE_MAX_DIM = 8


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator for child ``stream`` of the root ``seed``."""
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ArgumentError("seed must be a nonnegative integer")
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True)
class SampleBatch:
    points: np.ndarray
    seed: int
    shape_id: str
    stream: int = 0

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def as_measure(self) -> DiscreteMeasure:
        """Empirical measure mu_N with atoms of mass 1/N."""
        if not self.size:
            return DiscreteMeasure.empty(self.points.shape[1])
        return DiscreteMeasure(self.points, np.full(self.size, 1.0 / self.size))

    def __repr__(self) -> str:
        return f"SampleBatch(size={self.size}, shape={self.shape_id!r}, seed={self.seed}, stream={self.stream})"


@dataclass(frozen=True)
class SplitSample:
    """Four independent parts playing the roles X, Y, Y~ and Z."""

    x: SampleBatch
    y: SampleBatch
    y_tilde: SampleBatch
    z: SampleBatch

    def __post_init__(self):
        sizes = {part.size for part in self.parts}
        if len(sizes) != 1:
            raise ArgumentError(f"split parts must have equal sizes, got {sorted(sizes)}")

    @property
    def parts(self) -> Tuple[SampleBatch, SampleBatch, SampleBatch, SampleBatch]:
        return self.x, self.y, self.y_tilde, self.z

    @property
    def size(self) -> int:
        return self.x.size


def sample(shape: ShapeModel, N: int, seed: int, stream: int = 0) -> SampleBatch:
    """Draw N i.i.d. points from mu = theta H^d|S.

    Uniform densities use the shape's direct sampler; other densities reject
    against theta_max.

    Raises:
        ArgumentError: If N < 1
        SamplerError: If the rejection loop exceeds 1e6 * N proposals
    """
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ArgumentError("N must be a positive integer")
    rng = make_generator(seed, stream)
    shape_id = repr(shape)
    if isinstance(shape.density, UniformDensity):
        return SampleBatch(shape.draw_uniform(rng, int(N)), int(seed), shape_id, stream)

    theta_max = shape.theta_bounds[1]
    accepted: List[np.ndarray] = []
    count, proposals = 0, 0
    limit = MAX_REJECTION_FACTOR * int(N)
    while count < N:
        batch = 2 * (N - count) + 16
        candidates = shape.draw_uniform(rng, batch)
        keep = rng.random(batch) * theta_max < shape.density_at(candidates)
        accepted.append(candidates[keep])
        count += int(np.sum(keep))
        proposals += batch
        if count < N and proposals > limit:
            raise SamplerError(
                f"rejection sampler exceeded {limit} proposals on {shape_id}; is theta_max right?")
    points = np.vstack(accepted)[:N]
    logger.debug("sampled %d points from %s with %d proposals", N, shape_id, proposals)
    return SampleBatch(points, int(seed), shape_id, stream)


def sample_split(shape: ShapeModel, N: int, seed: int) -> SplitSample:
    """Four parts of size N drawn from the disjoint streams 1..4 of ``seed``."""
    return SplitSample(*(sample(shape, N, seed, stream) for stream in range(1, 5)))


def split(batch: SampleBatch) -> SplitSample:
    """Partition a batch of size 4N by index modulo 4.

    Raises:
        ArgumentError: If the batch size is not divisible by 4
    """
    if batch.size == 0 or batch.size % 4:
        raise ArgumentError(f"batch size must be a positive multiple of 4, got {batch.size}")
    parts = [SampleBatch(batch.points[k::4], batch.seed, batch.shape_id, batch.stream)
             for k in range(4)]
    return SplitSample(*parts)


class SpatialIndex:
    """Open-ball range queries over a fixed point set.

    Uses a kd-tree for n <= 8 and brute force otherwise; both return the
    exact set {i : |p_i - x| < r}.
    """

    def __init__(self, points):
        self.points = as_points(points) if np.size(points) else np.empty((0, np.shape(points)[-1]))
        n = self.points.shape[1]
        self._tree = cKDTree(self.points) if self.points.shape[0] and n <= KDTREE_MAX_DIM else None

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def range_query(self, x, r: float) -> np.ndarray:
        """Sorted indices of points strictly inside B(x, r)."""
        if r <= 0:
            raise ArgumentError("r must be positive")
        _, cols, _ = self.pairs_within(as_points(x, self.points.shape[1]), r)
        return np.sort(cols)

    def pairs_within(self, queries: np.ndarray, r: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All (query index, point index, distance) with distance < r."""
        if r <= 0:
            raise ArgumentError("r must be positive")
        queries = as_points(queries, self.points.shape[1])
        if not self.size or not queries.shape[0]:
            empty = np.empty(0, dtype=np.intp)
            return empty, empty, np.empty(0)
        if self._tree is not None:
            hits = self._tree.query_ball_point(queries, r)
            counts = np.fromiter((len(h) for h in hits), dtype=np.intp, count=len(hits))
            rows = np.repeat(np.arange(queries.shape[0]), counts)
            cols = np.fromiter((i for h in hits for i in h), dtype=np.intp, count=int(counts.sum()))
        else:
            rows_list, cols_list = [], []
            for start in range(0, queries.shape[0], 256):
                block = queries[start:start + 256]
                dist = np.linalg.norm(block[:, None, :] - self.points[None], axis=2)
                qi, pi = np.nonzero(dist < r)
                rows_list.append(qi + start)
                cols_list.append(pi)
            rows, cols = np.concatenate(rows_list), np.concatenate(cols_list)
        dist = np.linalg.norm(queries[rows] - self.points[cols], axis=1)
        strict = dist < r
        return rows[strict], cols[strict], dist[strict]


def save_points_csv(batch: SampleBatch, path: Union[str, Path]) -> Path:
    path = Path(path)
    n = batch.points.shape[1]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, batch.points, delimiter=",", fmt="%.17g",
                   header=",".join(f"x{i + 1}" for i in range(n)), comments="")
    except OSError as e:
        raise OSError(f"Cannot write samples to {path}: {e}") from e
    return path


def load_points_csv(path: Union[str, Path], seed: int = 0, shape_id: Optional[str] = None) -> SampleBatch:
    path = Path(path)
    try:
        points = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as e:
        raise OSError(f"Cannot read samples from {path}: {e}") from e
    except ValueError as e:
        raise ValueError(f"Malformed sample file {path}: {e}") from e
    return SampleBatch(points, seed, shape_id or str(path))
