"""Discrete measures and point-cloud varifolds, with their CSV format.

CSV layout: columns ``x1..xn, weight`` followed, for varifolds, by the
n*n matrix entries ``m11, m12, ..., mnn`` in row-major order.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .constants import PROJECTOR_TOL, SYMMETRY_TOL
from .errors import ArgumentError


@dataclass(frozen=True)
class DiscreteMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if points.ndim != 2:
            raise ArgumentError(f"points must be an (m, n) array, got shape {points.shape}")
        if points.shape[0] != weights.shape[0]:
            raise ArgumentError("points and weights must have equal lengths")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ArgumentError("weights must be finite and nonnegative")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @classmethod
    def empty(cls, n: int) -> "DiscreteMeasure":
        return cls(np.empty((0, n)), np.empty(0))

    def __repr__(self) -> str:
        return f"DiscreteMeasure(size={self.size}, n={self.ambient_dim}, mass={self.total_mass:.6g})"


@dataclass(frozen=True)
class DiscreteVarifold:
    """Weighted points carrying symmetric PSD n x n matrices.

    With ``is_projector`` set, every matrix is a rank-``d`` orthogonal projector.
    """

    points: np.ndarray
    weights: np.ndarray
    matrices: np.ndarray
    is_projector: bool = False
    d: Optional[int] = None

    def __post_init__(self):
        base = DiscreteMeasure(self.points, self.weights)
        matrices = np.asarray(self.matrices, dtype=float)
        n = base.ambient_dim
        if matrices.shape != (base.size, n, n):
            raise ArgumentError(f"matrices must have shape {(base.size, n, n)}, got {matrices.shape}")
        if base.size and np.max(np.abs(matrices - np.swapaxes(matrices, 1, 2))) > SYMMETRY_TOL:
            raise ArgumentError("varifold matrices must be symmetric")
        if self.is_projector and self.d is None:
            raise ArgumentError("projector varifolds must declare their rank d")
        object.__setattr__(self, "points", base.points)
        object.__setattr__(self, "weights", base.weights)
        object.__setattr__(self, "matrices", matrices)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def as_measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.points, self.weights)

    def check_projectors(self, tol: float = PROJECTOR_TOL) -> bool:
        """True when every matrix satisfies P^2 = P and trace P = d."""
        if self.d is None:
            return False
        if not self.size:
            return True
        squared = np.einsum("mij,mjk->mik", self.matrices, self.matrices)
        traces = np.trace(self.matrices, axis1=1, axis2=2)
        return bool(np.max(np.abs(squared - self.matrices)) <= tol
                    and np.max(np.abs(traces - self.d)) <= tol)

    @classmethod
    def empty(cls, n: int, is_projector: bool = False, d: Optional[int] = None) -> "DiscreteVarifold":
        return cls(np.empty((0, n)), np.empty(0), np.empty((0, n, n)), is_projector, d)

    def __repr__(self) -> str:
        return (f"DiscreteVarifold(size={self.size}, n={self.ambient_dim}, "
                f"mass={self.total_mass:.6g}, projector={self.is_projector})")


Discrete = Union[DiscreteMeasure, DiscreteVarifold]


def _header(n: int, with_matrices: bool) -> str:
    cols = [f"x{i + 1}" for i in range(n)] + ["weight"]
    if with_matrices:
        cols += [f"m{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return ",".join(cols)


def save_csv(obj: Discrete, path: Union[str, Path]) -> Path:
    """Write a measure or varifold in the row-per-atom CSV layout."""
    path = Path(path)
    n = obj.ambient_dim
    columns = [obj.points, obj.weights[:, None]]
    with_matrices = isinstance(obj, DiscreteVarifold)
    if with_matrices:
        columns.append(obj.matrices.reshape(obj.size, n * n))
    table = np.hstack(columns) if obj.size else np.empty((0, n + 1 + (n * n if with_matrices else 0)))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, table, delimiter=",", fmt="%.17g",
                   header=_header(n, with_matrices), comments="")
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e}") from e
    return path


def load_csv(path: Union[str, Path], is_projector: bool = False,
             d: Optional[int] = None) -> Discrete:
    """Read a CSV written by :func:`save_csv`; the header decides measure vs varifold."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            header = handle.readline().strip().split(",")
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as e:
        raise OSError(f"Cannot read {path}: {e}") from e
    except ValueError as e:
        raise ValueError(f"Malformed CSV {path}: {e}") from e
    if "weight" not in header:
        raise ValueError(f"CSV {path} lacks a weight column")
    n = header.index("weight")
    width = len(header)
    if table.size == 0:
        table = np.empty((0, width))
    if width == n + 1:
        return DiscreteMeasure(table[:, :n], table[:, n])
    if width != n + 1 + n * n:
        raise ValueError(f"CSV {path} has {width} columns, expected {n + 1} or {n + 1 + n * n}")
    matrices = table[:, n + 1:].reshape(-1, n, n)
    return DiscreteVarifold(table[:, :n], table[:, n], matrices, is_projector, d)
