"""Ground-truth shapes with density, tangent, singular-set and quadrature oracles.

Every shape is an analytically tractable rectifiable set S of dimension d in
R^n carrying a probability density theta with respect to H^d restricted to S.
Curves are built from arc-length parametrised pieces; the sphere and the flat
disk are handled directly.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from .constants import SINGULAR_TOL
from .errors import ArgumentError, SingularPointError
from .measures import DiscreteMeasure, DiscreteVarifold
from .utils import as_points, normalize_shape_name, parse_named_spec

logger = logging.getLogger(__name__)

AHLFORS_SLACK = 1.5


class GeometryKind(Enum):
    CIRCLE = "circle"
    SPHERE = "sphere"
    SEGMENT = "segment"
    STADIUM = "stadium"
    SQUARE_BOUNDARY = "square_boundary"
    CROSS_SEGMENTS = "cross_segments"
    DISK_WITH_BOUNDARY = "disk_with_boundary"
    HOLDER_GRAPH = "holder_graph"


@dataclass(frozen=True)
class SingularStratum:
    dim: int
    mass: float


@dataclass(frozen=True)
class Regularity:
    a: float
    b: float
    ahlfors_C0: float
    theta_min: float
    theta_max: float
    singular_strata: Tuple[SingularStratum, ...]


def _outer(vectors: np.ndarray) -> np.ndarray:
    return np.einsum("mi,mj->mij", vectors, vectors)


def _cells(total: float, h: float) -> int:
    return max(1, math.ceil(total / h - 1e-9))


# ---------------------------------------------------------------------------
# densities


class DensityModel(ABC):
    """Unnormalised density on a shape; the shape divides by its integral."""

    name: str = "density"
    b: float = 1.0
    has_jump: bool = False

    @abstractmethod
    def raw(self, shape: "ShapeModel", points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def raw_bounds(self) -> Tuple[float, float]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}()"


class UniformDensity(DensityModel):
    name = "uniform"

    def raw(self, shape, points):
        return np.ones(points.shape[0])

    def raw_bounds(self):
        return 1.0, 1.0


class TiltDensity(DensityModel):
    """2 + (x1 - c1) / rho: smooth, so b = 1."""

    name = "tilt"

    def raw(self, shape, points):
        return 2.0 + (points[:, 0] - shape.center[0]) / shape.circumradius

    def raw_bounds(self):
        return 1.0, 3.0


class HolderDensity(DensityModel):
    """1 + (|x - x0| / rho)^b around an anchor point x0 on the shape."""

    name = "holder"

    def __init__(self, b: float = 0.5):
        if not 0 < b <= 1:
            raise ArgumentError("Hölder density exponent b must lie in (0, 1]")
        self.b = float(b)

    def raw(self, shape, points):
        dist = np.linalg.norm(points - shape.anchor_point, axis=1) / shape.circumradius
        return 1.0 + dist ** self.b

    def raw_bounds(self):
        return 1.0, 1.0 + 2.0 ** self.b

    def __repr__(self) -> str:
        return f"HolderDensity(b={self.b})"


class JumpDensity(DensityModel):
    """1 on {x1 < c1}, 2 on {x1 >= c1}; the jump locus joins the singular set."""

    name = "jump"
    has_jump = True

    def raw(self, shape, points):
        return np.where(points[:, 0] < shape.center[0], 1.0, 2.0)

    def raw_bounds(self):
        return 1.0, 2.0


def density_by_name(spec: str) -> DensityModel:
    name, params = parse_named_spec(spec or "uniform")
    if name == "uniform":
        return UniformDensity()
    if name == "tilt":
        return TiltDensity()
    if name == "holder":
        return HolderDensity(params.get("b", 0.5))
    if name == "jump":
        return JumpDensity()
    raise ValueError(f"Unknown density model: {spec!r}")


# ---------------------------------------------------------------------------
# shape base


class ShapeModel(ABC):
    """A d-dimensional shape in R^n with a density of the regularity class."""

    kind: GeometryKind
    ambient_dim: int
    intrinsic_dim: int
    a: float = 1.0

    def __init__(self, density: Optional[DensityModel] = None):
        self.density = density or UniformDensity()

    # -- geometry, provided by subclasses --------------------------------

    @property
    @abstractmethod
    def hausdorff_measure(self) -> float:
        """H^d(S)."""

    @property
    @abstractmethod
    def diameter(self) -> float:
        raise NotImplementedError

    @property
    @abstractmethod
    def center(self) -> np.ndarray:
        raise NotImplementedError

    @property
    @abstractmethod
    def anchor_point(self) -> np.ndarray:
        raise NotImplementedError

    @property
    @abstractmethod
    def ahlfors_bounds(self) -> Tuple[float, float]:
        """(k_low, k_up) with k_low r^d <= H^d(S ∩ B(x, r)) <= k_up r^d for r <= diam."""

    @abstractmethod
    def draw_uniform(self, rng: np.random.Generator, m: int) -> np.ndarray:
        """m points distributed according to H^d|S normalised."""

    @abstractmethod
    def tangent_projectors(self, points: np.ndarray) -> np.ndarray:
        """Tangent projectors at points of S, without singularity checks."""

    @abstractmethod
    def geometric_singular_distance(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def geometric_strata(self) -> Tuple[SingularStratum, ...]:
        raise NotImplementedError

    @abstractmethod
    def quadrature_cells(self, h: float) -> Tuple[np.ndarray, np.ndarray]:
        """Cell representatives on S and exact cell measures, cell diameter <= h."""

    def jump_distance(self, points: np.ndarray) -> np.ndarray:
        raise ArgumentError(f"{self.kind.value} does not support a density jump")

    def jump_strata(self) -> Tuple[SingularStratum, ...]:
        raise ArgumentError(f"{self.kind.value} does not support a density jump")

    @property
    def normalization_resolution(self) -> float:
        return self.hausdorff_measure / 200_000

    # -- derived oracles ---------------------------------------------------

    @cached_property
    def circumradius(self) -> float:
        pts, _ = self.quadrature_cells(self.diameter / 200)
        return float(np.max(np.linalg.norm(pts - self.center, axis=1)))

    @cached_property
    def normalizer(self) -> float:
        """Integral of the raw density against H^d|S."""
        if isinstance(self.density, UniformDensity):
            return self.hausdorff_measure
        pts, weights = self.quadrature_cells(self.normalization_resolution)
        return float(np.dot(weights, self.density.raw(self, pts)))

    def density_at(self, x) -> np.ndarray:
        """theta at points of S (caller contract: the points lie on S)."""
        single = np.ndim(x) == 1
        pts = as_points(x, self.ambient_dim)
        values = self.density.raw(self, pts) / self.normalizer
        return float(values[0]) if single else values

    @property
    def theta_bounds(self) -> Tuple[float, float]:
        lo, hi = self.density.raw_bounds()
        return lo / self.normalizer, hi / self.normalizer

    @property
    def ahlfors_C0(self) -> float:
        k_low, k_up = self.ahlfors_bounds
        theta_min, theta_max = self.theta_bounds
        return AHLFORS_SLACK * max(1.0, 1.0 / (theta_min * k_low), theta_max * k_up)

    @property
    def regularity(self) -> Regularity:
        theta_min, theta_max = self.theta_bounds
        strata = self.geometric_strata()
        if self.density.has_jump:
            strata = strata + self.jump_strata()
        return Regularity(self.a, self.density.b, self.ahlfors_C0, theta_min, theta_max, strata)

    def singular_distance(self, x) -> np.ndarray:
        """Distance to the union of singular strata, +inf when it is empty."""
        single = np.ndim(x) == 1
        pts = as_points(x, self.ambient_dim)
        dist = self.geometric_singular_distance(pts)
        if self.density.has_jump:
            dist = np.minimum(dist, self.jump_distance(pts))
        return float(dist[0]) if single else dist

    def tangent_at(self, x) -> np.ndarray:
        """Rank-d tangent projector at a regular point of S.

        Raises:
            SingularPointError: If x is within 1e-12 of the singular set
        """
        single = np.ndim(x) == 1
        pts = as_points(x, self.ambient_dim)
        if np.any(self.singular_distance(pts) < SINGULAR_TOL):
            raise SingularPointError(f"tangent requested on the singular set of {self.kind.value}")
        projectors = self.tangent_projectors(pts)
        return projectors[0] if single else projectors

    def quadrature_varifold(self, h: float) -> DiscreteVarifold:
        """Quadrature of H^d|S tensor delta_{tangent}, cells of diameter <= h.

        Raises:
            ArgumentError: If h > diam(S)/10
        """
        if not h > 0 or h > self.diameter / 10:
            raise ArgumentError(f"h must lie in (0, diam/10 = {self.diameter / 10:.6g}], got {h}")
        points, weights = self.quadrature_cells(h)
        matrices = self.tangent_projectors(points)
        return DiscreteVarifold(points, weights, matrices, is_projector=True, d=self.intrinsic_dim)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(density={self.density!r})"


# ---------------------------------------------------------------------------
# curves


class _Piece(ABC):
    length: float

    @abstractmethod
    def point_at(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def tangent_vectors(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def distance(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class LinePiece(_Piece):
    def __init__(self, start: Sequence[float], end: Sequence[float]):
        self.start = np.asarray(start, dtype=float)
        self.end = np.asarray(end, dtype=float)
        self.length = float(np.linalg.norm(self.end - self.start))
        self.direction = (self.end - self.start) / self.length

    def point_at(self, s):
        return self.start + np.asarray(s)[:, None] * self.direction

    def tangent_vectors(self, points):
        return np.broadcast_to(self.direction, points.shape).copy()

    def distance(self, points):
        t = np.clip((points - self.start) @ self.direction, 0.0, self.length)
        return np.linalg.norm(points - self.start - t[:, None] * self.direction, axis=1)


class ArcPiece(_Piece):
    """Counter-clockwise arc of a circle from angle ``a0`` to ``a1``."""

    def __init__(self, center: Sequence[float], radius: float, a0: float, a1: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.a0, self.a1 = float(a0), float(a1)
        self.length = self.radius * (self.a1 - self.a0)

    def point_at(self, s):
        angle = self.a0 + np.asarray(s) / self.radius
        return self.center + self.radius * np.column_stack([np.cos(angle), np.sin(angle)])

    def tangent_vectors(self, points):
        rel = points - self.center
        angle = np.arctan2(rel[:, 1], rel[:, 0])
        return np.column_stack([-np.sin(angle), np.cos(angle)])

    def distance(self, points):
        rel = points - self.center
        angle = np.mod(np.arctan2(rel[:, 1], rel[:, 0]) - self.a0, 2 * np.pi)
        on_arc = angle <= (self.a1 - self.a0) + 1e-15
        radial = np.abs(np.linalg.norm(rel, axis=1) - self.radius)
        ends = self.point_at(np.array([0.0, self.length]))
        to_ends = np.min(np.linalg.norm(points[:, None, :] - ends[None], axis=2), axis=1)
        return np.where(on_arc, radial, to_ends)


class Curve(ShapeModel):
    ambient_dim = 2
    intrinsic_dim = 1

    def __init__(self, pieces: Sequence[_Piece], singular_points: Sequence[Sequence[float]],
                 density: Optional[DensityModel] = None):
        self.pieces = tuple(pieces)
        self.singular_points = np.asarray(singular_points, dtype=float).reshape(-1, 2)
        lengths = np.array([p.length for p in self.pieces])
        self._starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
        self._length = float(np.sum(lengths))
        super().__init__(density)

    @property
    def hausdorff_measure(self) -> float:
        return self._length

    @cached_property
    def _outline(self) -> np.ndarray:
        return self.point_at(np.linspace(0.0, self._length, 20_001, endpoint=False))

    @property
    def diameter(self) -> float:
        outline = self._outline[::20]
        diffs = outline[:, None, :] - outline[None, :, :]
        return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diffs, diffs))))

    @property
    def center(self) -> np.ndarray:
        lo, hi = self._outline.min(axis=0), self._outline.max(axis=0)
        return (lo + hi) / 2

    @property
    def anchor_point(self) -> np.ndarray:
        return self.point_at(np.array([self._length / 2]))[0]

    @property
    def ahlfors_bounds(self) -> Tuple[float, float]:
        return 1.0, 2.0 * math.pi

    def point_at(self, s) -> np.ndarray:
        """Arc-length parametrisation over [0, H^1(S))."""
        s = np.asarray(s, dtype=float)
        idx = np.clip(np.searchsorted(self._starts, s, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty((s.shape[0], 2))
        for k, piece in enumerate(self.pieces):
            mask = idx == k
            if np.any(mask):
                out[mask] = piece.point_at(s[mask] - self._starts[k])
        return out

    def draw_uniform(self, rng, m):
        return self.point_at(rng.random(m) * self._length)

    def _nearest_piece(self, points: np.ndarray) -> np.ndarray:
        dist = np.stack([p.distance(points) for p in self.pieces])
        return np.argmin(dist, axis=0)

    def tangent_projectors(self, points):
        points = as_points(points, 2)
        idx = self._nearest_piece(points)
        vectors = np.empty_like(points)
        for k, piece in enumerate(self.pieces):
            mask = idx == k
            if np.any(mask):
                vectors[mask] = piece.tangent_vectors(points[mask])
        return _outer(vectors)

    def geometric_singular_distance(self, points):
        if not self.singular_points.size:
            return np.full(points.shape[0], np.inf)
        diffs = points[:, None, :] - self.singular_points[None, :, :]
        return np.min(np.linalg.norm(diffs, axis=2), axis=1)

    def geometric_strata(self):
        if not self.singular_points.size:
            return ()
        return (SingularStratum(0, float(self.singular_points.shape[0])),)

    def quadrature_cells(self, h):
        points, weights = [], []
        for piece in self.pieces:
            m = _cells(piece.length, h)
            step = piece.length / m
            points.append(piece.point_at((np.arange(m) + 0.5) * step))
            weights.append(np.full(m, step))
        return np.vstack(points), np.concatenate(weights)

    @cached_property
    def jump_locus(self) -> np.ndarray:
        """Points of S on the hyperplane x1 = c1 (finite for transversal curves)."""
        c1 = self.center[0]
        found = []
        for piece in self.pieces:
            grid = np.linspace(0.0, piece.length, 4097)
            g = piece.point_at(grid)[:, 0] - c1
            if np.max(np.abs(g)) < 1e-12:
                raise ArgumentError(f"{self.kind.value} has a piece inside the jump hyperplane")
            for i in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0):
                if g[i] == 0:
                    root = grid[i]
                elif g[i + 1] == 0:
                    root = grid[i + 1]
                else:
                    root = optimize.brentq(
                        lambda s, p=piece: p.point_at(np.array([s]))[0, 0] - c1,
                        grid[i], grid[i + 1], xtol=1e-14)
                found.append(piece.point_at(np.array([root]))[0])
        if not found:
            return np.empty((0, 2))
        return np.unique(np.round(np.array(found), 12), axis=0)

    def jump_distance(self, points):
        locus = self.jump_locus
        if not locus.size:
            return np.full(points.shape[0], np.inf)
        return np.min(np.linalg.norm(points[:, None, :] - locus[None], axis=2), axis=1)

    def jump_strata(self):
        return (SingularStratum(0, float(self.jump_locus.shape[0])),) if self.jump_locus.size else ()


class Circle(Curve):
    kind = GeometryKind.CIRCLE

    def __init__(self, radius: float = 1.0, density: Optional[DensityModel] = None):
        if radius <= 0:
            raise ArgumentError("radius must be positive")
        self.radius = float(radius)
        super().__init__([ArcPiece((0.0, 0.0), radius, 0.0, 2 * math.pi)], [], density)

    @property
    def diameter(self):
        return 2 * self.radius

    @property
    def center(self):
        return np.zeros(2)

    @property
    def ahlfors_bounds(self):
        return 2.0, math.pi


class Segment(Curve):
    kind = GeometryKind.SEGMENT

    def __init__(self, length: float = 1.0, density: Optional[DensityModel] = None):
        if length <= 0:
            raise ArgumentError("length must be positive")
        self.length = float(length)
        super().__init__([LinePiece((0.0, 0.0), (length, 0.0))],
                         [(0.0, 0.0), (length, 0.0)], density)

    @property
    def diameter(self):
        return self.length

    @property
    def center(self):
        return np.array([self.length / 2, 0.0])

    @property
    def ahlfors_bounds(self):
        return 1.0, 2.0


class Stadium(Curve):
    """Two half-circles of radius ``radius`` glued to two segments of length ``length``."""

    kind = GeometryKind.STADIUM

    def __init__(self, radius: float = 1.0, length: float = 2.0,
                 density: Optional[DensityModel] = None):
        if radius <= 0 or length <= 0:
            raise ArgumentError("radius and length must be positive")
        self.radius, self.length = float(radius), float(length)
        half = length / 2
        pieces = [
            LinePiece((-half, -radius), (half, -radius)),
            ArcPiece((half, 0.0), radius, -math.pi / 2, math.pi / 2),
            LinePiece((half, radius), (-half, radius)),
            ArcPiece((-half, 0.0), radius, math.pi / 2, 3 * math.pi / 2),
        ]
        gluing = [(half, -radius), (half, radius), (-half, radius), (-half, -radius)]
        super().__init__(pieces, gluing, density)

    @property
    def diameter(self):
        return self.length + 2 * self.radius

    @property
    def center(self):
        return np.zeros(2)

    @property
    def ahlfors_bounds(self):
        return 2.0, 2.0 * math.pi


class SquareBoundary(Curve):
    kind = GeometryKind.SQUARE_BOUNDARY

    def __init__(self, side: float = 1.0, density: Optional[DensityModel] = None):
        if side <= 0:
            raise ArgumentError("side must be positive")
        self.side = float(side)
        c = side / 2
        corners = [(-c, -c), (c, -c), (c, c), (-c, c)]
        pieces = [LinePiece(corners[k], corners[(k + 1) % 4]) for k in range(4)]
        super().__init__(pieces, corners, density)

    @property
    def diameter(self):
        return math.sqrt(2) * self.side

    @property
    def center(self):
        return np.zeros(2)

    @property
    def ahlfors_bounds(self):
        return 2.0, 2.0 * math.pi


class CrossSegments(Curve):
    """Union of [-l, l] x {0} and {0} x [-l, l]; crossing and endpoints are singular."""

    kind = GeometryKind.CROSS_SEGMENTS

    def __init__(self, half_length: float = 1.0, density: Optional[DensityModel] = None):
        if half_length <= 0:
            raise ArgumentError("half_length must be positive")
        self.half_length = arm = float(half_length)
        ends = [(arm, 0.0), (0.0, arm), (-arm, 0.0), (0.0, -arm)]
        pieces = [LinePiece((0.0, 0.0), end) for end in ends]
        super().__init__(pieces, [(0.0, 0.0)] + ends, density)

    @property
    def diameter(self):
        return 2 * self.half_length

    @property
    def center(self):
        return np.zeros(2)

    @property
    def ahlfors_bounds(self):
        return 1.0, 4.0


class _GraphPiece(_Piece):
    """Graph of F(x) = sum_{j<J} s^j sin(t^j x) / t^j over [0, 1], by arc length."""

    GRID_SIZE = 2**20 + 1

    def __init__(self, s: float, t: float, terms: int):
        self.s, self.t, self.terms = s, t, terms
        self._grid = np.linspace(0.0, 1.0, self.GRID_SIZE)
        speed = np.sqrt(1.0 + self.slope(self._grid) ** 2)
        self._arclength = integrate.cumulative_trapezoid(speed, self._grid, initial=0.0)
        self.length = float(self._arclength[-1])

    def slope(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for j in range(self.terms):
            out += self.s**j * np.cos(self.t**j * x)
        return out

    def height(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for j in range(self.terms):
            out += self.s**j * np.sin(self.t**j * x) / self.t**j
        return out

    def parameter_at(self, s: np.ndarray) -> np.ndarray:
        return np.interp(s, self._arclength, self._grid)

    def point_at(self, s):
        x = self.parameter_at(np.asarray(s, dtype=float))
        return np.column_stack([x, self.height(x)])

    def tangent_vectors(self, points):
        v = np.column_stack([np.ones(points.shape[0]), self.slope(points[:, 0])])
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    def distance(self, points):
        x = np.clip(points[:, 0], 0.0, 1.0)
        return np.hypot(points[:, 0] - x, points[:, 1] - self.height(x))


class HolderGraph(Curve):
    """Graph of a primitive of a truncated Weierstrass sum, declared C^{1,a}.

    a = -ln s / ln t is declared from (s, t) although the J-term truncation is smooth.
    """

    kind = GeometryKind.HOLDER_GRAPH

    def __init__(self, s: float = 0.3, t: float = 4.0, J: int = 12,
                 density: Optional[DensityModel] = None):
        if not 0 < s < 1 or t <= 1:
            raise ArgumentError("Weierstrass parameters need 0 < s < 1 < t")
        if s * t < 1:
            raise ArgumentError("Weierstrass parameters need s*t >= 1 so that a <= 1")
        if int(J) != J or J < 1:
            raise ArgumentError("J must be a positive integer")
        self.s, self.t, self.J = float(s), float(t), int(J)
        self.a = -math.log(s) / math.log(t)
        piece = _GraphPiece(self.s, self.t, self.J)
        ends = piece.point_at(np.array([0.0, piece.length]))
        super().__init__([piece], ends, density)

    @property
    def ahlfors_bounds(self):
        lip = math.sqrt(1.0 + sum(self.s**j for j in range(self.J)) ** 2)
        return 1.0, 2.0 * lip


# ---------------------------------------------------------------------------
# surfaces


class Sphere(ShapeModel):
    kind = GeometryKind.SPHERE
    ambient_dim = 3
    intrinsic_dim = 2

    def __init__(self, radius: float = 1.0, density: Optional[DensityModel] = None):
        if radius <= 0:
            raise ArgumentError("radius must be positive")
        self.radius = float(radius)
        super().__init__(density)

    @property
    def hausdorff_measure(self):
        return 4 * math.pi * self.radius**2

    @property
    def diameter(self):
        return 2 * self.radius

    @property
    def center(self):
        return np.zeros(3)

    @property
    def anchor_point(self):
        return np.array([0.0, 0.0, self.radius])

    @property
    def ahlfors_bounds(self):
        # a ball of chordal radius r cuts a cap of area exactly pi r^2
        return math.pi, math.pi

    @property
    def normalization_resolution(self):
        return self.radius / 100

    @cached_property
    def circumradius(self):
        return self.radius

    def draw_uniform(self, rng, m):
        g = rng.standard_normal((m, 3))
        return self.radius * g / np.linalg.norm(g, axis=1, keepdims=True)

    def tangent_projectors(self, points):
        points = as_points(points, 3)
        unit = points / np.linalg.norm(points, axis=1, keepdims=True)
        return np.eye(3)[None] - _outer(unit)

    def geometric_singular_distance(self, points):
        return np.full(points.shape[0], np.inf)

    def geometric_strata(self):
        return ()

    def quadrature_cells(self, h):
        R = self.radius
        bands = _cells(math.sqrt(2) * math.pi * R, h)
        edges = np.linspace(0.0, math.pi, bands + 1)
        points, weights = [], []
        for th0, th1 in zip(edges[:-1], edges[1:]):
            z0, z1 = math.cos(th0), math.cos(th1)
            s_max = 1.0 if th0 <= math.pi / 2 <= th1 else max(math.sin(th0), math.sin(th1))
            m = _cells(math.sqrt(2) * 2 * math.pi * R * s_max, h)
            thc = math.acos((z0 + z1) / 2)
            phi = (np.arange(m) + 0.5) * 2 * math.pi / m
            points.append(R * np.column_stack([
                np.full(m, math.sin(thc)) * np.cos(phi),
                np.full(m, math.sin(thc)) * np.sin(phi),
                np.full(m, math.cos(thc)),
            ]))
            weights.append(np.full(m, 2 * math.pi * R**2 * (z0 - z1) / m))
        return np.vstack(points), np.concatenate(weights)

    def jump_distance(self, points):
        q = points.copy()
        q[:, 0] = 0.0
        norm = np.linalg.norm(q, axis=1)
        safe = np.where(norm > 0, norm, 1.0)
        nearest = np.where((norm > 0)[:, None], self.radius * q / safe[:, None],
                           np.array([0.0, self.radius, 0.0]))
        return np.linalg.norm(points - nearest, axis=1)

    def jump_strata(self):
        return (SingularStratum(1, 2 * math.pi * self.radius),)


class DiskWithBoundary(ShapeModel):
    """Flat closed unit disk in the plane x3 = 0 of R^3; its boundary circle is singular."""

    kind = GeometryKind.DISK_WITH_BOUNDARY
    ambient_dim = 3
    intrinsic_dim = 2

    def __init__(self, radius: float = 1.0, density: Optional[DensityModel] = None):
        if radius <= 0:
            raise ArgumentError("radius must be positive")
        self.radius = float(radius)
        super().__init__(density)

    @property
    def hausdorff_measure(self):
        return math.pi * self.radius**2

    @property
    def diameter(self):
        return 2 * self.radius

    @property
    def center(self):
        return np.zeros(3)

    @property
    def anchor_point(self):
        return np.zeros(3)

    @property
    def ahlfors_bounds(self):
        return 0.5, math.pi

    @property
    def normalization_resolution(self):
        return self.radius / 100

    @cached_property
    def circumradius(self):
        return self.radius

    def draw_uniform(self, rng, m):
        r = self.radius * np.sqrt(rng.random(m))
        phi = 2 * math.pi * rng.random(m)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), np.zeros(m)])

    def tangent_projectors(self, points):
        points = as_points(points, 3)
        return np.broadcast_to(np.diag([1.0, 1.0, 0.0]), (points.shape[0], 3, 3)).copy()

    def geometric_singular_distance(self, points):
        planar = np.linalg.norm(points[:, :2], axis=1)
        return np.hypot(planar - self.radius, points[:, 2])

    def geometric_strata(self):
        return (SingularStratum(1, 2 * math.pi * self.radius),)

    def quadrature_cells(self, h):
        R = self.radius
        rings = _cells(math.sqrt(2) * R, h)
        edges = np.linspace(0.0, R, rings + 1)
        points, weights = [], []
        for r0, r1 in zip(edges[:-1], edges[1:]):
            m = _cells(math.sqrt(2) * 2 * math.pi * r1, h)
            rc = math.sqrt((r0**2 + r1**2) / 2)
            phi = (np.arange(m) + 0.5) * 2 * math.pi / m
            points.append(np.column_stack([rc * np.cos(phi), rc * np.sin(phi), np.zeros(m)]))
            weights.append(np.full(m, math.pi * (r1**2 - r0**2) / m))
        return np.vstack(points), np.concatenate(weights)

    def jump_distance(self, points):
        # distance to the diameter {0} x [-R, R] x {0}
        y = np.clip(points[:, 1], -self.radius, self.radius)
        return np.sqrt(points[:, 0] ** 2 + (points[:, 1] - y) ** 2 + points[:, 2] ** 2)

    def jump_strata(self):
        return (SingularStratum(1, 2 * self.radius),)


# ---------------------------------------------------------------------------
# factory and fixtures


_SHAPES = {
    "circle": (Circle, {"radius": "radius"}),
    "sphere": (Sphere, {"radius": "radius"}),
    "segment": (Segment, {"length": "length"}),
    "stadium": (Stadium, {"radius": "radius", "length": "length"}),
    "square_boundary": (SquareBoundary, {"side": "side"}),
    "cross_segments": (CrossSegments, {"half_length": "half_length", "length": "half_length"}),
    "disk_with_boundary": (DiskWithBoundary, {"radius": "radius"}),
    "holder_graph": (HolderGraph, {"s": "s", "t": "t", "J": "J"}),
}


def shape_by_name(spec: str, density: str = "uniform") -> ShapeModel:
    """Build a shape from ``"name:key=value,..."`` and a density name.

    Examples: ``"circle"``, ``"stadium:radius=1,length=2"``, ``"weier:s=0.3,t=4,J=12"``.
    """
    name, params = parse_named_spec(spec)
    name = normalize_shape_name(name)
    if name not in _SHAPES:
        raise ValueError(f"Unknown shape: {spec!r}")
    cls, allowed = _SHAPES[name]
    kwargs = {}
    for key, value in params.items():
        if key not in allowed:
            raise ValueError(f"Unknown parameter {key!r} for shape {name!r}")
        kwargs[allowed[key]] = int(value) if allowed[key] == "J" else value
    shape = cls(density=density_by_name(density), **kwargs)
    if shape.density.has_jump:
        shape.singular_distance(shape.center)  # validates the jump locus eagerly
    logger.debug("built shape %r", shape)
    return shape


def flat_plane_quadrature(d: int, n: int, x, P, extent: float, h: float) -> DiscreteMeasure:
    """Grid quadrature of H^d on the affine plane x + range(P) over a cube of half-side ``extent``."""
    if not 1 <= d <= n:
        raise ArgumentError("need 1 <= d <= n")
    if extent <= 0 or h <= 0:
        raise ArgumentError("extent and h must be positive")
    x = np.asarray(x, dtype=float).reshape(n)
    P = np.asarray(P, dtype=float).reshape(n, n)
    _, vecs = np.linalg.eigh((P + P.T) / 2)
    basis = vecs[:, -d:]
    m = _cells(2 * extent, h)
    step = 2 * extent / m
    axis = -extent + (np.arange(m) + 0.5) * step
    coords = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    points = x + coords @ basis.T
    return DiscreteMeasure(points, np.full(points.shape[0], step**d))


def singular_offset_mass(shape: ShapeModel, rho: float, h: float) -> float:
    """Quadrature H^d-mass of the rho-offset of the singular set inside S."""
    points, weights = shape.quadrature_cells(h)
    return float(np.sum(weights[shape.singular_distance(points) < rho]))
