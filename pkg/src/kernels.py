"""Radial kernel profiles, their dilations and normalisation constants.

A profile is an even, nonnegative, Lipschitz function supported in (-1, 1).
The density kernel ``eta`` must additionally stay positive on [0, 1/2].
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from .constants import MAX_UNIT_BALL_DIM
from .errors import ArgumentError, InvalidKernelError
from .utils import as_points

logger = logging.getLogger(__name__)


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


# omega_{2k} = pi^k / k!, omega_{2k+1} = 2^{k+1} pi^k / (2k+1)!!
_UNIT_BALL_VOLUMES: Tuple[float, ...] = tuple(
    (math.pi ** (d // 2) / math.factorial(d // 2)) if d % 2 == 0
    else (2 ** (d // 2 + 1) * math.pi ** (d // 2) / _double_factorial(d))
    for d in range(1, MAX_UNIT_BALL_DIM + 1)
)


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the unit ball of R^d, for 1 <= d <= 16."""
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= MAX_UNIT_BALL_DIM:
        raise ArgumentError(f"d must be an integer in [1, {MAX_UNIT_BALL_DIM}], got {d!r}")
    return _UNIT_BALL_VOLUMES[int(d) - 1]


class KernelKind(Enum):
    DENSITY = "density"
    COVARIANCE = "covariance"


@dataclass(frozen=True)
class KernelProfile:
    """Radial profile with its sup and Lipschitz bounds.

    ``polynomial`` holds coefficients ``c_k`` when the profile equals
    ``sum_k c_k |t|^k`` on [0, 1); normalisations then use the closed form.
    """

    name: str
    profile: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    lip_bound: float
    positivity_floor: float
    kind: KernelKind
    polynomial: Optional[Tuple[float, ...]] = None
    breakpoints: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not callable(self.profile):
            raise InvalidKernelError("profile must be callable")
        if self.sup_bound <= 0 or self.lip_bound <= 0:
            raise InvalidKernelError("sup_bound and lip_bound must be positive")
        if self.kind is KernelKind.DENSITY and self.positivity_floor <= 0:
            raise InvalidKernelError(
                f"density profile {self.name!r} must be positive on [0, 1/2]")

    def __call__(self, t) -> np.ndarray:
        t = np.abs(np.asarray(t, dtype=float))
        inside = t < 1.0
        out = np.zeros_like(t)
        if np.any(inside):
            out[inside] = self.profile(t[inside])
        return out

    def with_kind(self, kind: KernelKind) -> "KernelProfile":
        return KernelProfile(self.name, self.profile, self.sup_bound, self.lip_bound,
                             self.positivity_floor, kind, self.polynomial, self.breakpoints)

    def validate(self, grid_size: int = 4001) -> None:
        """Spot-check the profile invariants on a grid of [-1.25, 1.25].

        Raises:
            InvalidKernelError: If an invariant fails
        """
        grid = np.linspace(-1.25, 1.25, grid_size)
        values = self(grid)
        if np.any(values < 0) or np.any(values > self.sup_bound * (1 + 1e-12)):
            raise InvalidKernelError(f"profile {self.name!r} leaves [0, sup_bound]")
        if not np.allclose(values, self(-grid), rtol=0, atol=0):
            raise InvalidKernelError(f"profile {self.name!r} is not even")
        if np.any(values[np.abs(grid) >= 1] != 0):
            raise InvalidKernelError(f"profile {self.name!r} does not vanish outside (-1, 1)")
        slopes = np.abs(np.diff(values)) / np.diff(grid)
        if np.max(slopes) > self.lip_bound * (1 + 1e-9):
            raise InvalidKernelError(f"profile {self.name!r} exceeds its Lipschitz bound")
        if self.kind is KernelKind.DENSITY:
            half = self(np.linspace(0.0, 0.5, 1001))
            if np.min(half) < self.positivity_floor * (1 - 1e-12):
                raise InvalidKernelError(f"profile {self.name!r} dips below its positivity floor")


def _polynomial_eval(coeffs: Tuple[float, ...]) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(t: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(t, coeffs)
    return evaluate


def triangular_profile(kind: KernelKind = KernelKind.DENSITY) -> KernelProfile:
    coeffs = (1.0, -1.0)
    return KernelProfile("triangular", _polynomial_eval(coeffs), 1.0, 1.0, 0.5, kind, coeffs)


def epanechnikov_profile(kind: KernelKind = KernelKind.DENSITY) -> KernelProfile:
    coeffs = (1.0, 0.0, -1.0)
    return KernelProfile("epanechnikov", _polynomial_eval(coeffs), 1.0, 2.0, 0.75, kind, coeffs)


def table_profile(path, kind: KernelKind = KernelKind.DENSITY) -> KernelProfile:
    """Piecewise-linear profile read from a two-column ``t,value`` CSV table on [0, 1]."""
    path = Path(path)
    try:
        table = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except (OSError, ValueError) as e:
        raise InvalidKernelError(f"Cannot read kernel table {path}: {e}") from e
    if table.shape[1] != 2 or table.shape[0] < 2:
        raise InvalidKernelError(f"Kernel table {path} must have two columns and two rows")
    knots, values = table[:, 0], table[:, 1]
    if knots[0] != 0.0 or knots[-1] != 1.0 or np.any(np.diff(knots) <= 0):
        raise InvalidKernelError(f"Kernel table {path} must span [0, 1] increasingly")
    if values[-1] != 0.0 or np.any(values < 0):
        raise InvalidKernelError(f"Kernel table {path} must be nonnegative and vanish at t=1")

    def evaluate(t: np.ndarray) -> np.ndarray:
        return np.interp(t, knots, values)

    half_grid = np.union1d(np.linspace(0.0, 0.5, 1001), knots[knots <= 0.5])
    floor = float(np.min(np.interp(half_grid, knots, values)))
    lip = float(np.max(np.abs(np.diff(values)) / np.diff(knots)))
    return KernelProfile(f"custom:{path}", evaluate, float(np.max(values)), lip, floor, kind,
                         None, tuple(float(k) for k in knots[1:-1]))


def profile_by_name(name: str, kind: KernelKind = KernelKind.DENSITY) -> KernelProfile:
    """Resolve ``triangular``, ``epanechnikov`` or ``custom:<table-file>``."""
    if not isinstance(name, str) or not name.strip():
        raise ValueError("kernel name must be a non-empty string")
    name = name.strip()
    if name.lower() == "triangular":
        return triangular_profile(kind)
    if name.lower() == "epanechnikov":
        return epanechnikov_profile(kind)
    if name.lower().startswith("custom:"):
        return table_profile(name.split(":", 1)[1], kind)
    raise ValueError(f"Unknown kernel profile: {name!r}")


def _radial_moment(profile: KernelProfile, power: int) -> float:
    """Integral of profile(r) r^power over [0, 1]."""
    if profile.polynomial is not None:
        return float(sum(c / (k + power + 1) for k, c in enumerate(profile.polynomial)))
    value, _ = integrate.quad(lambda r: float(profile(r)) * r ** power, 0.0, 1.0,
                              epsabs=0.0, epsrel=1e-12, limit=500,
                              points=profile.breakpoints or None)
    return float(value)


def normalization_eta(profile: KernelProfile, d: int) -> float:
    """C_eta = d * omega_d * int_0^1 eta(r) r^(d-1) dr."""
    if profile.kind is not KernelKind.DENSITY:
        raise InvalidKernelError("normalization_eta expects a density profile")
    value = d * unit_ball_volume(d) * _radial_moment(profile, d - 1)
    if value <= 0:
        raise InvalidKernelError(f"profile {profile.name!r} has zero normalisation in d={d}")
    return value


def normalization_phi(profile: KernelProfile, d: int) -> float:
    """C_phi = omega_d * int_0^1 phi(t) t^(d+1) dt."""
    if profile.kind is not KernelKind.COVARIANCE:
        raise InvalidKernelError("normalization_phi expects a covariance profile")
    value = unit_ball_volume(d) * _radial_moment(profile, d + 1)
    if value <= 0:
        raise InvalidKernelError(f"profile {profile.name!r} has zero normalisation in d={d}")
    return value


@dataclass(frozen=True)
class NormalizedKernel:
    """Profile bound to an intrinsic dimension with its cached constant."""

    profile: KernelProfile
    dimension: int
    constant: float

    def __post_init__(self):
        if self.constant <= 0:
            raise InvalidKernelError("normalisation constant must be positive")

    @classmethod
    def build(cls, profile: KernelProfile, d: int) -> "NormalizedKernel":
        if profile.kind is KernelKind.DENSITY:
            constant = normalization_eta(profile, d)
        else:
            constant = normalization_phi(profile, d)
        logger.debug("kernel %s (%s) d=%d constant=%.12g",
                     profile.name, profile.kind.value, d, constant)
        return cls(profile, int(d), constant)

    @classmethod
    def by_name(cls, name: str, kind: KernelKind, d: int) -> "NormalizedKernel":
        return cls.build(profile_by_name(name, kind), d)


def eval_eta_delta(kernel: NormalizedKernel, z, delta: float) -> np.ndarray:
    """eta(|z| / delta); zero whenever |z| >= delta. Accepts one point or a stack."""
    if delta <= 0:
        raise ArgumentError("delta must be positive")
    z = np.asarray(z, dtype=float)
    return kernel.profile(np.linalg.norm(z, axis=-1) / delta)


def eval_psi_r(kernel: NormalizedKernel, z, r: float) -> np.ndarray:
    """phi(|z|/r) (z/r) (z/r)^T for one point (n,) or a stack (m, n)."""
    if r <= 0:
        raise ArgumentError("r must be positive")
    single = np.ndim(z) == 1
    u = as_points(z) / r
    weights = kernel.profile(np.linalg.norm(u, axis=1))
    out = weights[:, None, None] * np.einsum("mi,mj->mij", u, u)
    return out[0] if single else out
