"""Density, measure, tangent and varifold estimators built on point samples.

Naming of the sample roles follows the four-way split: ``X`` carries the
support, ``Y`` the density used for the weights, ``Y~`` the density factor of
the tangent estimator and ``Z`` the covariance.  Without splitting all four
roles are played by the same sample.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .constants import GAP_TOL, SYMMETRY_TOL
from .errors import ArgumentError, DegenerateGapError
from .kernels import KernelKind, NormalizedKernel, eval_psi_r
from .measures import DiscreteMeasure, DiscreteVarifold
from .sampling import SampleBatch, SpatialIndex, SplitSample
from .utils import as_points

logger = logging.getLogger(__name__)

SampleLike = Union[SampleBatch, np.ndarray]


class VarifoldVariant(Enum):
    W = "W"
    V = "V"
    W_TILDE = "W_tilde"


@dataclass(frozen=True)
class EstimatorConfig:
    delta: float
    r: float
    tau: float
    d: int
    eta: NormalizedKernel
    phi: NormalizedKernel
    splitting: bool = False
    variant: VarifoldVariant = VarifoldVariant.V

    def __post_init__(self):
        if not self.delta > 0 or not self.r > 0:
            raise ArgumentError("delta and r must be positive")
        if not 0 < self.tau <= 1:
            raise ArgumentError("tau must lie in (0, 1]")
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ArgumentError("d must be a positive integer")
        if self.eta.profile.kind is not KernelKind.DENSITY:
            raise ArgumentError("eta must be a density kernel")
        if self.phi.profile.kind is not KernelKind.COVARIANCE:
            raise ArgumentError("phi must be a covariance kernel")
        if self.eta.dimension != self.d or self.phi.dimension != self.d:
            raise ArgumentError("kernels must be normalised in dimension d")

    @classmethod
    def with_kernels(cls, d: int, delta: float, tau: float, r: Optional[float] = None,
                     eta: str = "triangular", phi: str = "triangular", **kwargs) -> "EstimatorConfig":
        return cls(delta=delta, r=delta if r is None else r, tau=tau, d=d,
                   eta=NormalizedKernel.by_name(eta, KernelKind.DENSITY, d),
                   phi=NormalizedKernel.by_name(phi, KernelKind.COVARIANCE, d), **kwargs)


def _points_of(sample: SampleLike) -> np.ndarray:
    if isinstance(sample, SampleBatch):
        return sample.points
    arr = np.asarray(sample, dtype=float)
    return arr if arr.ndim == 2 else as_points(arr)


def bandwidth_rule(N: int, d: int, a: float, b: float) -> float:
    """delta_N = N^(-1 / (d + 2 min(a, b)))."""
    if not 0 < a <= 1 or not 0 < b <= 1:
        raise ArgumentError(f"a and b must lie in (0, 1], got a={a}, b={b}")
    if N < 1 or d < 1:
        raise ArgumentError("N and d must be positive")
    return float(N) ** (-1.0 / (d + 2.0 * min(a, b)))


def default_tau(d: int, eta: NormalizedKernel, ahlfors_C0: float) -> float:
    """Half of the lower bound m = 2^-d m_eta / (C_eta C0) on theta_delta."""
    return 0.5 * 2.0 ** (-d) * eta.profile.positivity_floor / (eta.constant * ahlfors_C0)


def density_estimates(sample: SampleLike, queries, cfg: EstimatorConfig,
                      index: Optional[SpatialIndex] = None) -> np.ndarray:
    """theta_{delta,N} at every query point."""
    points = _points_of(sample)
    queries = as_points(queries, points.shape[1])
    N = points.shape[0]
    if N == 0:
        return np.zeros(queries.shape[0])
    index = index or SpatialIndex(points)
    rows, _, dist = index.pairs_within(queries, cfg.delta)
    sums = np.bincount(rows, weights=cfg.eta.profile(dist / cfg.delta), minlength=queries.shape[0])
    return sums / (N * cfg.eta.constant * cfg.delta**cfg.d)


def density_estimate(sample: SampleLike, index: Optional[SpatialIndex], x,
                     cfg: EstimatorConfig) -> float:
    """theta_{delta,N}(x) = sum_i eta(|x - X_i| / delta) / (N C_eta delta^d)."""
    return float(density_estimates(sample, x, cfg, index)[0])


def phi_truncation(t, tau: float):
    """Phi(t) = chi_tau(t) / t: zero below tau/2, 1/t above tau, linear ramp for chi between."""
    if not 0 < tau <= 1:
        raise ArgumentError("tau must lie in (0, 1]")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    chi = np.where(t < tau / 2, 0.0, np.where(t <= tau, 2.0 * t / tau - 1.0, 1.0))
    out = np.divide(chi, t, out=np.zeros_like(t), where=chi > 0)
    return float(out) if scalar else out


def _check_roles(cfg: EstimatorConfig, **roles: Optional[SampleLike]) -> None:
    """Split mode needs every role sample; without splitting none may be passed."""
    if cfg.splitting:
        missing = sorted(name for name, part in roles.items() if part is None)
        if missing:
            raise ArgumentError(f"splitting is on but {', '.join(missing)} not given")
    else:
        extra = sorted(name for name, part in roles.items() if part is not None)
        if extra:
            raise ArgumentError(f"splitting is off but {', '.join(extra)} given")


def measure_estimate(sample: SampleLike, cfg: EstimatorConfig,
                     density_sample: Optional[SampleLike] = None) -> DiscreteMeasure:
    """nu_{delta,N}: atoms at the sample with weights Phi(theta_{delta,N}(X_i)) / N.

    With ``cfg.splitting`` theta comes from ``density_sample`` (role Y),
    otherwise from the sample itself.

    Raises:
        ArgumentError: If ``density_sample`` disagrees with ``cfg.splitting``
    """
    _check_roles(cfg, density_sample=density_sample)
    points = _points_of(sample)
    N = points.shape[0]
    if N == 0:
        return DiscreteMeasure.empty(points.shape[1])
    source = points if density_sample is None else _points_of(density_sample)
    theta = density_estimates(source, points, cfg)
    return DiscreteMeasure(points, phi_truncation(theta, cfg.tau) / N)


def covariance_matrices(measure: DiscreteMeasure, queries, r: float, cfg: EstimatorConfig,
                        index: Optional[SpatialIndex] = None) -> np.ndarray:
    """Sigma_r(x, measure) for every query point, shape (m, n, n)."""
    n = measure.ambient_dim
    queries = as_points(queries, n)
    m = queries.shape[0]
    out = np.zeros((m, n * n))
    if measure.size:
        index = index or SpatialIndex(measure.points)
        rows, cols, _ = index.pairs_within(queries, r)
        if rows.size:
            psi = eval_psi_r(cfg.phi, measure.points[cols] - queries[rows], r)
            weighted = (measure.weights[cols][:, None] * psi.reshape(-1, n * n))
            for k in range(n * n):
                out[:, k] = np.bincount(rows, weights=weighted[:, k], minlength=m)
    return out.reshape(m, n, n) / (cfg.phi.constant * r**cfg.d)


def covariance_matrix(measure: DiscreteMeasure, x, r: float, cfg: EstimatorConfig) -> np.ndarray:
    """Sigma_r(x, lambda) = sum_i w_i psi_r(p_i - x) / (C_phi r^d)."""
    if r <= 0:
        raise ArgumentError("r must be positive")
    return covariance_matrices(measure, x, r, cfg)[0]


def _empirical(sample: SampleLike) -> DiscreteMeasure:
    points = _points_of(sample)
    if not points.shape[0]:
        return DiscreteMeasure.empty(points.shape[1])
    return DiscreteMeasure(points, np.full(points.shape[0], 1.0 / points.shape[0]))


def tangent_sigmas(density_sample: SampleLike, covariance_sample: SampleLike, queries,
                   cfg: EstimatorConfig) -> np.ndarray:
    """sigma_{r,delta,N} at every query point."""
    factor = phi_truncation(density_estimates(density_sample, queries, cfg), cfg.tau)
    sigma = covariance_matrices(_empirical(covariance_sample), queries, cfg.r, cfg)
    return factor[:, None, None] * sigma


def tangent_sigma(sample_a: SampleLike, sample_b: SampleLike, x, cfg: EstimatorConfig) -> np.ndarray:
    """Phi(theta^A_{delta,N}(x)) Sigma_r(x, mu^B_N)."""
    return tangent_sigmas(sample_a, sample_b, x, cfg)[0]


def _check_symmetric(matrices: np.ndarray) -> np.ndarray:
    if matrices.ndim < 2 or matrices.shape[-1] != matrices.shape[-2]:
        raise ArgumentError(f"expected square matrices, got shape {matrices.shape}")
    if matrices.size and np.max(np.abs(matrices - np.swapaxes(matrices, -1, -2))) > SYMMETRY_TOL:
        raise ArgumentError("matrix is not symmetric")
    return (matrices + np.swapaxes(matrices, -1, -2)) / 2


def projector_truncate(sigma, d: int) -> np.ndarray:
    """Orthogonal projector onto the top-d eigenspace of a symmetric matrix (or stack).

    Optimal among rank-d projectors in operator norm. Ties follow the
    eigensolver's ordering.
    """
    sigma = _check_symmetric(np.asarray(sigma, dtype=float))
    n = sigma.shape[-1]
    if not 1 <= d <= n:
        raise ArgumentError(f"d must lie in [1, {n}], got {d}")
    _, vecs = np.linalg.eigh(sigma)
    top = vecs[..., -d:]
    return top @ np.swapaxes(top, -1, -2)


def spectral_gap(a, d: int) -> np.ndarray:
    """lambda_d - lambda_{d+1} (decreasing order); +inf when d = n."""
    a = _check_symmetric(np.asarray(a, dtype=float))
    n = a.shape[-1]
    if not 1 <= d <= n:
        raise ArgumentError(f"d must lie in [1, {n}], got {d}")
    w = np.linalg.eigvalsh(a)
    if d == n:
        return np.full(w.shape[:-1], np.inf)
    return w[..., n - d] - w[..., n - d - 1]


def snap_to_projector(a, d: int) -> np.ndarray:
    """Nearest rank-d projector to a matrix with a spectral gap at d.

    Raises:
        DegenerateGapError: If lambda_d - lambda_{d+1} < 1e-12
    """
    gap = spectral_gap(a, d)
    if np.any(gap < GAP_TOL):
        raise DegenerateGapError(f"spectral gap {np.min(gap):.3g} below {GAP_TOL}")
    return projector_truncate(a, d)


def varifold_estimate(sample: SampleLike, cfg: EstimatorConfig,
                      density_sample: Optional[SampleLike] = None,
                      tangent_density_sample: Optional[SampleLike] = None,
                      covariance_sample: Optional[SampleLike] = None) -> DiscreteVarifold:
    """Point-cloud varifold supported on ``sample`` with estimated weights and matrices.

    Matrices are sigma_{r,delta,N}(X_i) for ``W``, their top-d projector for
    ``V`` and Sigma_r(X_i, nu_{delta,N}) for ``W_tilde``. With
    ``cfg.splitting`` the density, tangent-density and covariance roles come
    from the three extra samples (only the first one for ``W_tilde``);
    otherwise the sample plays every role.

    Raises:
        ArgumentError: If the extra samples disagree with ``cfg.splitting``
    """
    if cfg.variant is VarifoldVariant.W_TILDE:
        _check_roles(cfg, density_sample=density_sample)
    else:
        _check_roles(cfg, density_sample=density_sample,
                     tangent_density_sample=tangent_density_sample,
                     covariance_sample=covariance_sample)
    points = _points_of(sample)
    n = points.shape[1]
    projector = cfg.variant is VarifoldVariant.V
    if not points.shape[0]:
        return DiscreteVarifold.empty(n, projector, cfg.d if projector else None)
    nu = measure_estimate(points, cfg, density_sample)
    if cfg.variant is VarifoldVariant.W_TILDE:
        matrices = covariance_matrices(nu, points, cfg.r, cfg)
    else:
        if cfg.splitting:
            sigmas = tangent_sigmas(tangent_density_sample, covariance_sample, points, cfg)
        else:
            sigmas = tangent_sigmas(points, points, points, cfg)
        matrices = projector_truncate(sigmas, cfg.d) if projector else sigmas
    logger.debug("varifold estimate %s on %d points (delta=%.4g, r=%.4g)",
                 cfg.variant.value, points.shape[0], cfg.delta, cfg.r)
    return DiscreteVarifold(points, nu.weights, matrices, projector, cfg.d if projector else None)


def split_config(N: int, d: int, a: float, b: float, tau: float, eta: str = "triangular",
                 phi: str = "triangular", delta: Optional[float] = None) -> EstimatorConfig:
    """Estimator settings with delta = r = delta_N unless ``delta`` overrides the rule."""
    delta = bandwidth_rule(N, d, a, b) if delta is None else delta
    return EstimatorConfig.with_kernels(d, delta, tau, eta=eta, phi=phi, splitting=True,
                                        variant=VarifoldVariant.V)


def split_measure_estimate(split: SplitSample, d: int, a: float, b: float, tau: float,
                           eta: str = "triangular", delta: Optional[float] = None) -> DiscreteMeasure:
    """nu^_{delta_N,N}: weights Phi(theta^Y) on the atoms of mu^X."""
    if not split.size:
        raise ArgumentError("split parts must be nonempty")
    cfg = split_config(split.size, d, a, b, tau, eta=eta, delta=delta)
    return measure_estimate(split.x, cfg, density_sample=split.y)


def split_varifold_estimate(split: SplitSample, d: int, a: float, b: float, tau: float,
                            eta: str = "triangular", phi: str = "triangular",
                            delta: Optional[float] = None) -> DiscreteVarifold:
    """V^_{delta_N,N} from the four independent parts (X, Y, Y~, Z)."""
    if not split.size:
        raise ArgumentError("split parts must be nonempty")
    cfg = split_config(split.size, d, a, b, tau, eta=eta, phi=phi, delta=delta)
    return varifold_estimate(split.x, cfg, density_sample=split.y,
                             tangent_density_sample=split.y_tilde, covariance_sample=split.z)
