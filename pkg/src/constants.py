from .config import DEFAULT_KERNEL, DEFAULT_SEED, solver_settings
from .utils import normalize_shape_name

SYMMETRY_TOL: float = 1e-8
PROJECTOR_TOL: float = 1e-10
GAP_TOL: float = 1e-12
SINGULAR_TOL: float = 1e-12
MAX_REJECTION_FACTOR: int = 10**6
MAX_ORACLE_POINTS: int = 15
MAX_UNIT_BALL_DIM: int = 16
WORKERS_ENV: str = "VARIFOLD_WORKERS"

__all__ = [
    "DEFAULT_KERNEL",
    "DEFAULT_SEED",
    "solver_settings",
    "normalize_shape_name",
    "SYMMETRY_TOL",
    "PROJECTOR_TOL",
    "GAP_TOL",
    "SINGULAR_TOL",
    "MAX_REJECTION_FACTOR",
    "MAX_ORACLE_POINTS",
    "MAX_UNIT_BALL_DIM",
    "WORKERS_ENV",
]
