import logging
import sys
from typing import Dict, Optional, Tuple

import numpy as np

from .config import DEFAULT_SHAPE

_SHAPE_ALIASES = {
    "square": "square_boundary",
    "cross": "cross_segments",
    "disk": "disk_with_boundary",
    "weier": "holder_graph",
    "weierstrass": "holder_graph",
}


def parse_named_spec(spec: str) -> Tuple[str, Dict[str, float]]:
    """Split ``"name:key=value,key=value"`` into a name and numeric parameters."""
    if not isinstance(spec, str) or not spec.strip():
        raise ValueError("spec must be a non-empty string")
    name, _, rest = spec.strip().partition(":")
    params: Dict[str, float] = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"Malformed parameter {item!r} in {spec!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError as e:
            raise ValueError(f"Parameter {key.strip()!r} in {spec!r} is not numeric") from e
    return name.strip().lower(), params


def normalize_shape_name(name: str) -> str:
    if not isinstance(name, str) or not name.strip():
        return DEFAULT_SHAPE
    name = name.strip().lower()
    return _SHAPE_ALIASES.get(name, name)


def as_points(x, ambient_dim: Optional[int] = None) -> np.ndarray:
    """Coerce a point or a list of points to a float (m, n) array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"points must be a vector or a 2-d array, got shape {arr.shape}")
    if ambient_dim is not None and arr.shape[1] != ambient_dim:
        raise ValueError(f"points must live in R^{ambient_dim}, got dimension {arr.shape[1]}")
    return arr


def configure_logging(level: str = "WARNING") -> None:
    root = logging.getLogger("src")
    root.setLevel(level.upper())
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
