"""Shared configuration defaults, solver settings and config-file loading."""

import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Tuple, Union

DEFAULT_KERNEL = "triangular"
DEFAULT_SHAPE = "circle"
DEFAULT_DENSITY = "uniform"
DEFAULT_SEED = 20240611
DEFAULT_N_GRID: Tuple[int, ...] = (250, 500, 1000, 2000, 4000, 8000, 16000)
DEFAULT_TRIALS = 20
DEFAULT_BOOTSTRAP = 1000
DEFAULT_FLUCT_DELTA = 0.2
DEFAULT_SINGULAR_FACTOR = 2.0

solver_settings: Dict[str, float] = {
    'size_cap': 4000,
    'exact_threshold': 600,
    'knn': 32,
    'cost_scale': 1e6,
    'mass_scale': 1e9,
    'num_iter_max': 10_000_000,
}


def validate_solver_settings(settings: Dict[str, float]) -> None:
    """Validate flat-norm solver settings."""
    required_keys = set(solver_settings)
    if not isinstance(settings, dict):
        raise TypeError("settings must be a dictionary")
    if not all(key in settings for key in required_keys):
        raise ValueError(f"settings must contain all required keys: {sorted(required_keys)}")
    if not all(isinstance(v, (int, float)) and v > 0 for v in settings.values()):
        raise ValueError("All settings values must be positive numbers")
    if settings['exact_threshold'] > settings['size_cap']:
        raise ValueError("exact_threshold cannot exceed size_cap")


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read an experiment configuration from JSON or TOML.

    Args:
        path: File ending in ``.json`` or ``.toml``

    Returns:
        Dict[str, Any]: Raw configuration mapping. Emitted summaries are accepted
        too, in which case their ``config`` section is returned.

    Raises:
        OSError: If the file cannot be read
        ValueError: If the content cannot be parsed
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise OSError(f"Cannot read config file {path}: {e}") from e
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ValueError(f"Invalid config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ValueError(f"Config file {path} must hold a mapping")
    if isinstance(data.get("config"), dict):
        return dict(data["config"])
    return data
