"""Small input-validation helpers used across modules."""

from __future__ import annotations

import numpy as np

from .errors import InputError, ConfigError


def as_1d_floats(x, name: str = "x", min_len: int = 0) -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting NaN/inf and short inputs."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise InputError(f"{name} needs at least {min_len} values, got {arr.size}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def as_2d_floats(x, name: str = "X") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value <= 0:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_probability(value, name: str, *, open_ended: bool = True) -> float:
    v = float(value)
    if open_ended:
        if not (0.0 < v < 1.0):
            raise ConfigError(f"{name} must lie strictly inside (0, 1), got {value!r}")
    else:
        if not (0.0 <= v <= 1.0):
            raise ConfigError(f"{name} must lie inside [0, 1], got {value!r}")
    return v


def check_finite_float(value, name: str) -> float:
    v = float(value)
    if not np.isfinite(v):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return v
