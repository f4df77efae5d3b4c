"""Prediction-error rescaling against rolling stream volatility.

The absolute gap between a predicted and an observed value is divided by k
times the rolling sample standard deviation of recent raw observations and
capped at 1, so "anomalous" always means "large relative to how noisy the
stream has been lately".
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ._validation import as_1d_floats
from .errors import ConfigError, InputError

DEFAULT_SIGMA_FLOOR = 1e-9


def sample_std(values) -> float:
    """Unbiased (n-1 denominator) standard deviation; needs >= 2 values."""
    arr = as_1d_floats(values, "values", min_len=2)
    return float(np.std(arr, ddof=1))


def rescale_score(
    predicted: float,
    observed: float,
    sigma: float,
    k: float = 1.0,
    sigma_floor: float = DEFAULT_SIGMA_FLOOR,
) -> float:
    """min(1, |predicted - observed| / (k * max(sigma, sigma_floor)))."""
    if k <= 0:
        raise ConfigError(f"k must be positive, got {k}")
    if sigma < 0:
        raise InputError(f"sigma must be nonnegative, got {sigma}")
    if not np.isfinite(predicted) or not np.isfinite(observed):
        raise InputError("predicted and observed must be finite")
    denom = k * max(float(sigma), sigma_floor)
    return min(1.0, abs(float(predicted) - float(observed)) / denom)


class RollingWindow:
    """Fixed-capacity window of the most recent raw observations.

    Scoring convention: the caller asks for the deviation *before* pushing
    the current observation, so sigma never includes the point being scored.
    """

    def __init__(self, size: int):
        if size < 2:
            raise ConfigError(f"window size must be >= 2, got {size}")
        self.size = int(size)
        self._buf: deque[float] = deque(maxlen=self.size)

    def push(self, value: float) -> None:
        v = float(value)
        if not np.isfinite(v):
            raise InputError(f"cannot push non-finite value {value!r}")
        self._buf.append(v)

    def __len__(self) -> int:
        return len(self._buf)

    @property
    def warmed_up(self) -> bool:
        """True once enough history exists for a standard deviation."""
        return len(self._buf) >= 2

    @property
    def full(self) -> bool:
        return len(self._buf) == self.size

    def std(self) -> float:
        """Sample std of the window contents; requires warmed_up."""
        if not self.warmed_up:
            raise InputError(
                f"rolling std needs at least 2 observations, have {len(self._buf)}"
            )
        return sample_std(np.array(self._buf))

    def values(self) -> np.ndarray:
        return np.array(self._buf, dtype=np.float64)

    def load_values(self, values) -> None:
        arr = as_1d_floats(values, "window values")
        if arr.size > self.size:
            raise InputError("more values than the window capacity")
        self._buf.clear()
        self._buf.extend(arr.tolist())
