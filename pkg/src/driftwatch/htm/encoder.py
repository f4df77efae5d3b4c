"""Contiguous-bucket scalar encoder.

A value range [min_value, max_value] is split into overlapping buckets; a
value maps to a run of `active_bits` consecutive ones whose start index is
the bucket index. Nearby values share most of their active bits, values far
apart share none.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, InputError
from .sdr import Sdr


@dataclass(frozen=True)
class EncoderConfig:
    min_value: float = -1.0
    max_value: float = 1.0
    n_bits: int = 400
    active_bits: int = 21

    def __post_init__(self):
        if not np.isfinite(self.min_value) or not np.isfinite(self.max_value):
            raise ConfigError("encoder range must be finite")
        if not self.min_value < self.max_value:
            raise ConfigError(
                f"min_value must be < max_value, got [{self.min_value}, {self.max_value}]"
            )
        if self.active_bits <= 0 or self.n_bits <= 0:
            raise ConfigError("n_bits and active_bits must be positive")
        if self.active_bits >= self.n_bits:
            raise ConfigError(
                f"active_bits ({self.active_bits}) must be smaller than n_bits ({self.n_bits})"
            )

    @property
    def n_buckets(self) -> int:
        """Number of distinct encodings: n_bits - active_bits + 1."""
        return self.n_bits - self.active_bits + 1


def bucket_index(value: float, config: EncoderConfig) -> int:
    """Bucket for a (clamped) scalar: floor of its position scaled by n_buckets."""
    v = float(value)
    if not np.isfinite(v):
        raise InputError(f"cannot encode non-finite value {value!r}")
    v = min(max(v, config.min_value), config.max_value)
    span = config.max_value - config.min_value
    b = int((v - config.min_value) / span * config.n_buckets)
    return min(config.n_buckets - 1, b)


def encode(value: float, config: EncoderConfig) -> Sdr:
    """Encode a scalar as exactly `active_bits` contiguous ones."""
    b = bucket_index(value, config)
    active = np.arange(b, b + config.active_bits, dtype=np.int64)
    return Sdr._trusted(config.n_bits, active)


def bucket_sdr(bucket: int, config: EncoderConfig) -> Sdr:
    """The encoding shared by every value falling into `bucket`."""
    if not 0 <= bucket < config.n_buckets:
        raise InputError(f"bucket {bucket} out of range [0, {config.n_buckets})")
    active = np.arange(bucket, bucket + config.active_bits, dtype=np.int64)
    return Sdr._trusted(config.n_bits, active)


def bucket_center(bucket: int, config: EncoderConfig) -> float:
    """Center value of a bucket: the decode target for that encoding."""
    if not 0 <= bucket < config.n_buckets:
        raise InputError(f"bucket {bucket} out of range [0, {config.n_buckets})")
    span = config.max_value - config.min_value
    return config.min_value + (bucket + 0.5) * span / config.n_buckets
