"""Sparse-distributed sequence prediction core.

Pipeline per scalar sample: encode to a sparse bit vector, pick the winning
columns by feed-forward overlap (spatial pooler), track the sequence context
with per-cell distal segments (temporal memory), score how much of the new
column set was predicted a step ago, and decode the current prediction back
into a scalar estimate.
"""

from .sdr import Sdr
from .encoder import EncoderConfig, encode, bucket_center, bucket_sdr
from .pooler import PoolerConfig, SpatialPooler
from .temporal import TemporalConfig, TemporalMemory
from .core import HtmCore, HtmStepResult, raw_anomaly_score

__all__ = [
    "Sdr",
    "EncoderConfig",
    "encode",
    "bucket_center",
    "bucket_sdr",
    "PoolerConfig",
    "SpatialPooler",
    "TemporalConfig",
    "TemporalMemory",
    "HtmCore",
    "HtmStepResult",
    "raw_anomaly_score",
]
