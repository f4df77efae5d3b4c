"""Full sequence-prediction core: encode → pool → score → predict → decode."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, ScoringError
from .encoder import EncoderConfig, bucket_center, encode
from .pooler import PoolerConfig, SpatialPooler
from .sdr import Sdr
from .temporal import TemporalConfig, TemporalMemory

_STATE_VERSION = 1


def raw_anomaly_score(predicted_prev: Sdr, active_now: Sdr) -> float:
    """Fraction of the current active set that was not predicted a step ago.

    1 means a complete surprise, 0 a perfectly predicted input.
    """
    if predicted_prev.width != active_now.width:
        raise InputError(
            f"width mismatch: {predicted_prev.width} vs {active_now.width}"
        )
    if active_now.n_active == 0:
        raise ScoringError("raw anomaly score undefined for an empty active set")
    return 1.0 - predicted_prev.overlap(active_now) / active_now.n_active


@dataclass(frozen=True)
class HtmStepResult:
    raw_score: float          # unpredictedness of the current input, in [0, 1]
    predicted_value: float    # decoded estimate of the next value
    prediction_empty: bool    # True when nothing is predicted for the next step
    active_columns: Sdr
    predicted_columns: Sdr


class HtmCore:
    """Online scalar sequence model producing anomaly scores and forecasts.

    One instance tracks one stream. Each `step(value)` learns the observed
    transition and returns how surprising the value was plus a decoded
    prediction of the next one. Identically-seeded cores fed the same stream
    give bit-identical outputs.
    """

    def __init__(
        self,
        encoder: EncoderConfig | None = None,
        pooler: PoolerConfig | None = None,
        temporal: TemporalConfig | None = None,
    ):
        self.encoder = encoder or EncoderConfig()
        self.pooler_config = pooler or PoolerConfig()
        self.temporal_config = temporal or TemporalConfig()
        self.pooler = SpatialPooler(self.pooler_config, self.encoder.n_bits)
        self.tm = TemporalMemory(self.temporal_config, self.pooler_config.n_columns)

        self.prev_predicted = Sdr._trusted(
            self.pooler_config.n_columns, np.empty(0, dtype=np.int64)
        )
        self.prev_value: float | None = None
        self.steps = 0

        # Decode cache: per-column connected-bit counts for every encoder
        # bucket window, refreshed lazily and only for columns whose
        # connectivity changed.
        self._win_counts: np.ndarray | None = None
        self._cache_dirty = True

    # -- main loop ---------------------------------------------------------

    def step(self, value: float, learn: bool = True) -> HtmStepResult:
        """Feed one observation; score it and predict the next."""
        sdr = encode(value, self.encoder)
        active_cols = self.pooler.compute(sdr, learn=learn)
        raw = raw_anomaly_score(self.prev_predicted, active_cols)
        predicted_cols = self.tm.step(active_cols, learn=learn)
        if learn:
            self.prev_value = float(value)
        predicted_value = self.decode(
            predicted_cols,
            fallback=float(value) if not learn else None,
        )
        if learn:
            self.prev_predicted = predicted_cols
            self.steps += 1
        return HtmStepResult(
            raw_score=raw,
            predicted_value=predicted_value,
            prediction_empty=predicted_cols.n_active == 0,
            active_columns=active_cols,
            predicted_columns=predicted_cols,
        )

    def decode(self, predicted_columns: Sdr, fallback: float | None = None) -> float:
        """Translate a predicted column set back into a scalar.

        Each encoder bucket is scored by how many connected input bits the
        predicted columns hold inside that bucket's window; the center of the
        best-scoring bucket wins (ties to the lowest bucket). An empty
        prediction falls back to the last observed value (0.0 before any
        observation).
        """
        if predicted_columns.width != self.pooler_config.n_columns:
            raise InputError("predicted_columns width does not match the pooler")
        if predicted_columns.n_active == 0:
            if fallback is not None:
                return fallback
            return self.prev_value if self.prev_value is not None else 0.0
        self._sync_cache()
        overlaps = self._win_counts[predicted_columns.active].sum(axis=0)
        best_bucket = int(np.argmax(overlaps))  # argmax takes the lowest on ties
        return bucket_center(best_bucket, self.encoder)

    def bucket_columns(self, bucket: int) -> Sdr:
        """Columns currently most tuned to an encoder bucket's input window.

        Ranked by connected-bit count inside the window, equal counts
        resolving to the lower column index; as many columns are returned as
        the pooler activates per step.
        """
        self._sync_cache()
        n_cols = self.pooler_config.n_columns
        key = self._win_counts[:, bucket].astype(np.int64) * n_cols + (
            n_cols - 1 - np.arange(n_cols, dtype=np.int64)
        )
        k = self.pooler_config.n_active_columns
        top = np.argpartition(key, n_cols - k)[n_cols - k:]
        return Sdr._trusted(n_cols, np.sort(top).astype(np.int64))

    def _window_counts(self, rows: np.ndarray | slice) -> np.ndarray:
        """Connected-bit count per bucket window for the given column rows."""
        enc = self.encoder
        conn = self.pooler.connected[rows]
        cums = np.zeros((conn.shape[0], enc.n_bits + 1), dtype=np.int32)
        np.cumsum(conn, axis=1, out=cums[:, 1:])
        return cums[:, enc.active_bits:] - cums[:, : enc.n_buckets]

    def _sync_cache(self) -> None:
        changed = self.pooler.consume_connectivity_changes()
        if self._win_counts is None or self._cache_dirty:
            self._win_counts = np.ascontiguousarray(
                self._window_counts(slice(None))
            )
            self._cache_dirty = False
        elif changed.size:
            self._win_counts[changed] = self._window_counts(changed)

    # -- serialization -----------------------------------------------------

    def save_bytes(self) -> bytes:
        """Serialize the full mutable state; see `load_bytes`."""
        # The decode cache is derived from pooler connectivity and is rebuilt
        # lazily after load, so snapshots stay canonical: a read-only decode
        # between two saves cannot change the bytes.
        meta = {
            "version": _STATE_VERSION,
            "encoder": self.encoder.__dict__.copy(),
            "pooler": self.pooler_config.__dict__.copy(),
            "temporal": self.temporal_config.__dict__.copy(),
            "prev_value": self.prev_value,
            "steps": self.steps,
        }
        arrays = {
            "meta": np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
            "prev_predicted": self.prev_predicted.active,
        }
        arrays.update(self.pooler.state_arrays())
        arrays.update(self.tm.state_arrays())
        buf = io.BytesIO()
        np.savez(buf, **arrays)
        return buf.getvalue()

    @classmethod
    def load_bytes(cls, blob: bytes) -> "HtmCore":
        """Rebuild a core whose future outputs match the saved instance exactly."""
        with np.load(io.BytesIO(blob)) as data:
            arrays = {k: data[k] for k in data.files}
        meta = json.loads(bytes(arrays.pop("meta")).decode())
        if meta["version"] != _STATE_VERSION:
            raise InputError(f"unsupported state version {meta['version']}")
        core = cls(
            encoder=EncoderConfig(**meta["encoder"]),
            pooler=PoolerConfig(**meta["pooler"]),
            temporal=TemporalConfig(**meta["temporal"]),
        )
        core.pooler.load_state_arrays(arrays)
        core.tm.load_state_arrays(arrays)
        core.prev_predicted = Sdr._trusted(
            core.pooler_config.n_columns,
            np.asarray(arrays["prev_predicted"], dtype=np.int64),
        )
        core.prev_value = meta["prev_value"]
        core.steps = int(meta["steps"])
        return core
