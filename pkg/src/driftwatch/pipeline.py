"""End-to-end streaming drift detector.

Per dimension and per sample: the sequence model scores the observation,
the score is normalized against rolling volatility, binarized, and fed to a
restarting sequential test; terminal test decisions become drift events.
With several dimensions an additional combined event stream applies the
any-dimension-drifts rule.

Warm-up: the first `window_size` samples only fill the volatility window
(the score is pinned to 0 and the sequential test does not consume them).
When no encoder range is given, it is inferred from those warm-up samples
(min/max widened by `range_margin` times the span, then frozen) and the
sequence model can optionally replay the warm-up values to seed its
transition memory before live scoring starts.
"""

from __future__ import annotations

import enum
import io
import json
import math
from collections import deque
from dataclasses import dataclass, field
from itertools import islice

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError, InputError
from .htm import EncoderConfig, HtmCore, PoolerConfig, TemporalConfig
from .rescale import DEFAULT_SIGMA_FLOOR, RollingWindow, rescale_score
from .sprt import (
    Decision,
    SprtConfig,
    SprtMonitor,
    binarize,
    combine_decisions,
    sprt_limits,
)

_STATE_VERSION = 1
SCORE_MODES = ("gated", "rescaled", "raw")


class EventKind(enum.Enum):
    DRIFT_ONSET = "DriftOnset"
    NO_DRIFT_DECISION = "NoDriftDecision"


@dataclass(frozen=True)
class DriftEvent:
    """Terminal sequential-test decision at one stream position.

    `dimension` is None for combined (stream-level) events. The count and
    limits are captured before the test restarts, so a DriftOnset always has
    cm_at_decision > upper_limit and a NoDriftDecision cm_at_decision <
    lower_limit.
    """

    global_time: int
    kind: EventKind
    cm_at_decision: int
    upper_limit: float
    lower_limit: float
    dimension: int | None = None

    def to_json_dict(self) -> dict:
        rec = {
            "global_time": self.global_time,
            "kind": self.kind.value,
            "cm_at_decision": self.cm_at_decision,
            "upper_limit": self.upper_limit,
            "lower_limit": self.lower_limit,
        }
        if self.dimension is not None:
            rec["dimension"] = self.dimension
        return rec

    @classmethod
    def from_json_dict(cls, rec: dict) -> "DriftEvent":
        return cls(
            global_time=int(rec["global_time"]),
            kind=EventKind(rec["kind"]),
            cm_at_decision=int(rec["cm_at_decision"]),
            upper_limit=float(rec["upper_limit"]),
            lower_limit=float(rec["lower_limit"]),
            dimension=rec.get("dimension"),
        )


@dataclass(frozen=True)
class DriftWindow:
    start: int
    end: int | None  # None: still open


def drift_windows(events) -> list[DriftWindow]:
    """Drift intervals from combined onsets: each runs to the next onset.

    The last window stays open-ended; no combined onsets means no windows.
    """
    onsets = [
        e.global_time
        for e in events
        if e.kind is EventKind.DRIFT_ONSET and e.dimension is None
    ]
    out = []
    for i, start in enumerate(onsets):
        end = onsets[i + 1] if i + 1 < len(onsets) else None
        out.append(DriftWindow(start, end))
    return out


@dataclass
class _Lane:
    """Per-dimension machinery bundle."""

    window: RollingWindow
    sprt: SprtMonitor
    htm: HtmCore | None = None
    warm_values: list = field(default_factory=list)
    pending_pred: float | None = None
    pending_empty: bool = True
    resolved_range: tuple | None = None
    mean_snaps: deque = field(default_factory=deque)
    raw_recent: deque = field(default_factory=deque)


class HtmSprtDetector(BaseEstimator):
    """Streaming drift detector with an sklearn-style surface.

    `update(values)` consumes one sample and returns any events it raised;
    `fit(X)` folds update over a whole array and exposes `events_`,
    `windows_`, and (with record_trace) `trace_`. `fit_transform(X)` also
    returns the per-dimension normalized scores. `save`/`load` checkpoint
    the full state so a resumed run emits bit-identical events.

    score_mode selects how the per-step score fed to the binarizer is
    composed from the sequence model's outputs:

    * "rescaled": volatility-normalized gap between the previous step's
      decoded prediction and the current observation;
    * "raw": fraction of the current active columns that was not predicted;
    * "gated" (default): the minimum of the two — flag a step only when it
      is both structurally unpredicted and numerically far off.

    On top of the selected channel, a level-shift escalation (disabled with
    shift_crit=0) saturates the score to 1.0 while the recent mean sits more
    than shift_crit standard errors from a lagged reference and the model's
    recent raw scores average at least shift_raw_floor. The reference is the
    median window mean/deviation over the oldest shift_ref_count snapshots
    of the last shift_lag steps, and the recent mean is taken at two
    horizons: the last shift_short points (cut shift_crit) for a fast
    reaction, and the full window (stricter cut shift_crit_full, because its
    excursions under ordinary noise persist for ~window_size steps) for
    power on smaller gaps. The sequence model re-learns a
    shifted regime in a few dozen steps, which would otherwise let a genuine
    mean shift fade out of the score before a sequential test can conclude;
    the lagged reference keeps the evidence hot for shift_lag steps, and the
    raw-score gate keeps a well-learned moving baseline (for example a slow
    seasonal cycle) from tripping it.
    """

    def __init__(
        self,
        window_size: int = 15,
        k: float = 1.0,
        sigma_floor: float = DEFAULT_SIGMA_FLOOR,
        p_null: float = 0.45,
        p_alt: float = 0.5,
        alpha: float = 0.05,
        beta: float = 0.005,
        bin_threshold: float = 0.65,
        combine: bool = True,
        score_mode: str = "gated",
        shift_crit: float = 3.0,
        shift_crit_full: float = 3.5,
        shift_lag: int = 70,
        shift_short: int = 5,
        shift_raw_floor: float = 0.5,
        shift_raw_horizon: int = 40,
        shift_ref_count: int = 10,
        encoder_range: tuple | None = None,
        range_margin: float = 1.0,
        warmup_replays: int = 1,
        n_bits: int = 400,
        active_bits: int = 21,
        n_columns: int = 1024,
        n_active_columns: int = 20,
        potential_fraction: float = 0.5,
        permanence_connected: float = 0.5,
        permanence_inc: float = 0.05,
        permanence_dec: float = 0.01,
        cells_per_column: int = 8,
        segment_activation_threshold: int = 13,
        initial_permanence: float = 0.55,
        max_synapses_per_segment: int = 32,
        reset_on_drift: bool = False,
        record_trace: bool = False,
        seed: int = 0,
    ):
        self.window_size = window_size
        self.k = k
        self.sigma_floor = sigma_floor
        self.p_null = p_null
        self.p_alt = p_alt
        self.alpha = alpha
        self.beta = beta
        self.bin_threshold = bin_threshold
        self.combine = combine
        self.score_mode = score_mode
        self.shift_crit = shift_crit
        self.shift_crit_full = shift_crit_full
        self.shift_lag = shift_lag
        self.shift_short = shift_short
        self.shift_raw_floor = shift_raw_floor
        self.shift_raw_horizon = shift_raw_horizon
        self.shift_ref_count = shift_ref_count
        self.encoder_range = encoder_range
        self.range_margin = range_margin
        self.warmup_replays = warmup_replays
        self.n_bits = n_bits
        self.active_bits = active_bits
        self.n_columns = n_columns
        self.n_active_columns = n_active_columns
        self.potential_fraction = potential_fraction
        self.permanence_connected = permanence_connected
        self.permanence_inc = permanence_inc
        self.permanence_dec = permanence_dec
        self.cells_per_column = cells_per_column
        self.segment_activation_threshold = segment_activation_threshold
        self.initial_permanence = initial_permanence
        self.max_synapses_per_segment = max_synapses_per_segment
        self.reset_on_drift = reset_on_drift
        self.record_trace = record_trace
        self.seed = seed

    # -- config assembly -----------------------------------------------------

    def _sprt_config(self) -> SprtConfig:
        return SprtConfig(
            p_null=self.p_null,
            p_alt=self.p_alt,
            alpha=self.alpha,
            beta=self.beta,
            bin_threshold=self.bin_threshold,
        )

    def _lane_seed(self, dim: int, stream: int) -> int:
        # well-mixed deterministic per-dimension seeds
        return int(
            np.random.SeedSequence([int(self.seed), dim, stream]).generate_state(1)[0]
        )

    def _encoder_config(self, lo: float, hi: float) -> EncoderConfig:
        return EncoderConfig(
            min_value=lo, max_value=hi,
            n_bits=self.n_bits, active_bits=self.active_bits,
        )

    def _build_htm(self, dim: int, value_range: tuple) -> HtmCore:
        lo, hi = float(value_range[0]), float(value_range[1])
        return HtmCore(
            encoder=self._encoder_config(lo, hi),
            pooler=PoolerConfig(
                n_columns=self.n_columns,
                n_active_columns=self.n_active_columns,
                potential_fraction=self.potential_fraction,
                permanence_connected=self.permanence_connected,
                permanence_inc=self.permanence_inc,
                permanence_dec=self.permanence_dec,
                seed=self._lane_seed(dim, 0),
            ),
            temporal=TemporalConfig(
                cells_per_column=self.cells_per_column,
                segment_activation_threshold=self.segment_activation_threshold,
                initial_permanence=self.initial_permanence,
                permanence_connected=self.permanence_connected,
                permanence_inc=self.permanence_inc,
                permanence_dec=self.permanence_dec,
                max_synapses_per_segment=self.max_synapses_per_segment,
                seed=self._lane_seed(dim, 1),
            ),
        )

    def _validate(self):
        if self.score_mode not in SCORE_MODES:
            raise ConfigError(
                f"score_mode must be one of {SCORE_MODES}, got {self.score_mode!r}"
            )
        if self.window_size < 2:
            raise ConfigError("window_size must be >= 2")
        if self.k <= 0:
            raise ConfigError("k must be positive")
        if self.warmup_replays < 0:
            raise ConfigError("warmup_replays must be >= 0")
        if self.range_margin < 0:
            raise ConfigError("range_margin must be >= 0")
        if self.shift_crit < 0 or self.shift_crit_full < 0:
            raise ConfigError(
                "shift_crit and shift_crit_full must be >= 0 "
                "(shift_crit=0 disables the shift lift entirely, "
                "shift_crit_full=0 disables just the full-window horizon)"
            )
        if (
            self.shift_lag < 1 or self.shift_short < 1
            or self.shift_raw_horizon < 1 or self.shift_ref_count < 1
        ):
            raise ConfigError(
                "shift_lag, shift_short, shift_raw_horizon, shift_ref_count "
                "must be >= 1"
            )
        if not 0.0 <= self.shift_raw_floor <= 1.0:
            raise ConfigError("shift_raw_floor must lie in [0, 1]")
        if self.encoder_range is not None:
            lo, hi = self.encoder_range
            if not float(lo) < float(hi):
                raise ConfigError("encoder_range must be (low, high) with low < high")
        self._sprt_config()  # validates the test parameters

    # -- state construction ----------------------------------------------------

    def _init_lanes(self, n_dims: int) -> None:
        self._validate()
        if n_dims < 1:
            raise InputError("need at least one dimension")
        self.n_dims_ = n_dims
        sprt_cfg = self._sprt_config()
        self.lanes_ = []
        for dim in range(n_dims):
            lane = _Lane(
                window=RollingWindow(self.window_size),
                sprt=SprtMonitor(sprt_cfg),
                mean_snaps=deque(maxlen=self.shift_lag),
                raw_recent=deque(maxlen=self.shift_raw_horizon),
            )
            if self.encoder_range is not None:
                lane.resolved_range = (
                    float(self.encoder_range[0]),
                    float(self.encoder_range[1]),
                )
                lane.htm = self._build_htm(dim, lane.resolved_range)
            self.lanes_.append(lane)
        self.n_seen_ = 0
        self.events_ = []
        self.trace_ = [] if self.record_trace else None
        self.last_step_scores_ = np.zeros(n_dims)

    def reset(self) -> "HtmSprtDetector":
        """Drop all stream state; the next update starts a fresh run."""
        for attr in (
            "lanes_", "n_dims_", "n_seen_", "events_", "trace_",
            "windows_", "last_step_scores_",
        ):
            if hasattr(self, attr):
                delattr(self, attr)
        return self

    def _infer_range(self, warm_values) -> tuple:
        lo = float(min(warm_values))
        hi = float(max(warm_values))
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        span = hi - lo
        return lo - self.range_margin * span, hi + self.range_margin * span

    # -- main loop ---------------------------------------------------------------

    def update(self, values) -> list[DriftEvent]:
        """Consume one sample (scalar or length-d vector); return new events."""
        vec = np.atleast_1d(np.asarray(values, dtype=np.float64))
        if vec.ndim != 1:
            raise InputError(f"a sample must be a scalar or 1-d vector, got {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise InputError("sample contains non-finite values")
        if not hasattr(self, "lanes_"):
            self._init_lanes(vec.size)
        if vec.size != self.n_dims_:
            raise InputError(
                f"sample has {vec.size} dimensions, detector expects {self.n_dims_}"
            )

        t = self.n_seen_
        warm = t < self.window_size
        new_events: list[DriftEvent] = []
        decisions: list[Decision] = []
        decision_results = {}

        for dim, lane in enumerate(self.lanes_):
            v = float(vec[dim])
            if warm:
                self._warm_step(lane, dim, v, t)
                decisions.append(Decision.CONTINUE)
                continue
            if lane.htm is None:
                self._start_lane(lane, dim)
            sigma = max(lane.window.std(), self.sigma_floor)
            out = lane.htm.step(v)
            htm_t = self._compose_score(lane, out, v, sigma)
            lane.window.push(v)
            lane.raw_recent.append(out.raw_score)
            self._snapshot_window(lane)
            c = binarize(htm_t, self.bin_threshold)
            res = lane.sprt.step(c)
            self.last_step_scores_[dim] = htm_t
            decisions.append(res.decision)
            if res.decision is not Decision.CONTINUE:
                decision_results[dim] = res
                new_events.append(
                    DriftEvent(
                        global_time=t,
                        kind=(
                            EventKind.DRIFT_ONSET
                            if res.decision is Decision.DRIFT_DETECTED
                            else EventKind.NO_DRIFT_DECISION
                        ),
                        cm_at_decision=res.cm,
                        upper_limit=res.upper,
                        lower_limit=res.lower,
                        dimension=dim,
                    )
                )
            lane.pending_pred = out.predicted_value
            lane.pending_empty = out.prediction_empty
            if self.trace_ is not None:
                self.trace_.append(
                    {
                        "t": t, "dim": dim,
                        "htm_raw": out.raw_score, "htm_t": htm_t, "c": c,
                        "cm": res.cm, "lower": res.lower, "upper": res.upper,
                    }
                )

        if not warm and self.combine:
            combined = combine_decisions(decisions)
            if combined is not Decision.CONTINUE:
                # carry the triggering dimension's numbers: the first drifting
                # dimension, or the first one for a unanimous no-drift
                if combined is Decision.DRIFT_DETECTED:
                    src_dim = min(
                        d for d, r in decision_results.items()
                        if r.decision is Decision.DRIFT_DETECTED
                    )
                else:
                    src_dim = min(decision_results)
                src = decision_results[src_dim]
                combined_event = DriftEvent(
                    global_time=t,
                    kind=(
                        EventKind.DRIFT_ONSET
                        if combined is Decision.DRIFT_DETECTED
                        else EventKind.NO_DRIFT_DECISION
                    ),
                    cm_at_decision=src.cm,
                    upper_limit=src.upper,
                    lower_limit=src.lower,
                    dimension=None,
                )
                new_events.append(combined_event)
                if (
                    self.reset_on_drift
                    and combined is Decision.DRIFT_DETECTED
                ):
                    self._reset_htms()

        self.n_seen_ += 1
        self.events_.extend(new_events)
        return new_events

    def _warm_step(self, lane: _Lane, dim: int, v: float, t: int) -> None:
        raw = None
        if lane.htm is not None:
            out = lane.htm.step(v)
            raw = out.raw_score
            lane.pending_pred = out.predicted_value
            lane.pending_empty = out.prediction_empty
            lane.raw_recent.append(raw)
        else:
            lane.warm_values.append(v)
        lane.window.push(v)
        # reference snapshots must always come from full windows
        if len(lane.window) == self.window_size:
            self._snapshot_window(lane)
        self.last_step_scores_[dim] = 0.0
        if self.trace_ is not None:
            lo, up = sprt_limits(lane.sprt.config, lane.sprt.t)
            self.trace_.append(
                {
                    "t": t, "dim": dim,
                    "htm_raw": raw, "htm_t": 0.0, "c": 0,
                    "cm": lane.sprt.cm, "lower": lo, "upper": up,
                }
            )

    def _start_lane(self, lane: _Lane, dim: int) -> None:
        """First post-warm-up step in inferred-range mode: freeze and seed."""
        lane.resolved_range = self._infer_range(lane.warm_values)
        lane.htm = self._build_htm(dim, lane.resolved_range)
        for _ in range(self.warmup_replays):
            for v in lane.warm_values:
                out = lane.htm.step(v)
                lane.pending_pred = out.predicted_value
                lane.pending_empty = out.prediction_empty
        lane.warm_values = []

    def _compose_score(self, lane: _Lane, out, v: float, sigma: float) -> float:
        if self.score_mode == "raw":
            base = out.raw_score
        else:
            value_score = None
            if lane.pending_pred is not None:
                value_score = rescale_score(
                    lane.pending_pred, v, sigma, k=self.k, sigma_floor=self.sigma_floor
                )
            if self.score_mode == "rescaled":
                base = value_score if value_score is not None else 0.0
            # gated: require both channels to flag; an absent or empty
            # previous prediction leaves only the structural channel
            elif value_score is None or lane.pending_empty:
                base = out.raw_score
            else:
                base = min(out.raw_score, value_score)
        if self.shift_crit > 0 and self._shift_lift(lane, v):
            return 1.0
        return base

    def _shift_lift(self, lane: _Lane, v: float) -> bool:
        """Level-shift escalation: recent mean far from a lagged reference.

        Online sequence models re-learn a shifted regime within a couple of
        dozen steps, which caps how long the per-step channels stay hot. This
        lift compares recent means against a reference recorded roughly
        `shift_lag` steps earlier, normalized like a two-sample z statistic,
        and saturates the score while the gap stays extreme.

        Two mean horizons are checked: the last `shift_short` observations
        react within a few steps of a break, and the full current window adds
        power once it has mostly filled with post-break values. The full
        window gets its own, stricter cut (`shift_crit_full`): its statistic
        decorrelates over ~window_size steps, so an ordinary-noise excursion
        above a loose cut would stay hot long enough to push a sequential
        test over its boundary, while a genuine break clears the stricter cut
        easily (its gap is several reference deviations, not a fraction of
        one). The reference
        mean and deviation are medians over the `shift_ref_count` oldest
        window snapshots, which damps the sampling noise a single snapshot
        would carry; using the *lagged* deviation matters because the current
        rolling deviation spans the break right after a shift and would mute
        the statistic exactly when it is needed. The lift is gated on the
        model's trailing unpredictedness so streams whose mean moves along a
        well-learned trajectory do not trip it.
        """
        if not lane.mean_snaps:
            return False
        if self.shift_raw_floor > 0.0:
            if not lane.raw_recent:
                return False
            raw_mean = sum(lane.raw_recent) / len(lane.raw_recent)
            if raw_mean < self.shift_raw_floor:
                return False
        ref = list(islice(lane.mean_snaps, min(self.shift_ref_count, len(lane.mean_snaps))))
        mu_ref = float(np.median([m for m, _ in ref]))
        sigma_ref = max(float(np.median([s for _, s in ref])), self.sigma_floor)
        vals = lane.window.values()
        scales = (
            (self.shift_short, self.shift_crit),
            (self.window_size, self.shift_crit_full),
        )
        for span, crit in scales:
            if crit <= 0.0:
                continue
            tail = vals[-(span - 1):] if span > 1 else vals[:0]
            m = (float(np.sum(tail)) + v) / (len(tail) + 1)
            norm = sigma_ref * math.sqrt(1.0 / (len(tail) + 1) + 1.0 / self.window_size)
            if abs(m - mu_ref) / norm > crit:
                return True
        return False

    @staticmethod
    def _snapshot_window(lane: _Lane) -> None:
        vals = lane.window.values()
        lane.mean_snaps.append(
            (float(np.mean(vals)), float(np.std(vals, ddof=1)))
        )

    def _reset_htms(self) -> None:
        for dim, lane in enumerate(self.lanes_):
            if lane.htm is not None and lane.resolved_range is not None:
                lane.htm = self._build_htm(dim, lane.resolved_range)
                lane.pending_pred = None
                lane.pending_empty = True
                lane.raw_recent.clear()

    # -- batch API -----------------------------------------------------------------

    def fit(self, X, y=None):
        """Run the whole array as one stream; stores events_ and windows_."""
        self.reset()
        X = np.asarray(X, dtype=np.float64)
        rows = X.reshape(-1, 1) if X.ndim == 1 else X
        if rows.ndim != 2:
            raise InputError(f"X must be 1- or 2-dimensional, got shape {X.shape}")
        if rows.shape[0] == 0:
            raise InputError("X is empty")
        for row in rows:
            self.update(row)
        self.windows_ = drift_windows(self.events_)
        return self

    def fit_transform(self, X, y=None) -> np.ndarray:
        """Single online pass; returns the per-step normalized scores (n, d)."""
        self.reset()
        X = np.asarray(X, dtype=np.float64)
        rows = X.reshape(-1, 1) if X.ndim == 1 else X
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise InputError("X must be a nonempty 1- or 2-d array")
        scores = np.zeros_like(rows)
        for i, row in enumerate(rows):
            self.update(row)
            scores[i] = self.last_step_scores_
        self.windows_ = drift_windows(self.events_)
        return scores

    @property
    def drift_onsets_(self) -> np.ndarray:
        """Combined drift-onset times seen so far."""
        key = [
            e.global_time
            for e in getattr(self, "events_", [])
            if e.kind is EventKind.DRIFT_ONSET and e.dimension is None
        ]
        return np.asarray(key, dtype=np.int64)

    # -- checkpointing ----------------------------------------------------------------

    def save(self, path) -> None:
        """Serialize parameters and full stream state to an .npz file."""
        if not hasattr(self, "lanes_"):
            raise InputError("detector has no stream state to save yet")
        params = self.get_params()
        if params["encoder_range"] is not None:
            params["encoder_range"] = list(params["encoder_range"])
        meta = {
            "version": _STATE_VERSION,
            "params": params,
            "n_seen": self.n_seen_,
            "n_dims": self.n_dims_,
            "lanes": [
                {
                    "sprt": lane.sprt.state(),
                    "pending_pred": lane.pending_pred,
                    "pending_empty": lane.pending_empty,
                    "resolved_range": (
                        list(lane.resolved_range) if lane.resolved_range else None
                    ),
                    "has_htm": lane.htm is not None,
                }
                for lane in self.lanes_
            ],
        }
        arrays = {"meta": np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)}
        for i, lane in enumerate(self.lanes_):
            arrays[f"lane{i}_window"] = lane.window.values()
            arrays[f"lane{i}_warm"] = np.asarray(lane.warm_values, dtype=np.float64)
            arrays[f"lane{i}_snaps"] = (
                np.asarray(list(lane.mean_snaps), dtype=np.float64).reshape(-1, 2)
            )
            arrays[f"lane{i}_rawrec"] = np.asarray(lane.raw_recent, dtype=np.float64)
            if lane.htm is not None:
                arrays[f"lane{i}_htm"] = np.frombuffer(
                    lane.htm.save_bytes(), dtype=np.uint8
                )
        buf = io.BytesIO()
        np.savez(buf, **arrays)
        with open(path, "wb") as fh:
            fh.write(buf.getvalue())

    @classmethod
    def load(cls, path) -> "HtmSprtDetector":
        """Rebuild a detector that continues exactly where `save` left off."""
        try:
            with np.load(path) as data:
                arrays = {k: data[k] for k in data.files}
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot load detector state from {path}: {exc}") from None
        if "meta" not in arrays:
            raise InputError(f"{path} is not a detector state file")
        meta = json.loads(bytes(arrays["meta"]).decode())
        if meta.get("version") != _STATE_VERSION:
            raise InputError(f"unsupported state version {meta.get('version')}")
        params = dict(meta["params"])
        if params.get("encoder_range") is not None:
            params["encoder_range"] = tuple(params["encoder_range"])
        det = cls(**params)
        det._init_lanes(int(meta["n_dims"]))
        det.n_seen_ = int(meta["n_seen"])
        for i, lane_meta in enumerate(meta["lanes"]):
            lane = det.lanes_[i]
            lane.sprt.load_state(lane_meta["sprt"])
            lane.pending_pred = lane_meta["pending_pred"]
            lane.pending_empty = bool(lane_meta["pending_empty"])
            lane.resolved_range = (
                tuple(lane_meta["resolved_range"])
                if lane_meta["resolved_range"]
                else None
            )
            lane.window.load_values(arrays[f"lane{i}_window"])
            lane.warm_values = list(arrays[f"lane{i}_warm"])
            lane.mean_snaps.extend(
                (float(m), float(s)) for m, s in arrays[f"lane{i}_snaps"]
            )
            lane.raw_recent.extend(float(x) for x in arrays[f"lane{i}_rawrec"])
            if lane_meta["has_htm"]:
                lane.htm = HtmCore.load_bytes(bytes(arrays[f"lane{i}_htm"]))
            else:
                lane.htm = None
        return det


def run_stream(values, **detector_params):
    """One-shot convenience: build a detector, run it, return (events, windows)."""
    det = HtmSprtDetector(**detector_params)
    det.fit(values)
    return det.events_, det.windows_
