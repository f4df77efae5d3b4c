"""Temporal memory: sequence context via per-cell distal segments.

Cells live in columns (`cells_per_column` each). When a column becomes
active and some of its cells were predicted, exactly those cells activate;
with no prediction the whole column bursts. A distal segment belongs to one
cell and holds synapses onto other cells; when at least
`segment_activation_threshold` of its connected synapses point at currently
active cells, its owner cell turns predictive, and predicted columns are the
columns holding at least one predictive cell.

Learning is Hebbian and local:

* segments that were active last step and whose owner column is active now
  (they predicted correctly) strengthen synapses onto the previously active
  cells and weaken the rest;
* every bursting column grows one new segment on its least-used cell,
  wired to the previous step's winner cells at `initial_permanence`.

Winner cells carry the sequence identity between steps: the predictive
cells of a predicted column, or the least-used cell of a bursting column.
Growing synapses onto winners (rather than the full burst) is what lets a
repeated transition become predictive after a single repetition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, InputError
from .sdr import Sdr

_GROW = 256  # initial segment capacity; doubles on demand


@dataclass(frozen=True)
class TemporalConfig:
    cells_per_column: int = 8
    segment_activation_threshold: int = 13
    initial_permanence: float = 0.55
    permanence_connected: float = 0.5
    permanence_inc: float = 0.05
    permanence_dec: float = 0.01
    max_synapses_per_segment: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.cells_per_column <= 0:
            raise ConfigError("cells_per_column must be positive")
        if self.segment_activation_threshold <= 0:
            raise ConfigError("segment_activation_threshold must be positive")
        if self.max_synapses_per_segment <= 0:
            raise ConfigError("max_synapses_per_segment must be positive")
        if self.segment_activation_threshold > self.max_synapses_per_segment:
            raise ConfigError(
                "segment_activation_threshold cannot exceed max_synapses_per_segment"
            )
        for name in ("initial_permanence", "permanence_connected"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1)")
        if self.permanence_inc <= 0 or self.permanence_dec <= 0:
            raise ConfigError("permanence increments must be positive")


class TemporalMemory:
    def __init__(self, config: TemporalConfig, n_columns: int):
        if n_columns <= 0:
            raise ConfigError(f"n_columns must be positive, got {n_columns}")
        self.config = config
        self.n_columns = int(n_columns)
        self.n_cells = self.n_columns * config.cells_per_column
        self.rng = np.random.default_rng(config.seed)

        m = config.max_synapses_per_segment
        self.seg_owner = np.full(_GROW, -1, dtype=np.int32)
        self.seg_pre = np.full((_GROW, m), -1, dtype=np.int32)
        self.seg_perm = np.zeros((_GROW, m), dtype=np.float64)
        self.n_segments = 0
        self.cell_n_segments = np.zeros(self.n_cells, dtype=np.int32)

        self.prev_predictive = np.zeros(self.n_cells, dtype=bool)
        self.prev_active = np.zeros(self.n_cells, dtype=bool)
        self.prev_winners = np.empty(0, dtype=np.int32)
        self.prev_active_segments = np.empty(0, dtype=np.int64)

    # -- stepping ----------------------------------------------------------

    def step(self, active_columns: Sdr, learn: bool = True) -> Sdr:
        """Consume one column SDR; return the columns predicted for the next step."""
        if active_columns.width != self.n_columns:
            raise InputError(
                f"active_columns width {active_columns.width} != {self.n_columns}"
            )
        cfg = self.config
        cpc = cfg.cells_per_column
        cols = active_columns.active

        # Cell activation: predicted cells fire, unpredicted columns burst.
        cells_mat = (cols[:, None] * cpc + np.arange(cpc)[None, :]).astype(np.int32)
        pred_mat = self.prev_predictive[cells_mat]
        col_predicted = pred_mat.any(axis=1)

        predicted_cells = cells_mat[col_predicted][pred_mat[col_predicted]]
        burst_cells_mat = cells_mat[~col_predicted]
        active_cells = np.concatenate([predicted_cells, burst_cells_mat.ravel()])
        active_mask = np.zeros(self.n_cells, dtype=bool)
        active_mask[active_cells] = True

        # Winner cells: the predictive cells, plus the least-used cell of each
        # bursting column (ties to the lower cell index via argmin).
        if burst_cells_mat.size:
            usage = self.cell_n_segments[burst_cells_mat]
            least_used = burst_cells_mat[
                np.arange(burst_cells_mat.shape[0]), usage.argmin(axis=1)
            ]
        else:
            least_used = np.empty(0, dtype=np.int32)
        winners = np.concatenate([predicted_cells, least_used]).astype(np.int32)

        if learn:
            self._reinforce(cols)
            self._grow(least_used)

        # Predictive evaluation runs after learning so a transition stored this
        # step can already predict within the same step.
        active_segments, predictive_mask = self._evaluate(active_mask)
        predicted_cols = np.unique(
            self.seg_owner[active_segments] // cpc
        ).astype(np.int64)

        if learn:
            self.prev_predictive = predictive_mask
            self.prev_active = active_mask
            self.prev_winners = winners
            self.prev_active_segments = active_segments

        return Sdr._trusted(self.n_columns, predicted_cols)

    def _reinforce(self, current_cols: np.ndarray) -> None:
        """Strengthen segments that predicted a currently-active column."""
        segs = self.prev_active_segments
        if not segs.size:
            return
        cfg = self.config
        owner_cols = self.seg_owner[segs] // cfg.cells_per_column
        correct = segs[np.isin(owner_cols, current_cols)]
        if not correct.size:
            return
        pre = self.seg_pre[correct]
        valid = pre >= 0
        hit = np.zeros_like(valid)
        hit[valid] = self.prev_active[pre[valid]]
        delta = np.where(hit, cfg.permanence_inc, -cfg.permanence_dec) * valid
        self.seg_perm[correct] = np.clip(self.seg_perm[correct] + delta, 0.0, 1.0)

    def _grow(self, grow_cells: np.ndarray) -> None:
        """Add one segment per bursting column, wired to last step's winners."""
        src = self.prev_winners
        if not grow_cells.size or not src.size:
            return
        cfg = self.config
        m = cfg.max_synapses_per_segment
        n_new = grow_cells.size
        while self.n_segments + n_new > self.seg_owner.size:
            self._grow_capacity()

        rows = np.arange(self.n_segments, self.n_segments + n_new)
        self.seg_owner[rows] = grow_cells
        if src.size <= m:
            self.seg_pre[rows, : src.size] = src
            self.seg_pre[rows, src.size:] = -1
            self.seg_perm[rows, : src.size] = cfg.initial_permanence
            self.seg_perm[rows, src.size:] = 0.0
        else:
            for r, cell in zip(rows, grow_cells):
                pick = self.rng.choice(src, size=m, replace=False)
                self.seg_pre[r] = np.sort(pick)
                self.seg_perm[r] = cfg.initial_permanence
        self.n_segments += n_new
        np.add.at(self.cell_n_segments, grow_cells, 1)

    def _evaluate(self, active_mask: np.ndarray):
        """Active segments (>= threshold connected synapses onto active cells)."""
        s = self.n_segments
        if s == 0:
            return np.empty(0, dtype=np.int64), np.zeros(self.n_cells, dtype=bool)
        cfg = self.config
        pre = self.seg_pre[:s]
        connected = (pre >= 0) & (self.seg_perm[:s] >= cfg.permanence_connected)
        hits = connected & active_mask[np.maximum(pre, 0)]
        counts = hits.sum(axis=1)
        active_segments = np.flatnonzero(
            counts >= cfg.segment_activation_threshold
        ).astype(np.int64)
        predictive = np.zeros(self.n_cells, dtype=bool)
        predictive[self.seg_owner[active_segments]] = True
        return active_segments, predictive

    def _grow_capacity(self) -> None:
        cap = self.seg_owner.size
        m = self.config.max_synapses_per_segment
        self.seg_owner = np.concatenate(
            [self.seg_owner, np.full(cap, -1, dtype=np.int32)]
        )
        self.seg_pre = np.vstack([self.seg_pre, np.full((cap, m), -1, dtype=np.int32)])
        self.seg_perm = np.vstack([self.seg_perm, np.zeros((cap, m))])

    # -- serialization -----------------------------------------------------

    def state_arrays(self) -> dict:
        s = self.n_segments
        return {
            "tm_seg_owner": self.seg_owner[:s].copy(),
            "tm_seg_pre": self.seg_pre[:s].copy(),
            "tm_seg_perm": self.seg_perm[:s].copy(),
            "tm_cell_n_segments": self.cell_n_segments.copy(),
            "tm_prev_predictive": np.packbits(self.prev_predictive),
            "tm_prev_active": np.packbits(self.prev_active),
            "tm_prev_winners": self.prev_winners.copy(),
            "tm_prev_active_segments": self.prev_active_segments.copy(),
            "tm_rng": np.frombuffer(
                json.dumps(self.rng.bit_generator.state).encode(), dtype=np.uint8
            ),
        }

    def load_state_arrays(self, arrays: dict) -> None:
        m = self.config.max_synapses_per_segment
        owner = np.asarray(arrays["tm_seg_owner"], dtype=np.int32)
        pre = np.asarray(arrays["tm_seg_pre"], dtype=np.int32)
        perm = np.asarray(arrays["tm_seg_perm"], dtype=np.float64)
        if pre.shape != (owner.size, m) or perm.shape != pre.shape:
            raise InputError("temporal-memory segment arrays have mismatched shapes")
        cap = max(_GROW, owner.size)
        self.seg_owner = np.full(cap, -1, dtype=np.int32)
        self.seg_pre = np.full((cap, m), -1, dtype=np.int32)
        self.seg_perm = np.zeros((cap, m), dtype=np.float64)
        self.seg_owner[: owner.size] = owner
        self.seg_pre[: owner.size] = pre
        self.seg_perm[: owner.size] = perm
        self.n_segments = int(owner.size)
        self.cell_n_segments = np.asarray(
            arrays["tm_cell_n_segments"], dtype=np.int32
        ).copy()
        self.prev_predictive = np.unpackbits(
            arrays["tm_prev_predictive"], count=self.n_cells
        ).astype(bool)
        self.prev_active = np.unpackbits(
            arrays["tm_prev_active"], count=self.n_cells
        ).astype(bool)
        self.prev_winners = np.asarray(arrays["tm_prev_winners"], dtype=np.int32).copy()
        self.prev_active_segments = np.asarray(
            arrays["tm_prev_active_segments"], dtype=np.int64
        ).copy()
        state = json.loads(bytes(arrays["tm_rng"]).decode())
        self.rng = np.random.default_rng()
        self.rng.bit_generator.state = state
