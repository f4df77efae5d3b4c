"""Spatial pooler: overlap competition over columns with Hebbian updates.

Each column owns a seeded random "potential pool" of input bits and a
permanence value per pooled bit. A synapse is connected when its permanence
reaches `permanence_connected`; a column's overlap with an input is the
number of connected synapses onto active bits. The `n_active_columns`
highest-overlap columns win (global inhibition, ties to the lower index),
and with learning enabled the winners strengthen synapses onto active bits
and weaken synapses onto inactive ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, InputError
from .sdr import Sdr


@dataclass(frozen=True)
class PoolerConfig:
    n_columns: int = 1024
    n_active_columns: int = 20
    potential_fraction: float = 0.5
    permanence_connected: float = 0.5
    permanence_inc: float = 0.05
    permanence_dec: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.n_columns <= 0 or self.n_active_columns <= 0:
            raise ConfigError("n_columns and n_active_columns must be positive")
        if self.n_active_columns >= self.n_columns:
            raise ConfigError("n_active_columns must be smaller than n_columns")
        if not 0.0 < self.potential_fraction <= 1.0:
            raise ConfigError("potential_fraction must lie in (0, 1]")
        if not 0.0 < self.permanence_connected < 1.0:
            raise ConfigError("permanence_connected must lie in (0, 1)")
        if self.permanence_inc <= 0 or self.permanence_dec <= 0:
            raise ConfigError("permanence increments must be positive")


class SpatialPooler:
    """Columns-by-inputs permanence matrix with global-inhibition competition."""

    def __init__(self, config: PoolerConfig, n_inputs: int):
        if n_inputs <= 0:
            raise ConfigError(f"n_inputs must be positive, got {n_inputs}")
        self.config = config
        self.n_inputs = int(n_inputs)

        rng = np.random.default_rng(config.seed)
        n_potential = max(1, int(round(config.potential_fraction * n_inputs)))
        potential = np.zeros((config.n_columns, n_inputs), dtype=bool)
        for col in range(config.n_columns):
            pool = rng.choice(n_inputs, size=n_potential, replace=False)
            potential[col, pool] = True

        # Permanences start uniformly spread around the connection threshold so
        # roughly half of each pool is connected before any learning.
        perms = rng.uniform(
            config.permanence_connected - 0.1,
            config.permanence_connected + 0.1,
            size=(config.n_columns, n_inputs),
        )
        perms = np.clip(perms, 0.0, 1.0)
        perms[~potential] = 0.0

        self.potential = potential
        self.permanences = perms
        self.connected = potential & (perms >= config.permanence_connected)
        # Columns whose connectivity changed since the last cache sync; consumed
        # by whoever maintains decode caches on top of this pooler.
        self._changed_mask = np.zeros(config.n_columns, dtype=bool)

    def compute(self, input_sdr: Sdr, learn: bool = True) -> Sdr:
        """Return the winning columns for one input, optionally learning."""
        if input_sdr.width != self.n_inputs:
            raise InputError(
                f"input width {input_sdr.width} != expected {self.n_inputs}"
            )
        active = input_sdr.active
        if active.size:
            overlap = self.connected[:, active].sum(axis=1)
        else:
            overlap = np.zeros(self.config.n_columns, dtype=np.int64)
        # Stable sort on negated overlap: equal overlaps keep index order,
        # which realizes the lowest-index tie-break.
        order = np.argsort(-overlap, kind="stable")
        winners = np.sort(order[: self.config.n_active_columns]).astype(np.int64)
        if learn:
            self._learn(winners, active)
        return Sdr._trusted(self.config.n_columns, winners)

    def _learn(self, winners: np.ndarray, active_bits: np.ndarray) -> None:
        cfg = self.config
        active_mask = np.zeros(self.n_inputs, dtype=bool)
        active_mask[active_bits] = True
        delta = np.where(active_mask, cfg.permanence_inc, -cfg.permanence_dec)

        pool = self.potential[winners]
        rows = self.permanences[winners]
        rows = np.clip(rows + delta * pool, 0.0, 1.0)
        self.permanences[winners] = rows

        new_connected = pool & (rows >= cfg.permanence_connected)
        changed = (new_connected != self.connected[winners]).any(axis=1)
        if changed.any():
            self.connected[winners] = new_connected
            self._changed_mask[winners[changed]] = True

    def consume_connectivity_changes(self) -> np.ndarray:
        """Columns whose connected sets changed since the last call; resets the flag."""
        changed = np.flatnonzero(self._changed_mask)
        if changed.size:
            self._changed_mask[:] = False
        return changed

    # -- serialization ---------------------------------------------------

    def state_arrays(self) -> dict:
        # The changed-columns mask is derived bookkeeping for decode caches and
        # is deliberately not serialized: loaders rebuild caches from scratch.
        return {
            "pooler_potential": np.packbits(self.potential, axis=1),
            "pooler_permanences": self.permanences,
        }

    def load_state_arrays(self, arrays: dict) -> None:
        n_cols = self.config.n_columns
        self.potential = np.unpackbits(
            arrays["pooler_potential"], axis=1, count=self.n_inputs
        ).astype(bool)
        self.permanences = np.asarray(arrays["pooler_permanences"], dtype=np.float64)
        if self.permanences.shape != (n_cols, self.n_inputs):
            raise InputError("pooler permanence array has the wrong shape")
        self.connected = self.potential & (
            self.permanences >= self.config.permanence_connected
        )
        self._changed_mask = np.zeros(n_cols, dtype=bool)
