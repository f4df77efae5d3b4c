"""Sparse distributed representation: a fixed-width set of active bit indices."""

from __future__ import annotations

import numpy as np

from ..errors import InputError


class Sdr:
    """Immutable-ish sparse bit vector.

    Stores the vector as its width plus a sorted, duplicate-free int64 array
    of active indices. Equality compares both.
    """

    __slots__ = ("width", "active")

    def __init__(self, width: int, active) -> None:
        width = int(width)
        if width <= 0:
            raise InputError(f"Sdr width must be positive, got {width}")
        arr = np.asarray(active, dtype=np.int64).ravel()
        if arr.size:
            arr = np.unique(arr)
            if arr[0] < 0 or arr[-1] >= width:
                raise InputError(
                    f"active indices out of range [0, {width}): "
                    f"min={arr[0]}, max={arr[-1]}"
                )
        self.width = width
        self.active = arr

    @classmethod
    def _trusted(cls, width: int, sorted_unique: np.ndarray) -> "Sdr":
        # Fast path for internal callers that guarantee sorted unique in-range
        # indices; skips validation.
        obj = object.__new__(cls)
        obj.width = width
        obj.active = sorted_unique
        return obj

    @property
    def n_active(self) -> int:
        return int(self.active.size)

    def overlap(self, other: "Sdr") -> int:
        """Number of indices active in both vectors."""
        if self.width != other.width:
            raise InputError(
                f"width mismatch: {self.width} vs {other.width}"
            )
        return int(
            np.intersect1d(self.active, other.active, assume_unique=True).size
        )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.width, dtype=bool)
        dense[self.active] = True
        return dense

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sdr):
            return NotImplemented
        return self.width == other.width and np.array_equal(self.active, other.active)

    def __hash__(self):
        return hash((self.width, self.active.tobytes()))

    def __len__(self) -> int:
        return self.width

    def __repr__(self) -> str:
        return f"Sdr(width={self.width}, active={self.active.tolist()})"
