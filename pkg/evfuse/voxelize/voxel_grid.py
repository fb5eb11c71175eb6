"""Dense polarity-split temporal voxel grid."""

from __future__ import annotations

import numpy as np
from attrs import cmp_using, field, frozen, validators


def _read_only(value: object) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@frozen(slots=True)
class VoxelGrid:
    """Dense polarity-split temporal voxel grid.

    ``data`` has shape ``(2 * bins, height, width)``. Channel ``q * bins + b``
    holds temporal bin ``b`` of polarity block ``q``, negative polarity
    (``q = 0``) first. Values are accumulated and kept in double precision.

    Attributes:
        bins: Temporal bins per polarity.
        height: Grid height in pixels.
        width: Grid width in pixels.
        data: Non-negative event mass per channel and pixel.
    """

    bins: int = field(validator=validators.ge(2))
    height: int = field(validator=validators.gt(0))
    width: int = field(validator=validators.gt(0))
    data: np.ndarray = field(
        converter=_read_only, eq=cmp_using(eq=np.array_equal), repr=False
    )

    def __attrs_post_init__(self) -> None:
        expected = (2 * self.bins, self.height, self.width)
        if self.data.shape != expected:
            raise ValueError(
                f"Voxel data shape {self.data.shape} != {expected}"
            )
        if self.data.size and self.data.min() < 0:
            raise ValueError("Voxel grid entries must be non-negative")

    @classmethod
    def zeros(cls, bins: int, height: int, width: int) -> "VoxelGrid":
        """Return an all-zero grid of the given geometry."""
        return cls(bins, height, width, np.zeros((2 * bins, height, width)))

    @property
    def shape(self) -> tuple[int, int, int]:
        """Tensor shape ``(2B, H, W)``."""
        return (2 * self.bins, self.height, self.width)

    def channel_index(self, b: int, q: int) -> int:
        """Return the channel holding bin ``b`` of polarity block ``q``."""
        if not (0 <= b < self.bins and q in (0, 1)):
            raise IndexError(f"No channel for b={b}, q={q}")
        return q * self.bins + b

    def channel(self, b: int, q: int) -> np.ndarray:
        """Return the ``(H, W)`` plane of bin ``b`` and polarity ``q``."""
        return self.data[self.channel_index(b, q)]

    def channel_mass(self) -> np.ndarray:
        """Total mass of every channel, shape ``(2B,)``."""
        return self.data.sum(axis=(1, 2))

    def polarity_mass(self, q: int) -> float:
        """Total mass of polarity block ``q`` over all bins and pixels."""
        if q not in (0, 1):
            raise IndexError(f"Polarity block must be 0 or 1, got {q}")
        block = self.data[q * self.bins : (q + 1) * self.bins]
        return float(block.sum())

    def __add__(self, other: "VoxelGrid") -> "VoxelGrid":
        if self.shape != other.shape:
            raise ValueError(
                f"Cannot add grids of shape {self.shape} and {other.shape}"
            )
        return VoxelGrid(
            self.bins, self.height, self.width, self.data + other.data
        )
