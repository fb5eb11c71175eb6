"""Planar floating point image with a declared value domain."""

from __future__ import annotations

from enum import StrEnum

import numpy as np
from attrs import cmp_using, field, frozen


class ValueRange(StrEnum):
    """Value domain of an :class:`ImageTensor`."""

    BYTE = "byte"
    UNIT = "unit"


def _read_only(value: object) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    if array.ndim == 2:
        array = array[np.newaxis]
    array.setflags(write=False)
    return array


@frozen(slots=True)
class ImageTensor:
    """Planar floating point image with a declared value domain.

    Attributes:
        data: Pixel values of shape ``(C, H, W)``; a 2-D array is read as a
            single channel.
        value_range: ``BYTE`` for integer values in ``0..255``, ``UNIT`` for
            reals in ``[0, 1]``.
    """

    data: np.ndarray = field(
        converter=_read_only, eq=cmp_using(eq=np.array_equal), repr=False
    )
    value_range: ValueRange = field(converter=ValueRange)

    def __attrs_post_init__(self) -> None:
        if self.data.ndim != 3:
            raise ValueError(f"Image data must be (C, H, W), got "
                             f"{self.data.shape}")
        if self.data.size == 0:
            return
        if not np.all(np.isfinite(self.data)):
            raise ValueError("Image contains non-finite values")

        # Every value must respect the declared domain.
        low, high = float(self.data.min()), float(self.data.max())
        if self.value_range is ValueRange.BYTE:
            if low < 0 or high > 255:
                raise ValueError(f"Byte image values outside 0..255: "
                                 f"[{low}, {high}]")
            if not np.array_equal(self.data, np.round(self.data)):
                raise ValueError("Byte image values must be integers")
        elif low < 0 or high > 1:
            raise ValueError(f"Unit image values outside [0, 1]: "
                             f"[{low}, {high}]")

    @property
    def channels(self) -> int:
        """Number of channels ``C``."""
        return int(self.data.shape[0])

    @property
    def height(self) -> int:
        """Image height ``H``."""
        return int(self.data.shape[1])

    @property
    def width(self) -> int:
        """Image width ``W``."""
        return int(self.data.shape[2])

    def to_bytes_range(self) -> "ImageTensor":
        """Return a ``0..255`` version of the image.

        Unit images are scaled by 255 and rounded.
        """

        if self.value_range is ValueRange.BYTE:
            return self
        return ImageTensor(np.round(self.data * 255.0), ValueRange.BYTE)
