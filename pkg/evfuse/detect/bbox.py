"""Axis aligned box in image pixels."""

from __future__ import annotations

import math
from typing import Sequence

from attrs import field, frozen


@frozen(slots=True)
class BBox:
    """Axis aligned box given by its corners.

    Attributes:
        x_min: Left edge.
        y_min: Top edge.
        x_max: Right edge, strictly greater than ``x_min``.
        y_max: Bottom edge, strictly greater than ``y_min``.
    """

    x_min: float = field(converter=float)
    y_min: float = field(converter=float)
    x_max: float = field(converter=float)
    y_max: float = field(converter=float)

    def __attrs_post_init__(self) -> None:
        values = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"Box has non-finite corners: {values}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"Degenerate box {values}")

    @classmethod
    def of(cls, value: "BBox | Sequence[float]") -> "BBox":
        """Return ``value`` as a box, accepting ``[x0, y0, x1, y1]``."""
        if isinstance(value, BBox):
            return value
        if len(value) != 4:
            raise ValueError(f"Box needs 4 values, got {len(value)}")
        return cls(*value)

    @classmethod
    def from_center(cls, cx: float, cy: float, w: float, h: float) -> "BBox":
        """Build a box from its center and size."""
        return cls(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def as_list(self) -> list[float]:
        """Corners as ``[x_min, y_min, x_max, y_max]``."""
        return [self.x_min, self.y_min, self.x_max, self.y_max]
