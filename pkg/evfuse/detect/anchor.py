"""Box template of the detection head."""

from __future__ import annotations

from attrs import field, frozen, validators


@frozen(slots=True)
class Anchor:
    """Width and height template regressed by the detection head.

    Attributes:
        w: Anchor width in image pixels.
        h: Anchor height in image pixels.
    """

    w: float = field(converter=float, validator=validators.gt(0))
    h: float = field(converter=float, validator=validators.gt(0))

    def shape_iou(self, w: float, h: float) -> float:
        """IoU of the anchor and a ``w x h`` box sharing its center."""
        inter = min(self.w, w) * min(self.h, h)
        return inter / (self.w * self.h + w * h - inter)
