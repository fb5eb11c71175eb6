"""Annotated object box."""

from __future__ import annotations

from typing import Any

from attrs import field, frozen

from evfuse.detect import NUM_CLASSES, BBox


def _check_class(instance: object, attribute: object, value: int) -> None:
    if not 1 <= value <= NUM_CLASSES:
        raise ValueError(f"class_id must be in 1..{NUM_CLASSES}, got {value}")


@frozen(slots=True)
class GroundTruth:
    """Annotated object box.

    Attributes:
        box: Corner box in image pixels.
        class_id: Class id in ``1..3``.
    """

    box: BBox = field(converter=BBox.of)
    class_id: int = field(converter=int, validator=_check_class)

    def to_dict(self) -> dict[str, Any]:
        """Return the JSON representation."""
        return {"box": self.box.as_list(), "class": self.class_id}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GroundTruth":
        """Build a ground-truth box from its JSON representation.

        Throws:
            ValueError: On missing keys or invalid values.
        """

        try:
            return cls(box=data["box"], class_id=data["class"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"Invalid ground-truth record {data!r}") from exc
