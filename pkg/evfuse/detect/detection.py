"""Decoded detection with scores and class label."""

from __future__ import annotations

from typing import Any

from attrs import field, frozen

from .bbox import BBox

NUM_CLASSES = 3

# Display names of the class ids.
CLASS_NAMES = {1: "person", 2: "bicycle", 3: "animal"}


def _scores(value: object) -> tuple[float, ...]:
    return tuple(float(v) for v in value)  # type: ignore[attr-defined]


@frozen(slots=True)
class Detection:
    """Box predicted by the detection head.

    Attributes:
        box: Corner box in image pixels.
        objectness: Object probability in ``(0, 1)``.
        class_scores: Per-class probabilities in ``(0, 1)``.
        class_id: One based index of the best class score.
        confidence: ``objectness * max(class_scores)``.
    """

    box: BBox = field(converter=BBox.of)
    objectness: float = field(converter=float)
    class_scores: tuple[float, ...] = field(converter=_scores)
    class_id: int = field(converter=int)
    confidence: float = field(converter=float)

    def __attrs_post_init__(self) -> None:
        if len(self.class_scores) != NUM_CLASSES:
            raise ValueError(
                f"Expected {NUM_CLASSES} class scores, got "
                f"{len(self.class_scores)}"
            )
        probs = (self.objectness, self.confidence, *self.class_scores)
        if not all(0.0 < v < 1.0 for v in probs):
            raise ValueError(f"Probabilities must lie in (0, 1): {probs}")
        best = max(range(NUM_CLASSES), key=lambda c: self.class_scores[c])
        if self.class_id != best + 1:
            raise ValueError(
                f"class_id {self.class_id} is not the best scoring class "
                f"{best + 1}"
            )

    @property
    def class_name(self) -> str:
        """Display name of the class."""
        return CLASS_NAMES.get(self.class_id, str(self.class_id))

    def to_dict(self) -> dict[str, Any]:
        """Return the JSON representation."""
        return {
            "box": self.box.as_list(),
            "class": self.class_id,
            "objectness": self.objectness,
            "scores": list(self.class_scores),
            "confidence": self.confidence,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Detection":
        """Build a detection from its JSON representation.

        Throws:
            ValueError: On missing keys or invalid values.
        """

        try:
            return cls(
                box=data["box"],
                objectness=data["objectness"],
                class_scores=data["scores"],
                class_id=data["class"],
                confidence=data["confidence"],
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"Invalid detection record {data!r}") from exc
