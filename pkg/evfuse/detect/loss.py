"""Detection loss over the feature pyramid.

Per scale the loss is ``5 L_box + 10 L_obj + L_cls``:

- ``L_box`` is the mean squared error of
  ``(sigmoid(t_x), sigmoid(t_y), t_w, t_h)`` over positive anchors,
- ``L_obj`` the mean squared error of ``sigmoid(t_obj)`` against 1 for
  positives and 0 for every other anchor,
- ``L_cls`` the mean squared error of the class sigmoids against the one-hot
  label over positive anchors.

Means without positives are 0.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from attrs import field, frozen, validators

from evfuse.numeric import sigmoid

from .raw_prediction import RawPrediction
from .targets import DetectionTargets


@frozen
class LossWeights:
    """Weights of the three loss terms."""

    box: float = field(default=5.0, validator=validators.ge(0))
    obj: float = field(default=10.0, validator=validators.ge(0))
    cls: float = field(default=1.0, validator=validators.ge(0))


class DetectionLoss(NamedTuple):
    """Weighted total and the unweighted terms summed over scales."""

    total: float
    box: float
    obj: float
    cls: float


def _mean_or_zero(values: np.ndarray) -> float:
    return float(np.mean(values)) if values.size else 0.0


def detection_loss(
    raw: RawPrediction,
    targets: DetectionTargets,
    weights: LossWeights = LossWeights(),
) -> DetectionLoss:
    """Evaluate the detection loss.

    Args:
        raw: Raw head outputs.
        targets: Assigned targets with the same scales and grid shapes.
        weights: Term weights.

    Returns:
        ``(total, box, obj, cls)``.

    Throws:
        ValueError: If scales or grid shapes differ.
    """

    if set(raw.scales) != set(targets.levels):
        raise ValueError(
            f"Scales differ: {raw.scales} vs {sorted(targets.levels)}"
        )

    total = box = obj = cls = 0.0
    for scale in raw.scales:
        grid = raw.level(scale)
        level = targets.levels[scale]
        if grid.shape[:3] != level.positive.shape:
            raise ValueError(
                f"Scale {scale}: predictions {grid.shape[:3]} vs targets "
                f"{level.positive.shape}"
            )

        # Offsets go through the sigmoid, size logits are compared raw.
        pos = level.positive
        predicted_box = np.concatenate(
            (sigmoid(grid[..., 0:2]), grid[..., 2:4]), axis=-1
        )

        # Box and class errors only count at positive anchors; objectness
        # is scored everywhere.
        l_box = _mean_or_zero((predicted_box[pos] - level.box[pos]) ** 2)
        l_obj = _mean_or_zero((sigmoid(grid[..., 4]) - pos) ** 2)
        l_cls = _mean_or_zero(
            (sigmoid(grid[..., 5:])[pos] - level.classes[pos]) ** 2
        )

        # Weighted total; the terms are reported unweighted.
        total += (
            weights.box * l_box + weights.obj * l_obj + weights.cls * l_cls
        )
        box += l_box
        obj += l_obj
        cls += l_cls

    return DetectionLoss(total, box, obj, cls)
