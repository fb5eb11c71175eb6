"""Assignment of ground-truth boxes to anchors for the training loss."""

from __future__ import annotations

import logging
import math
from enum import StrEnum
from typing import Sequence

import numpy as np
from attrs import cmp_using, field, frozen

from .detection import NUM_CLASSES
from .types import AnchorTable, GridShapes, LabeledBox, StrideTable

logger = logging.getLogger(__name__)


class AssignStrategy(StrEnum):
    """How many anchors become positive for one ground-truth box."""

    # The single best anchor shape over all scales.
    BEST_ANCHOR = "best_anchor"
    # The best anchor shape at every scale.
    PER_SCALE = "per_scale"


def _array(dtype: type) -> object:
    def convert(value: object) -> np.ndarray:
        array = np.array(value, dtype=dtype, copy=True)
        array.setflags(write=False)
        return array

    return convert


@frozen
class LevelTargets:
    """Training targets of one pyramid scale.

    Attributes:
        positive: ``(H, W, A)`` mask of positive anchors.
        box: ``(H, W, A, 4)`` targets for
            ``(sigmoid(t_x), sigmoid(t_y), t_w, t_h)``; only read at
            positives.
        classes: ``(H, W, A, 3)`` one-hot class targets; only read at
            positives.
    """

    positive: np.ndarray = field(
        converter=_array(bool), eq=cmp_using(eq=np.array_equal), repr=False
    )
    box: np.ndarray = field(
        converter=_array(np.float64),
        eq=cmp_using(eq=np.array_equal),
        repr=False,
    )
    classes: np.ndarray = field(
        converter=_array(np.float64),
        eq=cmp_using(eq=np.array_equal),
        repr=False,
    )

    def __attrs_post_init__(self) -> None:
        if self.positive.ndim != 3:
            raise ValueError(f"Positive mask must be (H, W, A), got "
                             f"{self.positive.shape}")
        if self.box.shape != (*self.positive.shape, 4):
            raise ValueError(f"Box targets have shape {self.box.shape}")
        if self.classes.shape != (*self.positive.shape, NUM_CLASSES):
            raise ValueError(f"Class targets have shape {self.classes.shape}")

    @classmethod
    def empty(cls, height: int, width: int, anchors: int) -> "LevelTargets":
        """Targets with every anchor negative."""
        return cls(
            np.zeros((height, width, anchors), dtype=bool),
            np.zeros((height, width, anchors, 4)),
            np.zeros((height, width, anchors, NUM_CLASSES)),
        )

    @property
    def positives(self) -> int:
        """Number of positive anchors."""
        return int(np.count_nonzero(self.positive))


@frozen
class DetectionTargets:
    """Training targets of all scales.

    Attributes:
        levels: Targets keyed by pyramid scale.
    """

    levels: dict[int, LevelTargets]

    @property
    def positives(self) -> int:
        """Number of positive anchors over all scales."""
        return sum(level.positives for level in self.levels.values())


def _candidates(
    w: float,
    h: float,
    anchors: AnchorTable,
    scales: Sequence[int],
    strategy: AssignStrategy,
) -> list[tuple[int, int]]:
    """``(scale, anchor)`` pairs that become positive for a ``w x h`` box."""

    # Best anchor shape per scale, by IoU of boxes sharing one center.
    best_per_scale = []
    for scale in scales:
        ious = [a.shape_iou(w, h) for a in anchors[scale]]
        k = max(range(len(ious)), key=lambda n: ious[n])
        best_per_scale.append((ious[k], scale, k))

    if strategy is AssignStrategy.PER_SCALE:
        return [(scale, k) for _, scale, k in best_per_scale]

    # Ties go to the smaller scale, then the lower anchor index.
    _, scale, k = max(best_per_scale, key=lambda c: (c[0], -c[1], -c[2]))
    return [(scale, k)]


def assign_targets(
    gts: Sequence[LabeledBox],
    shapes: GridShapes,
    anchors: AnchorTable,
    strides: StrideTable,
    strategy: AssignStrategy | str = AssignStrategy.BEST_ANCHOR,
) -> DetectionTargets:
    """Mark the anchors responsible for each ground-truth box.

    A box is assigned at the cell containing its center. The anchor shape
    is chosen by the IoU of centered boxes. When two boxes claim the same
    anchor the first one keeps it.

    Args:
        gts: Ground-truth boxes with class ids ``1..3``.
        shapes: ``(H, W)`` of every scale.
        anchors: Anchor templates keyed by scale.
        strides: Pixels per cell keyed by scale.
        strategy: Assignment strategy.

    Returns:
        Targets for every scale in ``shapes``.

    Throws:
        ValueError: On unknown class ids or scales without anchors.
    """

    strategy = AssignStrategy(strategy)
    scales = sorted(shapes)
    for scale in scales:
        if scale not in anchors or scale not in strides:
            raise ValueError(f"Scale {scale} has no anchors or stride")

    positive = {
        s: np.zeros((*shapes[s], len(anchors[s])), dtype=bool) for s in scales
    }
    box = {s: np.zeros((*positive[s].shape, 4)) for s in scales}
    classes = {s: np.zeros((*positive[s].shape, NUM_CLASSES)) for s in scales}

    for gt in gts:
        if not 1 <= gt.class_id <= NUM_CLASSES:
            raise ValueError(f"Unknown class id {gt.class_id}")
        cx, cy = gt.box.center
        w, h = gt.box.width, gt.box.height

        for scale, k in _candidates(w, h, anchors, scales, strategy):
            # Cell holding the box center, clamped onto the grid.
            stride = strides[scale]
            rows, cols = shapes[scale]
            i = min(max(int(math.floor(cy / stride)), 0), rows - 1)
            j = min(max(int(math.floor(cx / stride)), 0), cols - 1)
            if positive[scale][i, j, k]:
                logger.debug(
                    f"Anchor ({scale}, {i}, {j}, {k}) already assigned"
                )
                continue

            # Targets invert the decoding: cell offsets and log size ratios.
            anchor = anchors[scale][k]
            positive[scale][i, j, k] = True
            box[scale][i, j, k] = (
                cx / stride - j,
                cy / stride - i,
                math.log(w / anchor.w),
                math.log(h / anchor.h),
            )
            classes[scale][i, j, k, gt.class_id - 1] = 1.0

    return DetectionTargets(
        {s: LevelTargets(positive[s], box[s], classes[s]) for s in scales}
    )
