"""Intersection over union and per-class non-maximum suppression."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from .bbox import BBox
from .detection import Detection

logger = logging.getLogger(__name__)


def iou(a: BBox | Sequence[float], b: BBox | Sequence[float]) -> float:
    """Intersection area over union area of two boxes.

    Args:
        a: First box, a :class:`BBox` or ``[x0, y0, x1, y1]``.
        b: Second box.

    Returns:
        A value in ``[0, 1]``; 0 for disjoint boxes.

    Throws:
        ValueError: If a box has zero area.
    """

    a, b = BBox.of(a), BBox.of(b)

    # Overlap extent per axis, zero when the boxes are apart.
    iw = max(0.0, min(a.x_max, b.x_max) - max(a.x_min, b.x_min))
    ih = max(0.0, min(a.y_max, b.y_max) - max(a.y_min, b.y_min))
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def corners(boxes: Sequence[BBox]) -> np.ndarray:
    """Stack boxes into an ``(n, 4)`` corner array."""
    return np.array([b.as_list() for b in boxes], dtype=np.float64).reshape(
        -1, 4
    )


def iou_many(box: np.ndarray, others: np.ndarray) -> np.ndarray:
    """IoU of one corner box against an ``(n, 4)`` array.

    Evaluated with the same operation order as :func:`iou`, so the results
    are bit-identical to the scalar version.
    """

    iw = np.maximum(
        0.0,
        np.minimum(box[2], others[:, 2]) - np.maximum(box[0], others[:, 0]),
    )
    ih = np.maximum(
        0.0,
        np.minimum(box[3], others[:, 3]) - np.maximum(box[1], others[:, 1]),
    )
    inter = iw * ih
    area = (box[2] - box[0]) * (box[3] - box[1])
    areas = (others[:, 2] - others[:, 0]) * (others[:, 3] - others[:, 1])
    return inter / (area + areas - inter)


def confidence_order(dets: Sequence[Detection]) -> list[int]:
    """Indices by descending confidence; ties keep the input order."""
    return sorted(range(len(dets)), key=lambda n: -dets[n].confidence)


def nms(
    dets: Sequence[Detection], tau_conf: float, tau_nms: float
) -> list[Detection]:
    """Confidence thresholding followed by greedy per-class suppression.

    Detections with confidence below ``tau_conf`` are dropped. Within each
    class the most confident remaining detection is kept and every other
    one overlapping it with IoU above ``tau_nms`` is discarded, until none
    remain.

    Args:
        dets: Candidate detections.
        tau_conf: Minimum confidence, inclusive.
        tau_nms: Suppression IoU, exclusive.

    Returns:
        Survivors sorted by descending confidence, ties by input order.
    """

    # Confidence threshold first; the stable sort keeps ties in input order.
    candidates = [d for d in dets if d.confidence >= tau_conf]
    order = confidence_order(candidates)

    keep = np.zeros(len(candidates), dtype=bool)
    for class_id in sorted({d.class_id for d in candidates}):

        # Members of one class, most confident first.
        members = [n for n in order if candidates[n].class_id == class_id]
        boxes = corners([candidates[n].box for n in members])
        alive = np.ones(len(members), dtype=bool)
        for pos in range(len(members)):

            # Suppressed by a more confident box of the same class.
            if not alive[pos]:
                continue
            keep[members[pos]] = True

            # Only later, less confident members can be suppressed by it.
            overlap = iou_many(boxes[pos], boxes[pos + 1 :])
            alive[pos + 1 :] &= overlap <= tau_nms

    # Survivors of every class merged back into confidence order.

    survivors = [candidates[n] for n in order if keep[n]]
    logger.debug(
        f"NMS kept {len(survivors)} of {len(candidates)} confident boxes "
        f"({len(dets)} candidates)"
    )
    return survivors
