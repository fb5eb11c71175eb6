"""Decoding of raw head outputs into scored boxes.

For anchor ``k`` at cell ``(i, j)`` of scale ``s`` with stride ``2^s``:
``b_x = (sigmoid(t_x) + j) * stride``, ``b_y = (sigmoid(t_y) + i) * stride``,
``b_w = a_w * exp(t_w)`` and ``b_h = a_h * exp(t_h)``. Objectness and class
probabilities are sigmoids of their logits; the confidence is the
objectness times the best class probability.
"""

from __future__ import annotations

import logging

import numpy as np

from evfuse.numeric import clamp_open_unit, sigmoid

from .bbox import BBox
from .detection import Detection
from .raw_prediction import RawPrediction
from .types import AnchorSet, AnchorTable, StrideTable

logger = logging.getLogger(__name__)


def stride_for(scale: int) -> int:
    """Pixels per cell at pyramid scale ``s``."""
    return 2**scale


def _inside_cell(
    centre: np.ndarray, index: np.ndarray, stride: int, extent: np.ndarray
) -> np.ndarray:
    """Clamp decoded centres into the open interval of their cell.

    A saturated sigmoid rounds to exactly 0 or 1, which would put the
    centre on a cell edge. The clamp keeps a margin of a few units in the
    last place of the box corners, so the midpoint recomputed from the
    corners stays inside the cell as well.

    Args:
        centre: Decoded centre coordinates in pixels.
        index: Cell index along the same axis, broadcastable to
            ``centre``.
        stride: Pixels per cell.
        extent: Box size along the same axis.

    Returns:
        Centres with ``index * stride < c < (index + 1) * stride``.
    """

    low = index * stride
    high = low + stride

    # Rounding of x - w/2, x + w/2 and their sum stays below this margin.
    margin = 4 * np.spacing(high + extent)
    return np.clip(
        centre,
        np.nextafter(low + margin, np.inf),
        np.nextafter(high - margin, -np.inf),
    )


def _midpoint_inside(
    lo: np.ndarray, hi: np.ndarray, index: np.ndarray, stride: int
) -> np.ndarray:
    """Tell which corner pairs have their midpoint strictly in the cell."""
    mid = (lo + hi) / 2
    return (index * stride < mid) & (mid < (index + 1) * stride)


def decode_boxes(
    raw: RawPrediction, anchors: AnchorSet, scale: int, stride: int
) -> list[Detection]:
    """Decode every anchor of one pyramid scale.

    Centres are kept strictly inside their cell, also for saturated
    offsets. Boxes whose size overflows, whose corners collapse in floating
    point or that are too large to keep their midpoint inside the cell are
    skipped.

    Args:
        raw: Raw head outputs.
        anchors: One template per anchor slot of the scale.
        scale: Pyramid scale ``s``.
        stride: Pixels per cell, must equal ``2^s``.

    Returns:
        Detections in row, column, anchor order.

    Throws:
        ValueError: If the scale is missing, the stride is inconsistent with
            the scale or the anchor count does not match.
    """

    if stride != stride_for(scale):
        raise ValueError(
            f"Stride {stride} inconsistent with scale {scale} "
            f"(expected {stride_for(scale)})"
        )
    grid = raw.level(scale)
    height, width, count, _ = grid.shape
    if len(anchors) != count:
        raise ValueError(
            f"Scale {scale} has {count} anchor slots, got {len(anchors)} "
            f"anchors"
        )

    # Cell indices broadcast against the (H, W, A) prediction grid.
    rows = np.arange(height, dtype=np.float64)[:, None, None]
    cols = np.arange(width, dtype=np.float64)[None, :, None]
    anchor_w = np.array([a.w for a in anchors])
    anchor_h = np.array([a.h for a in anchors])

    # Huge size logits overflow to inf; those boxes are dropped below.
    with np.errstate(over="ignore", invalid="ignore"):
        bw = anchor_w * np.exp(grid[..., 2])
        bh = anchor_h * np.exp(grid[..., 3])
        cx = (sigmoid(grid[..., 0]) + cols) * stride
        cy = (sigmoid(grid[..., 1]) + rows) * stride
        cx = _inside_cell(cx, cols, stride, bw)
        cy = _inside_cell(cy, rows, stride, bh)

    # Probabilities stay in (0, 1) even for saturated logits.
    objectness = clamp_open_unit(sigmoid(grid[..., 4]))
    scores = clamp_open_unit(sigmoid(grid[..., 5:]))
    class_index = np.argmax(scores, axis=-1)
    confidence = clamp_open_unit(objectness * scores.max(axis=-1))

    with np.errstate(over="ignore", invalid="ignore"):
        x0, x1 = cx - bw / 2, cx + bw / 2
        y0, y1 = cy - bh / 2, cy + bh / 2

        # Keep finite boxes with a positive extent whose midpoint is still
        # representable inside the cell.
        valid = np.isfinite(x1) & np.isfinite(y1) & (x0 < x1) & (y0 < y1)
        valid &= _midpoint_inside(x0, x1, cols, stride)
        valid &= _midpoint_inside(y0, y1, rows, stride)

    # np.nonzero walks the grid in row, column, anchor order.
    detections = []
    for i, j, k in zip(*np.nonzero(valid)):
        detections.append(
            Detection(
                box=BBox(x0[i, j, k], y0[i, j, k], x1[i, j, k], y1[i, j, k]),
                objectness=objectness[i, j, k],
                class_scores=scores[i, j, k],
                class_id=int(class_index[i, j, k]) + 1,
                confidence=confidence[i, j, k],
            )
        )

    skipped = int(valid.size - np.count_nonzero(valid))
    if skipped:
        logger.debug(f"Scale {scale}: skipped {skipped} degenerate boxes")
    return detections


def decode_all(
    raw: RawPrediction,
    anchors: AnchorTable,
    strides: StrideTable | None = None,
) -> list[Detection]:
    """Decode every scale present in ``raw``, in ascending scale order.

    Args:
        raw: Raw head outputs.
        anchors: Anchor templates keyed by scale.
        strides: Stride per scale; ``2^s`` when omitted.

    Returns:
        Detections of all scales concatenated.

    Throws:
        ValueError: If a scale has no anchors.
    """

    detections: list[Detection] = []
    for scale in raw.scales:
        if scale not in anchors:
            raise ValueError(f"No anchors configured for scale {scale}")
        stride = (strides or {}).get(scale, stride_for(scale))
        detections.extend(decode_boxes(raw, anchors[scale], scale, stride))
    logger.debug(f"Decoded {len(detections)} boxes over scales {raw.scales}")
    return detections
