"""Greedy matching of detections to ground-truth boxes."""

from __future__ import annotations

import logging
from typing import Sequence

from attrs import frozen

from evfuse.detect import Detection, confidence_order, iou

from .ground_truth import GroundTruth

logger = logging.getLogger(__name__)


@frozen
class MatchResult:
    """Outcome of matching one image.

    Attributes:
        tp: Detections matched to a ground-truth box.
        fp: Detections left unmatched.
        fn: Ground-truth boxes left unmatched.
        pairs: ``(detection index, ground-truth index)`` of every match, in
            matching order.
    """

    tp: int
    fp: int
    fn: int
    pairs: list[tuple[int, int]]


def match_detections(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruth],
    iou_thresh: float,
) -> MatchResult:
    """Match detections to ground truth in descending confidence order.

    Each detection takes the unmatched ground-truth box of its own class
    with the highest IoU, provided that IoU reaches ``iou_thresh``; equal
    IoUs go to the lower ground-truth index. Detections with equal
    confidence are visited in input order. A box is matched at most once,
    so duplicate detections of one object count as false positives.

    Args:
        dets: Detections of one image.
        gts: Ground-truth boxes of the same image.
        iou_thresh: Minimum IoU of a match, inclusive.

    Returns:
        Match counts and pairs.
    """

    matched = [False] * len(gts)
    pairs: list[tuple[int, int]] = []

    # Most confident detections claim their boxes first.
    for d in confidence_order(dets):
        det = dets[d]
        best, best_iou = -1, -1.0
        for g, gt in enumerate(gts):

            # Boxes already taken or of another class are out of reach.
            if matched[g] or gt.class_id != det.class_id:
                continue

            # Strict comparison keeps the lower index on equal IoU.
            overlap = iou(det.box, gt.box)
            if overlap >= iou_thresh and overlap > best_iou:
                best, best_iou = g, overlap

        # Unmatched detections stay false positives.
        if best >= 0:
            matched[best] = True
            pairs.append((d, best))

    tp = len(pairs)
    logger.debug(f"Matched {tp} of {len(dets)} detections to {len(gts)} boxes")
    return MatchResult(tp=tp, fp=len(dets) - tp, fn=len(gts) - tp, pairs=pairs)
