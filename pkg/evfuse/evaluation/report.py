"""Precision, recall and F1 over matched detections."""

from __future__ import annotations

from typing import Any, Iterable, Sequence

from attrs import field, frozen, validators

from evfuse.detect import CLASS_NAMES, NUM_CLASSES, Detection

from .ground_truth import GroundTruth
from .matching import match_detections


def percent(value: float) -> float:
    """Express a ratio as a percentage rounded to 2 decimals."""
    return round(100.0 * value, 2)


@frozen
class EvalReport:
    """Detection counts and the scores derived from them.

    Precision is ``tp / (tp + fp)``, recall ``tp / (tp + fn)`` and F1 their
    harmonic mean; each is 0 when its denominator is 0.

    Attributes:
        tp: True positives.
        fp: False positives.
        fn: False negatives.
        per_class: Reports restricted to each class id.
    """

    tp: int = field(validator=validators.ge(0))
    fp: int = field(validator=validators.ge(0))
    fn: int = field(validator=validators.ge(0))
    per_class: dict[int, "EvalReport"] = field(factory=dict)

    @property
    def precision(self) -> float:
        total = self.tp + self.fp
        return self.tp / total if total else 0.0

    @property
    def recall(self) -> float:
        total = self.tp + self.fn
        return self.tp / total if total else 0.0

    @property
    def f1(self) -> float:
        # Equal to 2PR / (P + R), written on counts.
        total = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / total if self.tp else 0.0

    def scores(self) -> dict[str, Any]:
        """Counts, ratios and rounded percentages without the breakdown."""
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "precision_pct": percent(self.precision),
            "recall_pct": percent(self.recall),
            "f1_pct": percent(self.f1),
        }

    def to_dict(self) -> dict[str, Any]:
        """Return the JSON representation, per-class scores included."""
        data = self.scores()
        data["per_class"] = {
            CLASS_NAMES.get(c, str(c)): r.scores()
            for c, r in sorted(self.per_class.items())
        }
        return data


def compute_prf(tp: int, fp: int, fn: int) -> EvalReport:
    """Build the report of the given counts.

    Throws:
        ValueError: If a count is negative.
    """

    return EvalReport(tp, fp, fn)


def evaluate(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruth],
    iou_thresh: float,
) -> EvalReport:
    """Match one image and report overall and per-class scores.

    Args:
        dets: Detections after thresholding and NMS.
        gts: Ground-truth boxes.
        iou_thresh: Minimum IoU of a match.

    Returns:
        The report with one per-class entry for every class id.
    """

    # One global matching; per-class counts are read off its pairs.
    result = match_detections(dets, gts, iou_thresh)
    matched_dets = {d for d, _ in result.pairs}
    matched_gts = {g for _, g in result.pairs}

    # A pair counts for the class of its ground truth.
    per_class = {}
    for class_id in range(1, NUM_CLASSES + 1):
        tp = sum(1 for _, g in result.pairs if gts[g].class_id == class_id)
        fp = sum(
            1
            for n, d in enumerate(dets)
            if d.class_id == class_id and n not in matched_dets
        )
        fn = sum(
            1
            for n, g in enumerate(gts)
            if g.class_id == class_id and n not in matched_gts
        )
        per_class[class_id] = EvalReport(tp, fp, fn)

    return EvalReport(result.tp, result.fp, result.fn, per_class)


def merge_reports(reports: Iterable[EvalReport]) -> EvalReport:
    """Sum the counts of several images, class by class."""

    # Running totals, overall and per class id.
    tp = fp = fn = 0
    classes: dict[int, list[int]] = {}
    for report in reports:
        tp, fp, fn = tp + report.tp, fp + report.fp, fn + report.fn
        for class_id, sub in report.per_class.items():
            counts = classes.setdefault(class_id, [0, 0, 0])
            counts[0] += sub.tp
            counts[1] += sub.fp
            counts[2] += sub.fn
    per_class = {c: EvalReport(*v) for c, v in sorted(classes.items())}
    return EvalReport(tp, fp, fn, per_class)
