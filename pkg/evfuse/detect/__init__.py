"""Box decoding, training loss, target assignment and NMS."""

from .anchor import Anchor
from .bbox import BBox
from .decode import decode_all, decode_boxes, stride_for
from .detect_io import (
    detections_to_json,
    encode_raw,
    parse_anchors,
    read_anchors,
    read_detections,
    read_raw,
    write_detections,
    write_raw,
)
from .detection import CLASS_NAMES, NUM_CLASSES, Detection
from .loss import DetectionLoss, LossWeights, detection_loss
from .nms import confidence_order, corners, iou, iou_many, nms
from .raw_prediction import VALUES_PER_ANCHOR, RawPrediction
from .targets import (
    AssignStrategy,
    DetectionTargets,
    LevelTargets,
    assign_targets,
)

__all__ = [
    "CLASS_NAMES",
    "NUM_CLASSES",
    "VALUES_PER_ANCHOR",
    "Anchor",
    "AssignStrategy",
    "BBox",
    "Detection",
    "DetectionLoss",
    "DetectionTargets",
    "LevelTargets",
    "LossWeights",
    "RawPrediction",
    "assign_targets",
    "confidence_order",
    "corners",
    "decode_all",
    "decode_boxes",
    "detection_loss",
    "detections_to_json",
    "encode_raw",
    "iou",
    "iou_many",
    "nms",
    "parse_anchors",
    "read_anchors",
    "read_detections",
    "read_raw",
    "stride_for",
    "write_detections",
    "write_raw",
]
