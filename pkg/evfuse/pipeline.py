"""End-to-end processing of a directory of frame pairs.

For every frame name ``<n>`` the input directory holds ``<n>.events.csv``
and ``<n>.evim``, optionally ``<n>.evrp`` raw head outputs, ``<n>.gt.json``
ground truth and an ``<n>.img.evft``/``<n>.evt.evft`` feature pair. Frames
are independent and may run on several threads; every frame writes only
its own files, and the aggregated report is assembled in frame order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
from attrs import frozen

from evfuse.config import PipelineConfig
from evfuse.detect import decode_all, nms, read_raw, write_detections
from evfuse.enhance import (
    ImageTensor,
    ValueRange,
    clahe,
    degrade,
    read_image,
    write_image,
)
from evfuse.evaluation import (
    EvalReport,
    evaluate,
    format_report_csv,
    merge_reports,
    read_ground_truth,
)
from evfuse.events import read_stream
from evfuse.fusion import (
    AcmfWeights,
    FeatureMap,
    FusionMode,
    fuse,
    read_feature_map,
    write_feature_map,
)
from evfuse.json_utils import write_json
from evfuse.voxelize import preprocess_events, write_voxel_grid

logger = logging.getLogger(__name__)

EVENTS_SUFFIX = ".events.csv"


@frozen
class FrameResult:
    """Outcome of one frame.

    Attributes:
        name: Frame name.
        events: Event preprocessing diagnostics.
        detections: Number of detections after NMS, ``None`` without raw
            predictions.
        fused: Whether a fused feature map was written.
        report: Evaluation report, ``None`` without ground truth.
        alpha_penalty: Regularizer penalty of the attention map, ``None``
            when no weights were produced.
    """

    name: str
    events: dict[str, Any]
    detections: int | None
    fused: bool
    report: EvalReport | None
    alpha_penalty: float | None = None

    def to_dict(self) -> dict[str, Any]:
        """Return the JSON representation."""
        return {
            "events": self.events,
            "detections": self.detections,
            "fused": self.fused,
            "alpha_penalty": self.alpha_penalty,
            "eval": self.report.to_dict() if self.report else None,
        }


def discover_frames(in_dir: Path) -> list[str]:
    """Names of the frames with both an event file and an image.

    Throws:
        FileNotFoundError: If ``in_dir`` is not a directory.
    """

    if not in_dir.is_dir():
        raise FileNotFoundError(f"Input directory {in_dir} not found")

    names = []
    for path in sorted(in_dir.glob(f"*{EVENTS_SUFFIX}")):
        name = path.name[: -len(EVENTS_SUFFIX)]
        if not (in_dir / f"{name}.evim").is_file():
            logger.warning(f"Skipping {name}: no {name}.evim image")
            continue
        names.append(name)
    return names


def frame_seed(seed: int, index: int) -> int:
    """Seed of frame ``index`` derived from the configuration seed."""
    state = np.random.SeedSequence([seed, index]).generate_state(1)
    return int(state[0])


def enhance_image(
    image: ImageTensor, config: PipelineConfig, seed: int
) -> ImageTensor:
    """Optionally degrade, then contrast enhance one frame."""

    if config.degrade.enabled:
        unit = ImageTensor(
            image.to_bytes_range().data / 255.0, ValueRange.UNIT
        )
        image = degrade(
            unit, config.degrade.gamma, config.degrade.sigma, seed
        ).to_bytes_range()
    return clahe(image.to_bytes_range(), config.clahe.params())


def _fuse_frame(
    in_dir: Path,
    out_dir: Path,
    name: str,
    config: PipelineConfig,
    weights: AcmfWeights | None,
) -> tuple[bool, float | None]:
    """Fuse the feature pair of a frame when it and the weights exist.

    Returns:
        Whether fused features were written and the attention penalty.
    """

    img_path = in_dir / f"{name}.img.evft"
    evt_path = in_dir / f"{name}.evt.evft"
    if not (img_path.is_file() and evt_path.is_file()):
        return False, None
    mode = config.fusion.mode
    if mode is FusionMode.ADAPTIVE and weights is None:
        logger.debug(f"{name}: no attention weights, fusion skipped")
        return False, None

    result = fuse(
        read_feature_map(img_path),
        read_feature_map(evt_path),
        mode,
        weights,
        config.fusion.reg_lambda,
    )
    write_feature_map(out_dir / f"{name}.fused.evft", result.fused)
    if result.alpha is not None:
        write_feature_map(
            out_dir / f"{name}.alpha.evft", FeatureMap(result.alpha.data)
        )
        return True, result.penalty
    return True, None


def process_frame(
    in_dir: Path,
    out_dir: Path,
    name: str,
    index: int,
    config: PipelineConfig,
    weights: AcmfWeights | None = None,
) -> FrameResult:
    """Run every stage on one frame and write its outputs.

    Args:
        in_dir: Input directory.
        out_dir: Output directory.
        name: Frame name.
        index: Position of the frame, used to derive its seed.
        config: Pipeline configuration.
        weights: Attention head for adaptive fusion.

    Returns:
        The frame summary.
    """

    # Events: window, hot pixels, voxel grid, density filter.
    stream = read_stream(in_dir / f"{name}{EVENTS_SUFFIX}")
    pre = preprocess_events(
        stream,
        config.window.window(),
        config.voxel.params(),
        config.voxel.theta_hot,
    )
    write_voxel_grid(out_dir / f"{name}.evxg", pre.grid)

    # Image: optional degradation, then CLAHE.
    image = read_image(in_dir / f"{name}.evim")
    enhanced = enhance_image(image, config, frame_seed(config.seed, index))
    write_image(out_dir / f"{name}.enhanced.evim", enhanced)

    fused, penalty = _fuse_frame(in_dir, out_dir, name, config, weights)

    # Detection post-processing and evaluation.
    count = None
    report = None
    raw_path = in_dir / f"{name}.evrp"
    if raw_path.is_file():
        dets = nms(
            decode_all(
                read_raw(raw_path),
                config.detect.anchor_table(),
                config.detect.strides,
            ),
            config.detect.conf,
            config.detect.nms,
        )
        write_detections(out_dir / f"{name}.dets.json", dets)
        count = len(dets)

        gt_path = in_dir / f"{name}.gt.json"
        if gt_path.is_file():
            gts = read_ground_truth(gt_path)
            report = evaluate(dets, gts, config.eval.iou)

    logger.info(f"Processed {name}")
    return FrameResult(name, pre.summary(), count, fused, report, penalty)


def run_pipeline(
    in_dir: Path,
    out_dir: Path,
    config: PipelineConfig,
    weights: AcmfWeights | None = None,
) -> dict[str, Any]:
    """Process every frame of ``in_dir`` and write the aggregated report.

    Frames run on ``config.workers`` threads. ``report.json`` holds the
    per-frame summaries and the merged evaluation; ``report.csv`` the
    P/R/F1 table of every evaluated frame and the total.

    Args:
        in_dir: Input directory.
        out_dir: Output directory, created when missing.
        config: Pipeline configuration.
        weights: Attention head for adaptive fusion.

    Returns:
        The content of ``report.json``.
    """

    # Frames are processed in sorted name order.
    names = discover_frames(in_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(item: tuple[int, str]) -> FrameResult:
        index, name = item
        return process_frame(in_dir, out_dir, name, index, config, weights)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(work, enumerate(names)))

    # Only frames with ground truth contribute to the merged report.
    reports = {r.name: r.report for r in results if r.report is not None}
    total = merge_reports(reports.values())
    summary = {
        "seed": config.seed,
        "frames": {r.name: r.to_dict() for r in results},
        "total": total.to_dict(),
    }

    # JSON summary first, then the CSV table with a trailing total row.
    write_json(out_dir / "report.json", summary)
    (out_dir / "report.csv").write_text(
        format_report_csv({**reports, "total": total}), encoding="utf-8"
    )
    logger.info(
        f"Pipeline finished: {len(results)} frames, P={total.precision:.4f} "
        f"R={total.recall:.4f} F1={total.f1:.4f}"
    )
    return summary
