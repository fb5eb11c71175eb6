"""Deterministic synthetic frames for demos and end-to-end checks.

Each frame holds a few rectangular objects. Events fire along the object
outlines with uniform background noise and one hot pixel; the RGB frame is
a dark image with brighter objects; the raw head outputs decode close to
the ground-truth boxes, with one spurious low confidence box. All values
derive from ``numpy.random.default_rng([seed, frame index])``.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from attrs import frozen

from evfuse.config import PipelineConfig
from evfuse.detect import RawPrediction, assign_targets, stride_for, write_raw
from evfuse.enhance import ImageTensor, ValueRange, padded_size, write_image
from evfuse.evaluation import GroundTruth
from evfuse.events import EventStream, save_stream
from evfuse.fusion import (
    AcmfWeights,
    ConvWeights,
    FeatureMap,
    write_feature_map,
    write_weights,
)
from evfuse.json_utils import write_json

logger = logging.getLogger(__name__)

SENSOR_WIDTH = 64
SENSOR_HEIGHT = 48
FEATURE_CHANNELS = 4
# Pyramid scale of the bundled feature maps.
FEATURE_SCALE = 2


@frozen
class SyntheticFrame:
    """All inputs of one synthetic frame."""

    name: str
    stream: EventStream
    image: ImageTensor
    gts: list[GroundTruth]
    raw: RawPrediction
    img_features: FeatureMap
    evt_features: FeatureMap


def _objects(rng: np.random.Generator) -> list[GroundTruth]:
    """Two or three boxes that fit on the sensor."""

    gts = []
    for _ in range(int(rng.integers(2, 4))):
        w = int(rng.integers(8, 24))
        h = int(rng.integers(8, 20))
        x0 = int(rng.integers(0, SENSOR_WIDTH - w))
        y0 = int(rng.integers(0, SENSOR_HEIGHT - h))
        gts.append(
            GroundTruth((x0, y0, x0 + w, y0 + h), int(rng.integers(1, 4)))
        )
    return gts


def _events(
    rng: np.random.Generator, gts: list[GroundTruth], config: PipelineConfig
) -> EventStream:
    """Outline events, background noise and one hot pixel."""

    # Events along the four edges of every box.
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    for gt in gts:
        x0, y0, x1, y1 = (int(v) for v in gt.box.as_list())
        cols = np.arange(x0, x1)
        rows = np.arange(y0, y1)
        xs += [cols, cols, np.full(rows.size, x0), np.full(rows.size, x1 - 1)]
        ys += [np.full(cols.size, y0), np.full(cols.size, y1 - 1), rows, rows]
    x = np.concatenate(xs)
    y = np.concatenate(ys)

    # Uniform background activity.
    noise = 200
    x = np.concatenate((x, rng.integers(0, SENSOR_WIDTH, noise)))
    y = np.concatenate((y, rng.integers(0, SENSOR_HEIGHT, noise)))

    # 40 events in a 30 ms window is well above a 500 Hz threshold.
    hot = 40
    x = np.concatenate((x, np.full(hot, int(rng.integers(SENSOR_WIDTH)))))
    y = np.concatenate((y, np.full(hot, int(rng.integers(SENSOR_HEIGHT)))))

    # Timestamps uniform over the window, then sorted.
    window = config.window.window()
    t = rng.integers(window.t0, window.t1, x.size)
    p = rng.choice(np.array([-1, 1]), x.size)
    order = np.argsort(t, kind="stable")
    return EventStream(
        sensor_width=SENSOR_WIDTH,
        sensor_height=SENSOR_HEIGHT,
        t=t[order],
        x=x[order],
        y=y[order],
        p=p[order],
    )


def _image(rng: np.random.Generator, gts: list[GroundTruth]) -> ImageTensor:
    """Dark noisy RGB frame with brighter objects."""

    data = rng.integers(5, 30, (3, SENSOR_HEIGHT, SENSOR_WIDTH)).astype(float)
    for gt in gts:
        x0, y0, x1, y1 = (int(v) for v in gt.box.as_list())
        data[:, y0:y1, x0:x1] += rng.integers(20, 60, (3, 1, 1))
    return ImageTensor(np.clip(data, 0, 255), ValueRange.BYTE)


def _logit(p: np.ndarray) -> np.ndarray:
    return np.log(p) - np.log1p(-p)


def _raw_predictions(
    rng: np.random.Generator, gts: list[GroundTruth], config: PipelineConfig
) -> RawPrediction:
    """Head outputs that decode near ``gts`` plus one weak false box."""

    anchors = config.detect.anchor_table()
    strides = config.detect.strides
    height = padded_size(SENSOR_HEIGHT)
    width = padded_size(SENSOR_WIDTH)
    shapes = {s: (height // strides[s], width // strides[s]) for s in strides}
    targets = assign_targets(
        gts, shapes, anchors, strides, config.detect.assign
    )

    # Background cells: low objectness, negative class logits.
    levels = {}
    for scale, (rows, cols) in shapes.items():
        grid = np.zeros((rows, cols, len(anchors[scale]), 8))
        grid[..., 2:4] = rng.normal(0.0, 0.1, grid[..., 2:4].shape)
        grid[..., 4] = -8.0
        grid[..., 5:] = -3.0

        # Positive anchors reproduce their assigned box with jitter.
        level = targets.levels[scale]
        pos = level.positive
        frac = np.clip(level.box[pos][:, :2], 0.02, 0.98)
        jitter = rng.normal(0.0, 0.05, (int(pos.sum()), 2))
        grid[pos, 0:2] = _logit(frac) + jitter
        grid[pos, 2:4] = level.box[pos][:, 2:4] + jitter
        grid[pos, 4] = rng.uniform(2.0, 5.0, int(pos.sum()))
        grid[pos, 5:] = np.where(level.classes[pos] > 0, 3.0, -3.0)
        levels[scale] = grid

    # A spurious box with modest confidence on the finest scale.
    finest = min(levels)
    i = int(rng.integers(levels[finest].shape[0]))
    j = int(rng.integers(levels[finest].shape[1]))
    levels[finest][i, j, 0, 4] = 0.5
    levels[finest][i, j, 0, 5 + int(rng.integers(3))] = 1.0
    return RawPrediction(levels)


def _features(
    rng: np.random.Generator,
) -> tuple[FeatureMap, FeatureMap]:
    """Image and event features sharing one latent map."""

    stride = stride_for(FEATURE_SCALE)
    shape = (
        FEATURE_CHANNELS,
        padded_size(SENSOR_HEIGHT) // stride,
        padded_size(SENSOR_WIDTH) // stride,
    )
    latent = rng.normal(0.0, 1.0, shape)

    # Events see the latent map with less noise than the image.
    img = latent + rng.normal(0.0, 2.0, shape)
    evt = latent + rng.normal(0.0, 1.0, shape)
    return FeatureMap(img), FeatureMap(evt)


def synth_frame(
    name: str, seed: int, index: int, config: PipelineConfig
) -> SyntheticFrame:
    """Generate frame ``index`` of the fixture seeded with ``seed``."""

    rng = np.random.default_rng([seed, index])
    gts = _objects(rng)
    stream = _events(rng, gts, config)
    image = _image(rng, gts)
    raw = _raw_predictions(rng, gts, config)
    img_features, evt_features = _features(rng)
    return SyntheticFrame(
        name, stream, image, gts, raw, img_features, evt_features
    )


def synth_weights(seed: int) -> AcmfWeights:
    """Small random attention head for :data:`FEATURE_CHANNELS` channels."""

    rng = np.random.default_rng([seed, 2**31])
    c = FEATURE_CHANNELS
    return AcmfWeights(
        ConvWeights(rng.normal(0.0, 0.3, (c, 2 * c, 1, 1)), np.zeros(c)),
        ConvWeights(rng.normal(0.0, 0.1, (c, c, 3, 3)), np.zeros(c)),
    )


def write_fixture(
    out_dir: Path, seed: int, frames: int, config: PipelineConfig
) -> list[str]:
    """Write a pipeline input directory and a ``weights`` sub-directory.

    Args:
        out_dir: Destination, created when missing.
        seed: Fixture seed.
        frames: Number of frames.
        config: Configuration providing the window and anchors.

    Returns:
        The frame names.
    """

    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    for index in range(frames):
        frame = synth_frame(f"frame{index:03d}", seed, index, config)
        base = frame.name
        save_stream(out_dir / f"{base}.events.csv", frame.stream)
        write_image(out_dir / f"{base}.evim", frame.image)
        write_raw(out_dir / f"{base}.evrp", frame.raw)
        gts = [gt.to_dict() for gt in frame.gts]
        write_json(out_dir / f"{base}.gt.json", gts)
        write_feature_map(out_dir / f"{base}.img.evft", frame.img_features)
        write_feature_map(out_dir / f"{base}.evt.evft", frame.evt_features)
        names.append(frame.name)

    weights_dir = out_dir / "weights"
    weights_dir.mkdir(exist_ok=True)
    head = synth_weights(seed)
    write_weights(weights_dir / "w1.evwt", head.w1)
    write_weights(weights_dir / "w2.evwt", head.w2)

    logger.info(f"Wrote {frames} synthetic frames to {out_dir}")
    return names
