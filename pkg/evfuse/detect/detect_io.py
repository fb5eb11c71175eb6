"""Detections JSON, anchors JSON and the EVRP raw prediction format.

EVRP layout: magic ``EVRP``, ``u32`` version 1, ``u32`` level count, then
per level ``u32`` scale, H, W, A followed by ``H * W * A * 8`` ``f32``
values.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from evfuse.errors import FormatError
from evfuse.json_utils import read_json, write_json
from evfuse.tensor_io import TensorReader, pack_f32, pack_header, pack_u32

from .anchor import Anchor
from .detection import Detection
from .raw_prediction import VALUES_PER_ANCHOR, RawPrediction
from .types import AnchorTable

RAW_MAGIC = b"EVRP"


def encode_raw(raw: RawPrediction) -> bytes:
    """Serialize raw predictions to EVRP bytes."""
    parts = [pack_header(RAW_MAGIC, len(raw.levels))]

    # Per scale: its index, the grid shape, then the logits.
    for scale in raw.scales:
        grid = raw.level(scale)
        parts.append(pack_u32(scale, *grid.shape[:3]))
        parts.append(pack_f32(grid))
    return b"".join(parts)


def write_raw(path: Path, raw: RawPrediction) -> None:
    """Write ``raw`` to ``path`` in EVRP format."""
    path.write_bytes(encode_raw(raw))


def read_raw(path: Path) -> RawPrediction:
    """Read an EVRP file.

    Throws:
        FormatError: If the file is malformed or repeats a scale.
    """

    reader = TensorReader.open(path, RAW_MAGIC)
    (count,) = reader.u32(1)
    levels = {}
    for _ in range(count):

        # Level header, then H x W x A x 8 logits.
        scale, height, width, anchors = reader.u32(4)
        if scale in levels:
            raise FormatError(f"Scale {scale} appears twice")
        levels[scale] = reader.f32((height, width, anchors, VALUES_PER_ANCHOR))
    reader.finish()
    return RawPrediction(levels)


def detections_to_json(dets: list[Detection]) -> list[dict[str, Any]]:
    """JSON records of ``dets`` in list order."""
    return [d.to_dict() for d in dets]


def write_detections(path: Path, dets: list[Detection]) -> None:
    """Write detections as a JSON array."""
    write_json(path, detections_to_json(dets))


def read_detections(path: Path) -> list[Detection]:
    """Read a detections JSON array.

    Throws:
        FormatError: If the document is not an array of detections.
    """

    data = read_json(path)
    if not isinstance(data, list):
        raise FormatError(f"{path.name}: expected a JSON array")
    return [Detection.from_dict(item) for item in data]


def parse_anchors(data: Any, scales: list[int] | None = None) -> AnchorTable:
    """Decode anchor templates.

    Accepts a mapping ``{"<scale>": [[w, h], ...]}`` or a plain list
    ``[[w, h], ...]`` applied to every scale in ``scales``.

    Throws:
        FormatError: If the structure is not recognized.
    """

    def templates(items: Any) -> list[Anchor]:
        try:
            return [Anchor(w, h) for w, h in items]
        except (TypeError, ValueError) as exc:
            raise FormatError(f"Invalid anchor list {items!r}: {exc}") from exc

    # Mapping keys may be strings when the table comes from JSON.
    if isinstance(data, dict):
        try:
            return {int(s): templates(v) for s, v in data.items()}
        except ValueError as exc:
            raise FormatError(f"Invalid anchor scale: {exc}") from exc
    if isinstance(data, list):
        if scales is None:
            raise FormatError("A plain anchor list needs explicit scales")
        shared = templates(data)
        return {s: shared for s in scales}
    raise FormatError("Anchors must be a mapping or a list")


def read_anchors(path: Path, scales: list[int] | None = None) -> AnchorTable:
    """Read anchor templates from a JSON file."""
    return parse_anchors(read_json(path), scales)
