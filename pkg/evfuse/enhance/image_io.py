"""EVIM binary format for planar images.

Layout: magic ``EVIM``, ``u32`` version 1, ``u32`` C, H, W, a ``u8`` range
tag (0 for byte images stored as ``f32``, 1 for unit images), then
``C * H * W`` little-endian ``f32`` values.
"""

from __future__ import annotations

from pathlib import Path

from evfuse.errors import FormatError
from evfuse.tensor_io import TensorReader, pack_f32, pack_header

from .image_tensor import ImageTensor, ValueRange

MAGIC = b"EVIM"

_RANGE_TAGS = {ValueRange.BYTE: 0, ValueRange.UNIT: 1}


def encode_image(img: ImageTensor) -> bytes:
    """Serialize an image to EVIM bytes."""
    header = pack_header(MAGIC, img.channels, img.height, img.width)
    tag = bytes([_RANGE_TAGS[img.value_range]])
    return header + tag + pack_f32(img.data)


def write_image(path: Path, img: ImageTensor) -> None:
    """Write ``img`` to ``path`` in EVIM format."""
    path.write_bytes(encode_image(img))


def read_image(path: Path) -> ImageTensor:
    """Read an EVIM file.

    Args:
        path: File to read.

    Returns:
        The stored image.

    Throws:
        FormatError: If the file is not a valid EVIM file.
    """

    reader = TensorReader.open(path, MAGIC)
    channels, height, width = reader.u32(3)
    tag = reader.u8()
    ranges = {v: k for k, v in _RANGE_TAGS.items()}
    if tag not in ranges:
        raise FormatError(f"Unknown EVIM range tag {tag}")
    data = reader.f32((channels, height, width))
    reader.finish()

    # f32 storage of unit images can land a hair outside [0, 1].
    if ranges[tag] is ValueRange.UNIT:
        data = data.clip(0.0, 1.0)
    return ImageTensor(data, ranges[tag])
