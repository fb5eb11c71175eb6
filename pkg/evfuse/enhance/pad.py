"""Scaling to the unit interval and stride alignment of images."""

from __future__ import annotations

import numpy as np

from .image_tensor import ImageTensor, ValueRange

PAD_MULTIPLE = 32


def padded_size(size: int, multiple: int = PAD_MULTIPLE) -> int:
    """Round ``size`` up to the next multiple of ``multiple``."""
    return -(-size // multiple) * multiple


def normalize_and_pad(
    img: ImageTensor, multiple: int = PAD_MULTIPLE
) -> ImageTensor:
    """Scale a byte image to ``[0, 1]`` and zero-pad it to a multiple of 32.

    Padding is added at the bottom and on the right so the original content
    keeps its top-left position.

    Args:
        img: Image with values in ``0..255``.
        multiple: Alignment of the output height and width.

    Returns:
        Unit-range image of shape ``(C, H', W')`` with ``H'`` and ``W'`` the
        next multiples of ``multiple``.
    """

    if img.value_range is not ValueRange.BYTE:
        raise ValueError("normalize_and_pad expects values in 0..255")

    height = padded_size(img.height, multiple)
    width = padded_size(img.width, multiple)
    # Content stays top-left; the bottom and right margins are zero.
    out = np.zeros((img.channels, height, width), dtype=np.float64)
    out[:, : img.height, : img.width] = img.data / 255.0
    return ImageTensor(out, ValueRange.UNIT)
