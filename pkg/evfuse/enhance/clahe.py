"""Contrast limited adaptive histogram equalization.

The image is split into ``M x M`` tiles. Each tile histogram is clipped at
``kappa`` with the excess spread evenly over all gray levels, turned into
a cumulative mapping onto ``0..255``, and every pixel is mapped by bilinear
interpolation between the mappings of the four nearest tile centers.
Pixels beyond the outermost centers reuse the nearest mapping.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .clahe_params import ClaheMode, ClaheParams
from .image_tensor import ImageTensor, ValueRange

logger = logging.getLogger(__name__)

# Full range BT.601 conversion between RGB and YCbCr.
_TO_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)
_FROM_YCBCR = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.344136, -0.714136],
        [1.0, 1.772, 0.0],
    ]
)


def clip_histogram(h: np.ndarray, kappa_abs: float) -> np.ndarray:
    """Clip a histogram at ``kappa_abs`` and spread the excess uniformly.

    Every bin becomes ``min(h(v), kappa) + excess / len(h)`` in a single
    pass; bins may end above ``kappa`` after redistribution. The excess is
    accumulated with compensated summation so the total mass is preserved;
    it is exact whenever the bin values stay dyadic, e.g. integer counts
    with an integer clip and a power of two number of levels.

    Args:
        h: Non-negative counts per gray level.
        kappa_abs: Absolute clip count.

    Returns:
        The clipped histogram as ``float64``.

    Throws:
        ValueError: If ``h`` has negative entries or ``kappa_abs <= 0``.
    """

    counts = np.asarray(h, dtype=np.float64)
    if kappa_abs <= 0:
        raise ValueError(f"Clip limit must be > 0, got {kappa_abs}")
    if counts.size == 0 or counts.min() < 0:
        raise ValueError("Histogram must be non-empty and non-negative")

    # Mass above the limit is pooled and handed back to every bin.
    clipped = np.minimum(counts, kappa_abs)
    excess = math.fsum((counts - clipped).tolist())
    if excess == 0:
        return clipped
    return clipped + excess / counts.size


def _cdf_mapping(clipped: np.ndarray, total: float) -> np.ndarray:
    """Map gray levels through ``round(255 * CDF(v) / total)``."""
    cdf = np.cumsum(clipped)
    return np.clip(np.floor(255.0 * cdf / total + 0.5), 0.0, 255.0)


def _tile_edges(size: int, tiles: int) -> tuple[np.ndarray, np.ndarray]:
    """Return start and end offsets of ``tiles`` tiles along one axis.

    Tiles are ``ceil(size / tiles)`` pixels long and the last one is
    truncated. When that would leave trailing tiles empty (9 pixels in 8
    tiles) the axis is split into balanced tiles of ``floor`` or ``ceil``
    size instead.

    Throws:
        ValueError: If the axis has fewer pixels than tiles.
    """

    if size < tiles:
        raise ValueError(
            f"Axis of {size} pixels is too small for {tiles} tiles"
        )

    step = -(-size // tiles)
    starts = np.arange(tiles) * step
    ends = np.minimum(starts + step, size)
    if np.all(ends > starts):
        return starts, ends

    # Balanced split; every tile gets at least one pixel.
    edges = np.arange(tiles + 1) * size // tiles
    logger.debug(f"Balanced {tiles} tiles over {size} pixels")
    return edges[:-1], edges[1:]


def _axis_weights(
    size: int, centers: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Neighbouring tile indices and interpolation weight for each pixel."""

    last = centers.size - 1
    coords = np.arange(size, dtype=np.float64)
    upper = np.searchsorted(centers, coords, side="right")
    lower = np.clip(upper - 1, 0, last)
    upper = np.clip(upper, 0, last)

    # Clamped border pixels have lower == upper and weight zero.
    span = centers[upper] - centers[lower]
    safe = np.where(span > 0, span, 1.0)
    weight = np.where(span > 0, (coords - centers[lower]) / safe, 0.0)
    return lower, upper, weight


def _equalize_plane(plane: np.ndarray, params: ClaheParams) -> np.ndarray:
    """Apply CLAHE to one ``(H, W)`` plane of integer values ``0..255``."""

    tiles = params.tile_grid
    levels = params.gray_levels
    height, width = plane.shape

    # Quantize 0..255 onto the configured number of gray levels.
    level = plane.astype(np.int64) * levels // 256

    row_start, row_end = _tile_edges(height, tiles)
    col_start, col_end = _tile_edges(width, tiles)

    # One gray-level mapping per tile.
    mappings = np.empty((tiles, tiles, levels), dtype=np.float64)
    for i in range(tiles):
        for j in range(tiles):
            tile = level[row_start[i] : row_end[i], col_start[j] : col_end[j]]
            hist = np.bincount(tile.ravel(), minlength=levels)

            # The relative clip limit scales with the tile population.
            clipped = clip_histogram(
                hist, params.clip_limit * tile.size / levels
            )
            mappings[i, j] = _cdf_mapping(clipped, tile.size)

    # Tile centers in pixel coordinates along each axis.
    row_lo, row_hi, wy = _axis_weights(
        height, (row_start + row_end - 1) / 2.0
    )
    col_lo, col_hi, wx = _axis_weights(width, (col_start + col_end - 1) / 2.0)

    # Broadcast the per-row and per-column lookups to the full plane.
    r0, r1 = row_lo[:, None], row_hi[:, None]
    c0, c1 = col_lo[None, :], col_hi[None, :]
    wy, wx = wy[:, None], wx[None, :]

    # Look up each pixel level in the four nearest tile mappings.
    top_left, top_right = mappings[r0, c0, level], mappings[r0, c1, level]
    low_left, low_right = mappings[r1, c0, level], mappings[r1, c1, level]

    # Bilinear blend, first along columns then along rows.
    top = (1.0 - wx) * top_left + wx * top_right
    bottom = (1.0 - wx) * low_left + wx * low_right
    value = (1.0 - wy) * top + wy * bottom
    return np.clip(np.floor(value + 0.5), 0.0, 255.0)


def _equalize_luminance(data: np.ndarray, params: ClaheParams) -> np.ndarray:
    """Equalize the Y channel of an RGB image and convert back."""

    # Chroma stays centered on zero; only Y is quantized and equalized.
    ycc = np.einsum("ij,jhw->ihw", _TO_YCBCR, data)
    luma = np.clip(np.floor(ycc[0] + 0.5), 0.0, 255.0)
    ycc[0] = _equalize_plane(luma, params)
    rgb = np.einsum("ij,jhw->ihw", _FROM_YCBCR, ycc)
    return np.clip(np.floor(rgb + 0.5), 0.0, 255.0)


def clahe(img: ImageTensor, params: ClaheParams) -> ImageTensor:
    """Contrast limited adaptive histogram equalization of a byte image.

    Args:
        img: Image with integer values in ``0..255``.
        params: Tile grid, clip limit, gray levels and color mode.

    Returns:
        The equalized image, integer valued in ``0..255``.

    Throws:
        ValueError: If the image is not byte valued, has fewer rows or
            columns than ``tile_grid``, or luminance mode is used on a non
            RGB image.
    """

    if img.value_range is not ValueRange.BYTE:
        raise ValueError("CLAHE expects an image with values in 0..255")

    if params.mode is ClaheMode.LUMINANCE:
        if img.channels != 3:
            raise ValueError("Luminance CLAHE needs a 3 channel image")
        out = _equalize_luminance(img.data, params)
    else:
        out = np.stack(
            [_equalize_plane(plane, params) for plane in img.data]
        )

    logger.debug(
        f"CLAHE on {img.channels}x{img.height}x{img.width} with "
        f"M={params.tile_grid}, kappa={params.clip_limit}"
    )
    return ImageTensor(out, ValueRange.BYTE)
