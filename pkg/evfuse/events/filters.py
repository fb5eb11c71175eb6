"""Windowing and hot-pixel removal for event streams."""

from __future__ import annotations

import logging

import numpy as np

from .event_stream import EventStream
from .time_window import TimeWindow
from .types import PixelSet

logger = logging.getLogger(__name__)


def restrict(stream: EventStream, window: TimeWindow) -> EventStream:
    """Keep the events with ``t0 <= t < t0 + dt``.

    The stream is time ordered, so the window bounds are located by binary
    search instead of a full scan.

    Args:
        stream: Source stream.
        window: Half-open time window.

    Returns:
        The restricted stream, order preserved. May be empty.
    """

    # Both bounds use side="left" so t1 itself is excluded.
    start = int(np.searchsorted(stream.t, window.t0, side="left"))
    stop = int(np.searchsorted(stream.t, window.t1, side="left"))
    if start == 0 and stop == len(stream):
        return stream
    return stream.slice(start, stop)


def pixel_counts(stream: EventStream) -> np.ndarray:
    """Count events per pixel.

    Args:
        stream: Source stream.

    Returns:
        Integer array of shape ``(height, width)``.
    """

    flat = np.bincount(
        stream.pixel_index,
        minlength=stream.sensor_width * stream.sensor_height,
    )
    return flat.reshape(stream.sensor_height, stream.sensor_width)


def hot_pixel_filter(
    stream: EventStream, window: TimeWindow, theta_hot: float
) -> tuple[EventStream, PixelSet]:
    """Remove every event at pixels firing faster than ``theta_hot``.

    The rate of a pixel is its event count inside ``window`` divided by the
    window length in seconds. Pixels whose rate is strictly above
    ``theta_hot`` are hot; all of their events are dropped, other events
    are left untouched.

    Args:
        stream: Source stream.
        window: Window over which rates are measured.
        theta_hot: Rate threshold in Hz.

    Returns:
        The filtered stream and the set of removed ``(x, y)`` pixels.

    Throws:
        ValueError: If ``theta_hot`` is not positive.
    """

    if theta_hot <= 0:
        raise ValueError(f"theta_hot must be > 0, got {theta_hot}")

    counts = pixel_counts(restrict(stream, window))

    # count / (dt * 1e-6) > theta_hot without dividing.
    hot = counts * 1_000_000 > theta_hot * window.dt
    if not hot.any():
        return stream, frozenset()

    # Pixels are reported as (x, y); every event of a hot pixel goes.
    rows, cols = np.nonzero(hot)
    removed = frozenset(zip(cols.tolist(), rows.tolist()))
    keep = ~hot.reshape(-1)[stream.pixel_index]
    logger.debug(
        f"Hot-pixel filter removed {len(removed)} pixels and "
        f"{int((~keep).sum())} events"
    )
    return stream.select(keep), removed
