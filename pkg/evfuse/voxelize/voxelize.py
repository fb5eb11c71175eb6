"""Temporal voxelization of event streams and the voxel density filter.

Each event in the window gets a normalized timestamp
``tau = (t - t0) / dt * (B - 1)`` and spreads unit mass over the two
nearest temporal bins with the triangular kernel
``k(tau, b) = max(0, 1 - |tau - b|)``. The kernel weights of one event sum
to one, so the mass of each polarity block equals its event count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from evfuse.events import EventStream, TimeWindow, restrict

from .types import ChannelList
from .voxel_grid import VoxelGrid
from .voxel_params import VoxelParams

logger = logging.getLogger(__name__)


def _check_bins(bins: int) -> None:
    if bins < 2:
        raise ValueError(f"Voxelization needs B >= 2 bins, got {bins}")


def normalize_timestamp(t: float, window: TimeWindow, bins: int) -> float:
    """Map a timestamp inside the window onto the bin axis ``[0, B-1]``.

    The closed end ``t0 + dt`` is accepted and maps to ``B - 1``.

    Args:
        t: Timestamp in microseconds.
        window: Time window the event belongs to.
        bins: Number of temporal bins ``B``.

    Returns:
        ``((t - t0) / dt) * (B - 1)``.

    Throws:
        ValueError: If ``t`` lies outside ``[t0, t0 + dt]``.
    """

    _check_bins(bins)
    if not (window.t0 <= t <= window.t1):
        raise ValueError(
            f"Timestamp {t} outside window [{window.t0}, {window.t1}]"
        )
    return ((t - window.t0) / window.dt) * (bins - 1)


def normalize_timestamps(
    t: np.ndarray, window: TimeWindow, bins: int
) -> np.ndarray:
    """Vectorized :func:`normalize_timestamp` for in-window timestamps."""
    return ((t.astype(np.float64) - window.t0) / window.dt) * (bins - 1)


def kernel(tau: float | np.ndarray, b: int | np.ndarray) -> float | np.ndarray:
    """Triangular interpolation weight of bin ``b`` at position ``tau``.

    Args:
        tau: Normalized timestamp(s).
        b: Bin index or indices.

    Returns:
        ``max(0, 1 - |tau - b|)``, a float for scalar inputs.
    """

    weight = np.maximum(0.0, 1.0 - np.abs(np.asarray(tau, np.float64) - b))
    if weight.ndim == 0:
        return float(weight)
    return weight


def _accumulate(
    stream: EventStream, window: TimeWindow, bins: int
) -> np.ndarray:
    """Scatter the kernel mass of in-window events into a flat grid."""

    plane = stream.sensor_width * stream.sensor_height
    size = 2 * bins * plane
    if len(stream) == 0:
        return np.zeros(size, dtype=np.float64)

    # Position of every event on the 0..B-1 bin axis.
    tau = normalize_timestamps(stream.t, window, bins)

    # Left support bin; tau == B-1 falls on the last pair of bins.
    lower = np.minimum(np.floor(tau).astype(np.int64), bins - 2)
    w_lower = kernel(tau, lower)
    w_upper = kernel(tau, lower + 1)

    # Flat index of (channel q*B + b, y, x).
    q = (stream.p.astype(np.int64) + 1) // 2
    base = q * bins * plane + stream.pixel_index
    index = np.concatenate((base + lower * plane, base + (lower + 1) * plane))
    weights = np.concatenate((w_lower, w_upper))

    # Weights of duplicate indices are summed.
    return np.bincount(index, weights=weights, minlength=size)


def voxelize(
    stream: EventStream,
    window: TimeWindow,
    params: VoxelParams,
    workers: int = 1,
) -> VoxelGrid:
    """Build the ``(2B, H, W)`` voxel grid of the events inside ``window``.

    The stream is restricted to the window first. With ``workers > 1`` the
    events are split into contiguous shards whose partial grids are summed,
    which gives the same grid up to floating point summation order.

    Args:
        stream: Source stream.
        window: Half-open time window.
        params: Voxelization parameters; only ``bins`` is used here.
        workers: Number of threads used to accumulate shards.

    Returns:
        The voxel grid, before any density filtering.

    Throws:
        ValueError: If ``params.bins < 2``.
    """

    bins = params.bins
    _check_bins(bins)
    events = restrict(stream, window)
    height, width = stream.sensor_height, stream.sensor_width

    # Contiguous shards, one partial grid per worker.
    if workers > 1 and len(events) >= 2 * workers:
        bounds = np.linspace(0, len(events), workers + 1).astype(int)
        shards = [
            events.slice(int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
        ]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(
                pool.map(lambda s: _accumulate(s, window, bins), shards)
            )
        flat = np.sum(partials, axis=0)
    else:
        flat = _accumulate(events, window, bins)

    logger.debug(f"Voxelized {len(events)} events into {2 * bins} bins")
    data = flat.reshape(2 * bins, height, width)
    return VoxelGrid(bins, height, width, data)


def temporal_resolution(window: TimeWindow, bins: int) -> float:
    """Finest time separation the grid can resolve, ``dt / (B - 1)``.

    Events closer than this share a kernel support and can land in the same
    bin pair.

    Args:
        window: Time window.
        bins: Number of temporal bins ``B``.

    Returns:
        Resolution in microseconds.

    Throws:
        ValueError: If ``bins < 2``.
    """

    _check_bins(bins)
    return window.dt / (bins - 1)


def density_filter(
    grid: VoxelGrid, theta_dens: float
) -> tuple[VoxelGrid, ChannelList]:
    """Zero every ``(b, q)`` channel whose total mass is below the threshold.

    Channels are zeroed rather than dropped so the grid keeps its
    ``(2B, H, W)`` shape.

    Args:
        grid: Voxel grid to filter.
        theta_dens: Minimum channel mass; ``0`` keeps everything.

    Returns:
        The filtered grid and the ``(b, q)`` pairs that were zeroed.

    Throws:
        ValueError: If ``theta_dens`` is negative.
    """

    if theta_dens < 0:
        raise ValueError(f"theta_dens must be >= 0, got {theta_dens}")

    # Channel c holds polarity c // B and bin c % B.
    sparse = grid.channel_mass() < theta_dens
    if not sparse.any():
        return grid, []

    # The input grid is never modified.
    data = grid.data.copy()
    data[sparse] = 0.0
    zeroed = [
        (int(c % grid.bins), int(c // grid.bins))
        for c in np.flatnonzero(sparse)
    ]
    logger.debug(f"Density filter zeroed channels {zeroed}")
    return VoxelGrid(grid.bins, grid.height, grid.width, data), zeroed
