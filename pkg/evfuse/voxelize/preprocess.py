"""Complete event preprocessing: window, hot pixels, voxels, density."""

from __future__ import annotations

import logging

from attrs import field, frozen

from evfuse.events import EventStream, TimeWindow, hot_pixel_filter, restrict
from evfuse.events.types import PixelSet

from .types import ChannelList
from .voxel_grid import VoxelGrid
from .voxel_params import VoxelParams
from .voxelize import density_filter, voxelize

logger = logging.getLogger(__name__)


@frozen(slots=True)
class PreprocessResult:
    """Voxel grid of one window together with filter diagnostics.

    Attributes:
        grid: Density-filtered voxel grid.
        window_events: Events inside the window before filtering.
        kept_events: Events inside the window after hot-pixel removal.
        removed_pixels: Pixels dropped by the hot-pixel filter.
        zeroed_channels: ``(b, q)`` channels zeroed by the density filter.
        mass: Per-polarity grid mass before density filtering.
    """

    grid: VoxelGrid
    window_events: int
    kept_events: int
    removed_pixels: PixelSet = field(factory=frozenset)
    zeroed_channels: ChannelList = field(factory=list)
    mass: tuple[float, float] = (0.0, 0.0)

    def summary(self) -> dict[str, object]:
        """Return the diagnostics as a JSON friendly mapping."""
        return {
            "shape": list(self.grid.shape),
            "window_events": self.window_events,
            "kept_events": self.kept_events,
            "removed_pixels": sorted([x, y] for x, y in self.removed_pixels),
            "zeroed_channels": [[b, q] for b, q in self.zeroed_channels],
            "mass": list(self.mass),
        }


def preprocess_events(
    stream: EventStream,
    window: TimeWindow,
    params: VoxelParams,
    theta_hot: float | None,
    workers: int = 1,
) -> PreprocessResult:
    """Run restrict, hot-pixel filter, voxelization and density filter.

    Hot pixels are removed from the event stream before voxelization; this
    is the only order in which removing the events of a pixel is well
    defined.

    Args:
        stream: Raw event stream.
        window: Time window to voxelize.
        params: Bin count and density threshold.
        theta_hot: Hot-pixel rate threshold in Hz, ``None`` to skip.
        workers: Threads used by :func:`voxelize`.

    Returns:
        The filtered grid and diagnostics.
    """

    # Hot pixels are judged on the events of this window only.
    events = restrict(stream, window)
    removed: PixelSet = frozenset()
    kept = events
    if theta_hot is not None:
        kept, removed = hot_pixel_filter(events, window, theta_hot)

    grid = voxelize(kept, window, params, workers=workers)

    # Polarity mass before the density filter equals the kept event count.
    mass = (grid.polarity_mass(0), grid.polarity_mass(1))
    filtered, zeroed = density_filter(grid, params.theta_dens)

    logger.info(
        f"Window [{window.t0}, {window.t1}): {len(events)} events, "
        f"{len(removed)} hot pixels, {len(zeroed)} sparse channels"
    )
    return PreprocessResult(
        grid=filtered,
        window_events=len(events),
        kept_events=len(kept),
        removed_pixels=removed,
        zeroed_channels=zeroed,
        mass=mass,
    )
