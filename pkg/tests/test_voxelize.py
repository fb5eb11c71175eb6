"""Tests for voxelization, the density filter and EVXG files."""

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from evfuse.errors import FormatError
from evfuse.events import Event, EventStream, TimeWindow
from evfuse.voxelize import (
    VoxelGrid,
    VoxelParams,
    density_filter,
    encode_voxel_grid,
    kernel,
    normalize_timestamp,
    preprocess_events,
    read_voxel_grid,
    temporal_resolution,
    voxelize,
    write_voxel_grid,
)

StreamFactory = Callable[..., EventStream]
WINDOW = TimeWindow(0, 30000)


def _single(t: int, p: int = 1) -> EventStream:
    return EventStream.from_events([Event(x=1, y=1, t=t, p=p)], 4, 4)


def _support(grid: VoxelGrid) -> set[int]:
    return set(np.flatnonzero(grid.channel_mass() > 0).tolist())


def _oracle(stream: EventStream, window: TimeWindow, bins: int) -> np.ndarray:
    """Accumulate kernel weights one event and one bin at a time."""

    out = np.zeros((2 * bins, stream.sensor_height, stream.sensor_width))
    for e in stream.events:
        if not window.contains(e.t):
            continue
        tau = (e.t - window.t0) / window.dt * (bins - 1)
        for b in range(bins):
            out[e.q * bins + b, e.y, e.x] += max(0.0, 1.0 - abs(tau - b))
    return out


@pytest.mark.parametrize(
    "t, expected", [(0, 0.0), (30000, 3.0), (15000, 1.5)]
)
def test_normalize_timestamp_examples(t: int, expected: float) -> None:
    """Ensure timestamps map linearly onto [0, B-1]."""

    assert normalize_timestamp(t, WINDOW, 4) == pytest.approx(expected)


def test_normalize_timestamp_rejects_outside() -> None:
    """Ensure timestamps beyond the window and B < 2 are rejected."""

    with pytest.raises(ValueError):
        normalize_timestamp(30001, WINDOW, 4)
    with pytest.raises(ValueError):
        normalize_timestamp(0, WINDOW, 1)


def test_kernel_examples() -> None:
    """Ensure the triangular kernel splits mass between neighbours."""

    assert kernel(1.5, 1) == pytest.approx(0.5)
    assert kernel(1.5, 2) == pytest.approx(0.5)
    assert kernel(1.5, 0) == 0.0
    assert kernel(3.0, 3) == 1.0


@pytest.mark.parametrize("bins", [2, 3, 4, 8])
def test_kernel_partition_of_unity(
    bins: int, rng: np.random.Generator
) -> None:
    """Ensure the weights of every timestamp sum to one."""

    tau = rng.uniform(0.0, bins - 1, 100_000)
    total = sum(kernel(tau, b) for b in range(bins))
    assert np.max(np.abs(total - 1.0)) < 1e-12


def test_voxelize_shape() -> None:
    """Ensure a 346x260 sensor with B=4 gives an (8, 260, 346) grid."""

    stream = EventStream.empty(346, 260)
    grid = voxelize(stream, WINDOW, VoxelParams(bins=4))
    assert grid.shape == (8, 260, 346)
    assert grid.data.shape == (8, 260, 346)
    assert not grid.data.any()


@pytest.mark.parametrize("count", [1_000, 10_000, 100_000])
@pytest.mark.parametrize("bins", [2, 3, 4, 8])
def test_voxelize_conserves_polarity_mass(
    bins: int, count: int, make_stream: StreamFactory
) -> None:
    """Ensure each polarity block holds exactly its event count."""

    stream = make_stream(count, t_max=40000)
    grid = voxelize(stream, WINDOW, VoxelParams(bins=bins))

    # Events at or after t1 fall outside the half-open window.
    inside = stream.t < WINDOW.t1
    for q, p in ((0, -1), (1, 1)):
        expected = int(np.sum(inside & (stream.p == p)))
        assert abs(grid.polarity_mass(q) - expected) <= 1e-9 * count


@pytest.mark.parametrize("bins", [2, 3, 4, 8])
def test_voxelize_matches_scatter_oracle(
    bins: int, make_stream: StreamFactory
) -> None:
    """Ensure the vectorized scatter equals the per-event loop."""

    stream = make_stream(10_000, t_max=45000)
    grid = voxelize(stream, WINDOW, VoxelParams(bins=bins))
    assert grid.shape == (2 * bins, 260, 346)
    np.testing.assert_allclose(
        grid.data, _oracle(stream, WINDOW, bins), atol=1e-9
    )


def test_voxelize_is_additive(
    make_stream: StreamFactory, rng: np.random.Generator
) -> None:
    """Ensure the grid of a union is the sum of the grids."""

    stream = make_stream(1000, width=20, height=16)
    mask = rng.random(len(stream)) < 0.5
    params = VoxelParams(bins=4)
    left = voxelize(stream.select(mask), WINDOW, params)
    right = voxelize(stream.select(~mask), WINDOW, params)
    whole = voxelize(stream, WINDOW, params)
    np.testing.assert_allclose((left + right).data, whole.data, atol=1e-9)


def test_voxelize_ignores_order_of_simultaneous_events(
    rng: np.random.Generator,
) -> None:
    """Ensure reordering same-timestamp events leaves the grid intact."""

    n = 600
    t = np.sort(rng.choice(np.arange(0, 30000, 2500), n))
    x = rng.integers(0, 10, n)
    y = rng.integers(0, 8, n)
    p = rng.choice(np.array([-1, 1]), n)

    # Shuffle inside each timestamp group only.
    order = np.lexsort((rng.random(n), t))
    first = EventStream(sensor_width=10, sensor_height=8, t=t, x=x, y=y, p=p)
    second = EventStream(
        sensor_width=10,
        sensor_height=8,
        t=t[order],
        x=x[order],
        y=y[order],
        p=p[order],
    )
    params = VoxelParams(bins=4)
    np.testing.assert_allclose(
        voxelize(first, WINDOW, params).data,
        voxelize(second, WINDOW, params).data,
        atol=1e-9,
    )


def test_voxelize_workers_agree(make_stream: StreamFactory) -> None:
    """Ensure sharded accumulation matches the single thread result."""

    stream = make_stream(5000, width=40, height=30)
    params = VoxelParams(bins=5)
    single = voxelize(stream, WINDOW, params, workers=1)
    sharded = voxelize(stream, WINDOW, params, workers=4)
    np.testing.assert_allclose(sharded.data, single.data, atol=1e-9)


def test_temporal_resolution() -> None:
    """Ensure the resolution is dt / (B - 1)."""

    assert temporal_resolution(WINDOW, 4) == 10000.0
    assert temporal_resolution(WINDOW, 2) == 30000.0
    with pytest.raises(ValueError):
        temporal_resolution(WINDOW, 1)


def test_close_events_share_a_bin() -> None:
    """Ensure events 5 ms apart overlap in bin 0 at B=4."""

    params = VoxelParams(bins=4)
    first = _support(voxelize(_single(0), WINDOW, params))
    second = _support(voxelize(_single(5000), WINDOW, params))
    # Positive polarity lives in channels B..2B-1.
    assert first == {4}
    assert second == {4, 5}
    assert first & second == {4}


def test_resolution_apart_events_are_disjoint() -> None:
    """Ensure events one resolution step apart use disjoint bins."""

    params = VoxelParams(bins=4)
    first = _support(voxelize(_single(0), WINDOW, params))
    second = _support(voxelize(_single(10000), WINDOW, params))
    assert first == {4}
    assert second == {5}


def test_negative_polarity_uses_first_block() -> None:
    """Ensure q = 0 events land in channels 0..B-1."""

    grid = voxelize(_single(15000, p=-1), WINDOW, VoxelParams(bins=4))
    assert _support(grid) == {1, 2}
    assert grid.channel(1, 0)[1, 1] == pytest.approx(0.5)
    assert grid.polarity_mass(1) == 0.0


def test_voxelize_rejects_single_bin() -> None:
    """Ensure B < 2 is refused by the parameters."""

    with pytest.raises(ValueError):
        VoxelParams(bins=1)


def test_density_filter_threshold() -> None:
    """Ensure mass 4.9 is zeroed while 5.0 survives."""

    data = np.zeros((4, 2, 2))
    data[0, 0, 0] = 4.9
    data[1, 1, 1] = 5.0
    data[3, 0, 1] = 12.0
    grid = VoxelGrid(2, 2, 2, data)

    filtered, zeroed = density_filter(grid, 5.0)
    assert zeroed == [(0, 0), (0, 1)]
    assert filtered.shape == grid.shape
    assert filtered.channel_mass()[0] == 0.0
    assert filtered.channel_mass()[1] == 5.0
    assert filtered.channel_mass()[3] == 12.0


def test_density_filter_zero_threshold_keeps_everything() -> None:
    """Ensure theta_dens = 0 is a no-op and negatives are refused."""

    grid = VoxelGrid.zeros(2, 3, 3)
    assert density_filter(grid, 0.0) == (grid, [])
    with pytest.raises(ValueError):
        density_filter(grid, -1.0)


@pytest.mark.parametrize("theta_dens", [0.0, 2.5, 5.0, 11.0])
def test_density_filter_is_idempotent(
    theta_dens: float, rng: np.random.Generator
) -> None:
    """Ensure filtering an already filtered grid changes nothing."""

    for _ in range(20):
        scale = rng.uniform(0.0, 0.8, 8)[:, None, None]
        grid = VoxelGrid(4, 6, 5, rng.random((8, 6, 5)) * scale)
        once, zeroed = density_filter(grid, theta_dens)
        twice, again = density_filter(once, theta_dens)
        np.testing.assert_array_equal(twice.data, once.data)
        assert again == zeroed

        # Surviving channels are untouched, zeroed ones are empty.
        for b, q in zeroed:
            assert not once.channel(b, q).any()
        kept = once.channel_mass() > 0
        np.testing.assert_array_equal(once.data[kept], grid.data[kept])


def test_evxg_round_trip(
    tmp_path: Path, make_stream: StreamFactory
) -> None:
    """Ensure EVXG files store the grid as little-endian f32."""

    stream = make_stream(300, width=9, height=7)
    grid = voxelize(stream, WINDOW, VoxelParams(bins=3))
    path = tmp_path / "grid.evxg"
    write_voxel_grid(path, grid)

    data = path.read_bytes()
    assert data[:4] == b"EVXG"
    assert int.from_bytes(data[4:8], "little") == 1
    assert len(data) == 4 + 4 * 4 + 4 * 6 * 7 * 9
    assert encode_voxel_grid(grid) == data

    loaded = read_voxel_grid(path)
    assert loaded.shape == grid.shape
    np.testing.assert_array_equal(
        loaded.data, grid.data.astype(np.float32).astype(np.float64)
    )


def test_evxg_rejects_truncated_file(tmp_path: Path) -> None:
    """Ensure a short EVXG file raises a FormatError."""

    path = tmp_path / "bad.evxg"
    path.write_bytes(encode_voxel_grid(VoxelGrid.zeros(2, 2, 2))[:-4])
    with pytest.raises(FormatError):
        read_voxel_grid(path)


def test_preprocess_removes_hot_pixel_before_voxelizing() -> None:
    """Ensure hot-pixel events never reach the grid."""

    hot = [Event(x=0, y=0, t=i, p=1) for i in range(20)]
    cold = [Event(x=2, y=2, t=100 + i, p=-1) for i in range(6)]
    stream = EventStream.from_events(hot + cold, 4, 4)

    result = preprocess_events(
        stream, WINDOW, VoxelParams(bins=2, theta_dens=0.0), 500.0
    )
    assert result.removed_pixels == frozenset({(0, 0)})
    assert result.window_events == 26
    assert result.kept_events == 6
    assert result.mass == pytest.approx((6.0, 0.0))
    assert result.summary()["shape"] == [4, 4, 4]
