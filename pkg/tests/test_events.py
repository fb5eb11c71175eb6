"""Tests for the event model, CSV codec, windowing and hot-pixel filter."""

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from evfuse.errors import FormatError
from evfuse.events import (
    Event,
    EventStream,
    TimeWindow,
    hot_pixel_filter,
    parse_stream,
    read_stream,
    restrict,
    save_stream,
    write_stream,
)
from evfuse.events.filters import pixel_counts

HEADER = b"# evfuse-events v1 W=346 H=260\n"

StreamFactory = Callable[..., EventStream]


def _stream(
    times: list[int], pixels: list[tuple[int, int]]
) -> EventStream:
    return EventStream.from_events(
        [Event(x=x, y=y, t=t, p=1) for t, (x, y) in zip(times, pixels)],
        width=8,
        height=8,
    )


def test_parse_header_only_is_empty() -> None:
    """Ensure a file holding only the header yields an empty stream."""

    stream = parse_stream(HEADER)
    assert len(stream) == 0
    assert stream.geometry == (346, 260)


def test_parse_single_line_with_geometry() -> None:
    """Ensure a headerless line is decoded with the caller's geometry."""

    stream = parse_stream(b"100,5,7,1\n", geometry=(346, 260))
    assert stream.events == [Event(x=5, y=7, t=100, p=1)]


def test_parse_maps_zero_polarity_to_negative() -> None:
    """Ensure polarity 0 is read as -1."""

    stream = parse_stream(HEADER + b"1,0,0,0\n2,1,1,-1\n3,2,2,+1\n")
    assert stream.p.tolist() == [-1, -1, 1]


def test_round_trip_is_bit_exact(make_stream: StreamFactory) -> None:
    """Ensure writing and parsing 1000 events reproduces the bytes."""

    stream = make_stream(1000)
    data = write_stream(stream)
    parsed = parse_stream(data)
    assert parsed == stream
    assert write_stream(parsed) == data
    assert data.startswith(HEADER)


def test_read_and_save_stream(
    tmp_path: Path, make_stream: StreamFactory
) -> None:
    """Ensure streams survive a trip through a file."""

    stream = make_stream(50)
    path = tmp_path / "events.csv"
    save_stream(path, stream)
    assert read_stream(path) == stream


@pytest.mark.parametrize(
    "body, line, fragment",
    [
        (b"1,2,3\n", 2, "4 comma"),
        (b"1,a,3,1\n", 2, "Non-integer"),
        (b"1,2,3,2\n", 2, "Polarity"),
        (b"1,400,3,1\n", 2, "outside"),
        (b"5,1,1,1\n4,1,1,1\n", 3, "precedes"),
        (b"-1,1,1,1\n", 2, "Negative"),
        (b"1_0,5,7,1\n", 2, "Non-integer"),
        (b"10, 5,7,1\n", 2, "Non-integer"),
        (b"+10,5,7,1\n", 2, "Non-integer"),
        (b"10,5,7,1 \n", 2, "Polarity"),
        (b"10,5,7,1\r\n", 2, "Polarity"),
        (b"10,5,7,1\n20,5,7,1\r\n", 3, "Polarity"),
        (b"10,5,7,\n", 2, "Polarity"),
        (b"1_0,5,7,1\n20,5,7,1\r\n", 2, "Non-integer"),
    ],
)
def test_parse_errors_name_the_line(
    body: bytes, line: int, fragment: str
) -> None:
    """Ensure malformed input raises a FormatError with the line."""

    with pytest.raises(FormatError) as info:
        parse_stream(HEADER + body)
    assert info.value.line == line
    assert fragment in str(info.value)
    assert str(info.value).startswith(f"line {line}:")


def test_parse_requires_geometry_without_header() -> None:
    """Ensure headerless data without a geometry is rejected."""

    with pytest.raises(FormatError):
        parse_stream(b"1,2,3,1\n")


def test_parse_rejects_conflicting_geometry() -> None:
    """Ensure a header contradicting the caller's geometry fails."""

    with pytest.raises(FormatError):
        parse_stream(HEADER, geometry=(640, 480))


def test_stream_rejects_decreasing_time() -> None:
    """Ensure the stream constructor enforces time order."""

    with pytest.raises(ValueError):
        EventStream(
            sensor_width=4,
            sensor_height=4,
            t=[2, 1],
            x=[0, 0],
            y=[0, 0],
            p=[1, 1],
        )


def test_stream_allows_equal_timestamps() -> None:
    """Ensure same-microsecond events are legal."""

    stream = _stream([5, 5, 5], [(0, 0), (1, 1), (2, 2)])
    assert len(stream) == 3


def test_event_polarity_channel() -> None:
    """Ensure polarity is validated and mapped to its channel block."""

    with pytest.raises(ValueError):
        Event(x=0, y=0, t=0, p=0)
    assert Event(x=0, y=0, t=0, p=-1).q == 0
    assert Event(x=0, y=0, t=0, p=1).q == 1


def test_restrict_half_open_boundaries() -> None:
    """Ensure only the event inside [15, 25) survives."""

    stream = _stream([10, 20, 30], [(0, 0), (1, 1), (2, 2)])
    out = restrict(stream, TimeWindow(t0=15, dt=10))
    assert out.t.tolist() == [20]


def test_restrict_excludes_window_end() -> None:
    """Ensure an event at t0 + dt belongs to the next window."""

    stream = _stream([0, 10], [(0, 0), (1, 1)])
    assert restrict(stream, TimeWindow(0, 10)).t.tolist() == [0]
    assert restrict(stream, TimeWindow(10, 10)).t.tolist() == [10]


def test_restrict_covering_window_is_identity() -> None:
    """Ensure a window covering every event keeps the stream."""

    stream = _stream([10, 20, 30], [(0, 0), (1, 1), (2, 2)])
    assert restrict(stream, TimeWindow(0, 100)) == stream


def test_restrict_matches_linear_scan(
    make_stream: StreamFactory, rng: np.random.Generator
) -> None:
    """Ensure binary search windowing equals a brute-force filter."""

    stream = make_stream(10_000)
    t0 = int(rng.integers(0, 20000))
    window = TimeWindow(t0, int(rng.integers(1, 15000)))
    expected = [e for e in stream.events if window.contains(e.t)]

    out = restrict(stream, window)
    assert out.events == expected
    assert restrict(out, window) == out


def test_hot_pixel_threshold_is_strict() -> None:
    """Ensure at 500 Hz over 30 ms 16 events are hot and 15 are not."""

    pixels = [(1, 1)] * 16 + [(2, 2)] * 15
    stream = _stream(list(range(len(pixels))), pixels)

    out, removed = hot_pixel_filter(stream, TimeWindow(0, 30000), 500.0)
    assert removed == frozenset({(1, 1)})
    assert len(out) == 15
    assert set(zip(out.x.tolist(), out.y.tolist())) == {(2, 2)}


def test_hot_pixel_noop_on_sparse_stream(
    make_stream: StreamFactory,
) -> None:
    """Ensure a sparse stream is returned unchanged."""

    stream = make_stream(500)
    out, removed = hot_pixel_filter(stream, TimeWindow(0, 30000), 500.0)
    assert removed == frozenset()
    assert out == stream


def test_hot_pixel_invariants(
    make_stream: StreamFactory, rng: np.random.Generator
) -> None:
    """Ensure no survivor is hot and other pixels keep their events."""

    base = make_stream(2000, width=16, height=12)

    # Two pixels get 30 extra events each.
    t = np.concatenate((base.t, np.sort(rng.integers(0, 30000, 60))))
    x = np.concatenate((base.x, np.where(np.arange(60) % 2, 3, 7)))
    y = np.concatenate((base.y, np.full(60, 5)))
    p = np.concatenate((base.p, np.ones(60, dtype=np.int8)))
    order = np.argsort(t, kind="stable")
    stream = EventStream(
        sensor_width=16,
        sensor_height=12,
        t=t[order],
        x=x[order],
        y=y[order],
        p=p[order],
    )

    window = TimeWindow(0, 30000)
    out, removed = hot_pixel_filter(stream, window, 500.0)

    counts = pixel_counts(restrict(out, window))
    assert not np.any(counts * 1_000_000 > 500.0 * window.dt)
    assert {(3, 5), (7, 5)} <= removed

    def kept(s: EventStream) -> list[tuple[int, int, int, int]]:
        return sorted(
            (e.t, e.x, e.y, e.p)
            for e in s.events
            if (e.x, e.y) not in removed
        )

    assert kept(out) == kept(stream)
    assert all((e.x, e.y) not in removed for e in out.events)


def test_hot_pixel_rejects_non_positive_threshold() -> None:
    """Ensure theta_hot must be positive."""

    with pytest.raises(ValueError):
        hot_pixel_filter(_stream([1], [(0, 0)]), TimeWindow(0, 10), 0.0)
