"""Read and write event streams in the evfuse CSV format.

The format is ASCII with LF line endings. The first line is a header
``# evfuse-events v1 W=<int> H=<int>``; each following line is
``t_us,x,y,p``. The writer always emits ``p`` as ``-1`` or ``1``; the reader
also accepts ``0`` for negative polarity.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path

from evfuse.errors import FormatError

from .event_stream import EventStream
from .types import Geometry

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# evfuse-events v1"
_HEADER_RE = re.compile(r"^# evfuse-events v1 W=(\d+) H=(\d+)$")

# Accepted polarity encodings and their canonical value.
_POLARITY = {"1": 1, "+1": 1, "-1": -1, "0": -1}

# Plain ASCII integer, no padding, underscores or explicit plus sign.
_INT_RE = re.compile(r"-?[0-9]+")


def _parse_header(line: str, geometry: Geometry | None) -> Geometry:
    """Decode the header line and reconcile it with ``geometry``.

    Args:
        line: First line of the file.
        geometry: Expected ``(width, height)``, if the caller knows it.

    Returns:
        Sensor ``(width, height)``.

    Throws:
        FormatError: If the header is malformed or contradicts
            ``geometry``.
    """

    match = _HEADER_RE.match(line)
    if match is None:
        raise FormatError(f"Malformed header {line!r}", line=1)
    found = (int(match.group(1)), int(match.group(2)))
    if found[0] <= 0 or found[1] <= 0:
        raise FormatError(f"Sensor geometry must be positive: {found}", 1)
    if geometry is not None and tuple(geometry) != found:
        raise FormatError(
            f"Header geometry {found} differs from expected {geometry}",
            line=1,
        )
    return found


def parse_stream(
    data: bytes, geometry: Geometry | None = None
) -> EventStream:
    """Parse the content of an event CSV file.

    The header may be omitted when ``geometry`` is given.

    Args:
        data: Raw file content.
        geometry: Sensor ``(width, height)``; required without a header.

    Returns:
        The validated, time-ordered stream.

    Throws:
        FormatError: On malformed lines, out-of-bounds coordinates,
            decreasing timestamps or unknown polarity values. The message
            names the offending line.
    """

    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"Event file is not ASCII: {exc}") from exc

    lines = text.split("\n")

    # A terminating LF leaves one empty element behind.
    if lines and lines[-1] == "":
        lines.pop()

    # Resolve the sensor geometry from the header or the caller.
    first_data = 0
    if lines and lines[0].startswith("#"):
        width, height = _parse_header(lines[0], geometry)
        first_data = 1
    elif geometry is not None:
        width, height = geometry
    else:
        raise FormatError("Missing header and no geometry given", line=1)

    ts: list[int] = []
    xs: list[int] = []
    ys: list[int] = []
    ps: list[int] = []
    prev_t = -1
    for number, line in enumerate(lines[first_data:], start=first_data + 1):
        parts = line.split(",")
        if len(parts) != 4:
            raise FormatError(
                f"Expected 4 comma separated fields, got {len(parts)}",
                line=number,
            )

        # Fields are bare integers; whitespace, CR and "1_0" are refused.
        if not all(_INT_RE.fullmatch(part) for part in parts[:3]):
            raise FormatError(f"Non-integer field in {line!r}", line=number)
        t, x, y = int(parts[0]), int(parts[1]), int(parts[2])

        p = _POLARITY.get(parts[3])
        if p is None:
            raise FormatError(
                f"Polarity {parts[3]!r} not in {{-1,0,1}}", line=number
            )

        if not (0 <= x < width and 0 <= y < height):
            raise FormatError(
                f"Coordinate ({x}, {y}) outside {width}x{height} sensor",
                line=number,
            )
        if t < 0:
            raise FormatError(f"Negative timestamp {t}", line=number)
        if t < prev_t:
            raise FormatError(
                f"Timestamp {t} precedes previous timestamp {prev_t}",
                line=number,
            )
        prev_t = t

        ts.append(t)
        xs.append(x)
        ys.append(y)
        ps.append(p)

    logger.debug(f"Parsed {len(ts)} events on a {width}x{height} sensor")
    return EventStream(
        sensor_width=width, sensor_height=height, t=ts, x=xs, y=ys, p=ps
    )


def write_stream(stream: EventStream) -> bytes:
    """Serialize a stream to the evfuse CSV format.

    Args:
        stream: Stream to serialize.

    Returns:
        File content, header included, ending with a LF.
    """

    header = (
        f"{HEADER_PREFIX} W={stream.sensor_width} H={stream.sensor_height}\n"
    )
    body = "".join(
        f"{t},{x},{y},{p}\n"
        for t, x, y, p in zip(
            stream.t.tolist(),
            stream.x.tolist(),
            stream.y.tolist(),
            stream.p.tolist(),
        )
    )
    return (header + body).encode("ascii")


def read_stream(path: Path, geometry: Geometry | None = None) -> EventStream:
    """Read and parse an event CSV file.

    Args:
        path: File to read.
        geometry: Sensor ``(width, height)``; required without a header.

    Returns:
        The validated stream.
    """

    return parse_stream(path.read_bytes(), geometry)


def save_stream(path: Path, stream: EventStream) -> None:
    """Write ``stream`` to ``path`` in the evfuse CSV format."""
    path.write_bytes(write_stream(stream))
