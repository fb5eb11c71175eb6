"""Event stream model, CSV codec, windowing and hot-pixel filtering."""

from .event import Event
from .event_stream import EventStream
from .filters import hot_pixel_filter, restrict
from .stream_io import parse_stream, read_stream, save_stream, write_stream
from .time_window import TimeWindow

__all__ = [
    "Event",
    "EventStream",
    "TimeWindow",
    "hot_pixel_filter",
    "parse_stream",
    "read_stream",
    "restrict",
    "save_stream",
    "write_stream",
]
