"""Time-ordered collection of events from one sensor."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np
from attrs import cmp_using, field, frozen, validators

from .event import Event
from .types import EventList


def _frozen_array(dtype: type) -> object:
    """Return an attrs converter producing read-only copies of ``dtype``."""

    def convert(value: object) -> np.ndarray:
        array = np.array(value, dtype=dtype, copy=True).reshape(-1)
        array.setflags(write=False)
        return array

    return convert


def _array_field(dtype: type) -> np.ndarray:
    return field(  # type: ignore[no-any-return]
        converter=_frozen_array(dtype),
        eq=cmp_using(eq=np.array_equal),
        repr=False,
        factory=lambda: np.zeros(0, dtype=dtype),
    )


@frozen(slots=True)
class EventStream:
    """Time-ordered collection of events from one sensor.

    Events are stored column-wise; :attr:`events` materializes them as
    :class:`Event` records when needed. Construction validates the sensor
    bounds, the polarity encoding and the non-decreasing time order.

    Attributes:
        sensor_width: Sensor width in pixels.
        sensor_height: Sensor height in pixels.
        t: Timestamps in microseconds.
        x: Pixel columns.
        y: Pixel rows.
        p: Polarities in ``{-1, +1}``.
    """

    sensor_width: int = field(validator=validators.gt(0))
    sensor_height: int = field(validator=validators.gt(0))
    t: np.ndarray = _array_field(np.int64)
    x: np.ndarray = _array_field(np.int64)
    y: np.ndarray = _array_field(np.int64)
    p: np.ndarray = _array_field(np.int8)

    def __attrs_post_init__(self) -> None:
        n = self.t.size
        if not (self.x.size == self.y.size == self.p.size == n):
            raise ValueError("Event columns must have equal lengths")
        if n == 0:
            return

        # Every coordinate must lie on the declared sensor grid.
        if self.x.min() < 0 or self.x.max() >= self.sensor_width:
            raise ValueError(
                f"x coordinate outside [0, {self.sensor_width})"
            )
        if self.y.min() < 0 or self.y.max() >= self.sensor_height:
            raise ValueError(
                f"y coordinate outside [0, {self.sensor_height})"
            )
        if not np.all((self.p == -1) | (self.p == 1)):
            raise ValueError("Polarity must be -1 or +1")
        if self.t.min() < 0:
            raise ValueError("Timestamps must be non-negative")

        # Same-microsecond events are legal, going back in time is not.
        if np.any(np.diff(self.t) < 0):
            raise ValueError("Timestamps must be non-decreasing")

    @classmethod
    def from_events(
        cls, events: Iterable[Event], width: int, height: int
    ) -> "EventStream":
        """Build a stream from event records.

        Args:
            events: Events in timestamp order.
            width: Sensor width in pixels.
            height: Sensor height in pixels.

        Returns:
            The validated stream.
        """

        items = list(events)
        return cls(
            sensor_width=width,
            sensor_height=height,
            t=[e.t for e in items],
            x=[e.x for e in items],
            y=[e.y for e in items],
            p=[e.p for e in items],
        )

    @classmethod
    def empty(cls, width: int, height: int) -> "EventStream":
        """Return a stream without events for the given sensor."""
        return cls(sensor_width=width, sensor_height=height)

    def __len__(self) -> int:
        return int(self.t.size)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    @property
    def events(self) -> EventList:
        """The events as :class:`Event` records, in stream order."""
        return [
            Event(x=int(x), y=int(y), t=int(t), p=int(p))
            for t, x, y, p in zip(self.t, self.x, self.y, self.p)
        ]

    @property
    def geometry(self) -> tuple[int, int]:
        """Sensor ``(width, height)``."""
        return (self.sensor_width, self.sensor_height)

    @property
    def pixel_index(self) -> np.ndarray:
        """Row-major flat pixel index ``y * width + x`` of every event."""
        return self.y * self.sensor_width + self.x

    def select(self, keep: np.ndarray) -> "EventStream":
        """Return the sub-stream picked by a boolean mask or index array.

        Args:
            keep: Boolean mask over events or increasing integer indices.

        Returns:
            New stream with the selected events, order preserved.
        """

        return EventStream(
            sensor_width=self.sensor_width,
            sensor_height=self.sensor_height,
            t=self.t[keep],
            x=self.x[keep],
            y=self.y[keep],
            p=self.p[keep],
        )

    def slice(self, start: int, stop: int) -> "EventStream":
        """Return events ``start`` to ``stop`` (exclusive) by position."""
        return self.select(np.arange(start, stop))
