"""A single asynchronous event emitted by an event camera."""

from __future__ import annotations

from attrs import field, frozen, validators


@frozen(slots=True)
class Event:
    """A single asynchronous event emitted by an event camera.

    Attributes:
        x: Pixel column, zero based.
        y: Pixel row, zero based.
        t: Timestamp in microseconds.
        p: Polarity, ``-1`` or ``+1``.
    """

    x: int = field(validator=validators.ge(0))
    y: int = field(validator=validators.ge(0))
    t: int = field(validator=validators.ge(0))
    p: int = field(validator=validators.in_((-1, 1)))

    @property
    def q(self) -> int:
        """Polarity channel index: ``0`` for negative, ``1`` for positive."""
        return (self.p + 1) // 2
