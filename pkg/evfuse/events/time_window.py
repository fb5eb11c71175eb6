"""Half-open time interval used to slice event streams."""

from __future__ import annotations

from attrs import field, frozen, validators


@frozen(slots=True)
class TimeWindow:
    """Half-open time interval ``[t0, t0 + dt)`` in microseconds.

    Events stamped exactly at ``t0 + dt`` belong to the next window, so
    adjacent windows never count the same event twice.

    Attributes:
        t0: Start of the window in microseconds.
        dt: Window length in microseconds.
    """

    t0: int
    dt: int = field(validator=validators.gt(0))

    @property
    def t1(self) -> int:
        """Exclusive end of the window."""
        return self.t0 + self.dt

    def contains(self, t: int) -> bool:
        """Tell whether timestamp ``t`` falls inside the window.

        Args:
            t: Timestamp in microseconds.

        Returns:
            ``True`` when ``t0 <= t < t0 + dt``.
        """
        return self.t0 <= t < self.t1
