"""Common type aliases for event structures."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .event import Event  # noqa: F401

EventList = list["Event"]
Pixel = tuple[int, int]
PixelSet = frozenset[Pixel]
Geometry = tuple[int, int]
