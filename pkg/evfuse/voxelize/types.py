"""Common type aliases for voxel structures."""

from __future__ import annotations

# (b, q) pairs naming voxel channels.
Channel = tuple[int, int]
ChannelList = list[Channel]
