"""EVXG binary format for voxel grids.

Layout: magic ``EVXG``, ``u32`` version 1, ``u32`` B, H, W, then
``2B * H * W`` little-endian ``f32`` values in (channel, row, column) order.
"""

from __future__ import annotations

from pathlib import Path

from evfuse.tensor_io import TensorReader, pack_f32, pack_header

from .voxel_grid import VoxelGrid

MAGIC = b"EVXG"


def encode_voxel_grid(grid: VoxelGrid) -> bytes:
    """Serialize a grid to EVXG bytes.

    Args:
        grid: Grid to serialize.

    Returns:
        Encoded file content.
    """

    header = pack_header(MAGIC, grid.bins, grid.height, grid.width)
    return header + pack_f32(grid.data)


def write_voxel_grid(path: Path, grid: VoxelGrid) -> None:
    """Write ``grid`` to ``path`` in EVXG format."""
    path.write_bytes(encode_voxel_grid(grid))


def read_voxel_grid(path: Path) -> VoxelGrid:
    """Read an EVXG file.

    Args:
        path: File to read.

    Returns:
        The stored grid, widened to double precision.

    Throws:
        FormatError: If the file is not a valid EVXG file.
    """

    reader = TensorReader.open(path, MAGIC)
    bins, height, width = reader.u32(3)
    data = reader.f32((2 * bins, height, width))
    reader.finish()
    return VoxelGrid(bins, height, width, data)
