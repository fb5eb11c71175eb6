"""Voxel grid construction, density filtering and EVXG serialization."""

from .grid_io import encode_voxel_grid, read_voxel_grid, write_voxel_grid
from .preprocess import PreprocessResult, preprocess_events
from .voxel_grid import VoxelGrid
from .voxel_params import VoxelParams
from .voxelize import (
    density_filter,
    kernel,
    normalize_timestamp,
    normalize_timestamps,
    temporal_resolution,
    voxelize,
)

__all__ = [
    "PreprocessResult",
    "VoxelGrid",
    "VoxelParams",
    "density_filter",
    "encode_voxel_grid",
    "kernel",
    "normalize_timestamp",
    "normalize_timestamps",
    "preprocess_events",
    "read_voxel_grid",
    "temporal_resolution",
    "voxelize",
    "write_voxel_grid",
]
