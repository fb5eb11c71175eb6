"""EVWT convolution weights and EVFT feature map formats.

EVWT: magic, ``u32`` version 1, ``u32`` out, in, kh, kw, then the weights
as ``f32`` in that order followed by ``out`` ``f32`` biases.

EVFT: magic, ``u32`` version 1, ``u32`` C, H, W, then ``C * H * W``
``f32`` values.
"""

from __future__ import annotations

from pathlib import Path

from evfuse.tensor_io import TensorReader, pack_f32, pack_header

from .acmf import AcmfWeights
from .conv_weights import ConvWeights
from .feature_map import FeatureMap

WEIGHTS_MAGIC = b"EVWT"
FEATURE_MAGIC = b"EVFT"


def encode_weights(layer: ConvWeights) -> bytes:
    """Serialize a convolution layer to EVWT bytes."""
    header = pack_header(WEIGHTS_MAGIC, *layer.weights.shape)
    return header + pack_f32(layer.weights) + pack_f32(layer.bias)


def write_weights(path: Path, layer: ConvWeights) -> None:
    """Write ``layer`` to ``path`` in EVWT format."""
    path.write_bytes(encode_weights(layer))


def read_weights(path: Path) -> ConvWeights:
    """Read an EVWT file.

    Throws:
        FormatError: If the file is not a valid EVWT file.
    """

    # Weights are (C_out, C_in, k, k), followed by one bias per output.
    reader = TensorReader.open(path, WEIGHTS_MAGIC)
    shape = reader.u32(4)
    weights = reader.f32(shape)
    bias = reader.f32((shape[0],))
    reader.finish()
    return ConvWeights(weights, bias)


def read_acmf_weights(directory: Path) -> AcmfWeights:
    """Load the attention head stored as ``w1.evwt`` and ``w2.evwt``."""
    return AcmfWeights(
        read_weights(directory / "w1.evwt"),
        read_weights(directory / "w2.evwt"),
    )


def encode_feature_map(features: FeatureMap) -> bytes:
    """Serialize a feature map to EVFT bytes."""
    header = pack_header(FEATURE_MAGIC, *features.shape)
    return header + pack_f32(features.data)


def write_feature_map(path: Path, features: FeatureMap) -> None:
    """Write ``features`` to ``path`` in EVFT format."""
    path.write_bytes(encode_feature_map(features))


def read_feature_map(path: Path) -> FeatureMap:
    """Read an EVFT file.

    Throws:
        FormatError: If the file is not a valid EVFT file.
    """

    reader = TensorReader.open(path, FEATURE_MAGIC)
    data = reader.f32(reader.u32(3))
    reader.finish()
    return FeatureMap(data)
