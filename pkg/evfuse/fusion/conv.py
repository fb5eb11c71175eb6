"""Direct 2-D convolution and the channel-averaging weight transform."""

from __future__ import annotations

import numpy as np

from .conv_weights import ConvWeights


def conv2d(x: np.ndarray, layer: ConvWeights, padding: int = 0) -> np.ndarray:
    """Stride 1 convolution with zero padding and bias.

    Args:
        x: Input of shape ``(in, H, W)``.
        layer: Kernel and bias.
        padding: Zero rows and columns added on each side.

    Returns:
        Output of shape ``(out, H + 2p - kh + 1, W + 2p - kw + 1)``.

    Throws:
        ValueError: On a channel mismatch or a kernel larger than the
            padded input.
    """

    if x.ndim != 3 or x.shape[0] != layer.in_channels:
        raise ValueError(
            f"Input {x.shape} does not match {layer.in_channels} input "
            f"channels"
        )
    # Zero padding on both spatial axes only.
    padded = np.pad(
        x.astype(np.float64), ((0, 0), (padding, padding), (padding, padding))
    )
    out_h = padded.shape[1] - layer.kernel_h + 1
    out_w = padded.shape[2] - layer.kernel_w + 1
    if out_h <= 0 or out_w <= 0:
        raise ValueError("Kernel larger than the padded input")

    # Start from the bias and add one kernel tap at a time.
    out = np.broadcast_to(
        layer.bias[:, None, None], (layer.out_channels, out_h, out_w)
    ).copy()
    for i in range(layer.kernel_h):
        for j in range(layer.kernel_w):
            # Input shifted by the tap offset, contracted over channels.
            window = padded[:, i : i + out_h, j : j + out_w]
            out += np.einsum("oc,chw->ohw", layer.weights[:, :, i, j], window)
    return out


def channel_avg_init(
    w_rgb: ConvWeights, target_in: int = 8, source_in: int = 3
) -> ConvWeights:
    """Initialize a first layer for ``target_in`` channels from RGB weights.

    Every output filter and kernel position gets the mean of its
    ``source_in`` input slices, copied into all ``target_in`` slices. The
    mean is taken relative to the first slice so identical slices are
    reproduced exactly.

    Args:
        w_rgb: Pretrained layer with ``source_in`` input channels.
        target_in: Input channels of the new layer, ``2B`` for voxel grids.
        source_in: Expected input channels of ``w_rgb``.

    Returns:
        The new layer; spatial size, output channels and bias unchanged.

    Throws:
        ValueError: If ``w_rgb`` does not have ``source_in`` input channels
            or ``target_in < 1``.
    """

    if w_rgb.in_channels != source_in:
        raise ValueError(
            f"Expected {source_in} input channels, got {w_rgb.in_channels}"
        )
    if target_in < 1:
        raise ValueError(f"target_in must be >= 1, got {target_in}")

    # Mean relative to the first slice, exact for identical slices.
    first = w_rgb.weights[:, :1]
    offsets = (w_rgb.weights - first).sum(axis=1, keepdims=True)
    mean = first + offsets / source_in
    weights = np.repeat(mean, target_in, axis=1)
    return ConvWeights(weights, w_rgb.bias)
