"""Synthetic low-light degradation of clean images."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .image_tensor import ImageTensor, ValueRange


def degrade(
    clean: ImageTensor,
    gamma: float,
    sigma: float | Sequence[float],
    seed: int,
) -> ImageTensor:
    """Attenuate an image and add Gaussian sensor noise.

    Computes ``clip(gamma * I + N, 0, 1)`` where ``N`` is zero mean
    Gaussian noise with a per-channel standard deviation.

    Args:
        clean: Clean image with values in ``[0, 1]``.
        gamma: Photon flux attenuation in ``(0, 1]``.
        sigma: Noise standard deviation, one value or one per channel.
        seed: Seed of the noise generator.

    Returns:
        The degraded unit-range image; identical for identical seeds.

    Throws:
        ValueError: If ``gamma`` is outside ``(0, 1]``, a ``sigma`` is
            negative or the image is not unit valued.
    """

    if clean.value_range is not ValueRange.UNIT:
        raise ValueError("degrade expects an image with values in [0, 1]")
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")

    std = np.broadcast_to(
        np.asarray(sigma, dtype=np.float64), (clean.channels,)
    )
    if np.any(std < 0):
        raise ValueError(f"sigma must be non-negative, got {sigma}")

    # One independent draw per pixel, scaled per channel.
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(clean.data.shape) * std[:, None, None]
    out = np.clip(gamma * clean.data + noise, 0.0, 1.0)
    return ImageTensor(out, ValueRange.UNIT)
