"""Adaptive cross-modal fusion of image and event features.

A two layer convolutional head (1x1 then 3x3, ReLU between, sigmoid on
top) turns the concatenated features into a per-element weight ``alpha``
of the image branch; the fused map is ``alpha * f_img + (1 - alpha) *
f_evt``.
"""

from __future__ import annotations

import logging
from enum import StrEnum

import numpy as np
from attrs import frozen

from evfuse.numeric import clamp_open_unit, sigmoid

from .conv import conv2d
from .conv_weights import ConvWeights
from .feature_map import AttentionMap, FeatureMap

logger = logging.getLogger(__name__)

DEFAULT_REGULARIZER_WEIGHT = 1e-3


class FusionMode(StrEnum):
    """How image and event features are combined."""

    ADAPTIVE = "adaptive"
    UNIFORM = "uniform"
    RGB_ONLY = "rgb_only"
    EVENT_ONLY = "event_only"


@frozen
class AcmfWeights:
    """Parameters of the attention head.

    Attributes:
        w1: 1x1 layer from ``2C`` to a hidden width.
        w2: 3x3 layer from the hidden width back to ``C``.
    """

    w1: ConvWeights
    w2: ConvWeights

    def __attrs_post_init__(self) -> None:
        if self.w1.kernel_h != 1 or self.w1.kernel_w != 1:
            raise ValueError("w1 must be a 1x1 convolution")
        if self.w2.kernel_h != 3 or self.w2.kernel_w != 3:
            raise ValueError("w2 must be a 3x3 convolution")
        if self.w2.in_channels != self.w1.out_channels:
            raise ValueError(
                f"w2 expects {self.w2.in_channels} channels but w1 produces "
                f"{self.w1.out_channels}"
            )
        if self.w1.in_channels != 2 * self.w2.out_channels:
            raise ValueError(
                f"w1 takes {self.w1.in_channels} channels, expected twice "
                f"the {self.w2.out_channels} output channels"
            )

    @classmethod
    def zeros(cls, channels: int) -> "AcmfWeights":
        """All-zero head for ``channels`` feature channels."""
        return cls(
            ConvWeights.zeros(channels, 2 * channels, 1),
            ConvWeights.zeros(channels, channels, 3),
        )

    @property
    def channels(self) -> int:
        """Feature channels ``C`` the head is built for."""
        return self.w2.out_channels


def _check_pair(f_img: FeatureMap, f_evt: FeatureMap) -> None:
    if f_img.shape != f_evt.shape:
        raise ValueError(
            f"Feature maps differ in shape: {f_img.shape} vs {f_evt.shape}"
        )


def acmf_attention(
    f_img: FeatureMap, f_evt: FeatureMap, w1: ConvWeights, w2: ConvWeights
) -> AttentionMap:
    """Compute the spatially varying weight of the image branch.

    Args:
        f_img: Image features ``(C, H, W)``.
        f_evt: Event features of the same shape.
        w1: 1x1 layer taking the ``2C`` concatenated channels.
        w2: 3x3 layer producing ``C`` channels, applied with padding 1.

    Returns:
        Attention map of shape ``(C, H, W)`` strictly inside ``(0, 1)``.

    Throws:
        ValueError: On shape or channel mismatches.
    """

    _check_pair(f_img, f_evt)
    head = AcmfWeights(w1, w2)
    if head.channels != f_img.channels:
        raise ValueError(
            f"Head produces {head.channels} channels for "
            f"{f_img.channels} feature channels"
        )

    # Image channels first, then event channels.
    stacked = np.concatenate((f_img.data, f_evt.data), axis=0)

    # 1x1 mixing with ReLU, then a padded 3x3 layer back to C channels.
    hidden = np.maximum(conv2d(stacked, w1, padding=0), 0.0)
    logits = conv2d(hidden, w2, padding=1)
    return AttentionMap(clamp_open_unit(sigmoid(logits)))


def weighted_fuse(
    f_img: FeatureMap, f_evt: FeatureMap, alpha: AttentionMap
) -> FeatureMap:
    """Blend two feature maps with per-element weights.

    Computed as ``f_evt + alpha * (f_img - f_evt)``, which equals
    ``alpha * f_img + (1 - alpha) * f_evt`` and returns ``f`` exactly when
    both inputs are ``f``.

    Args:
        f_img: Image features.
        f_evt: Event features of the same shape.
        alpha: Weights of the image branch, either of the feature shape or
            a single channel shared by all channels.

    Returns:
        The fused feature map.

    Throws:
        ValueError: On shape mismatch.
    """

    _check_pair(f_img, f_evt)

    # A single channel alpha broadcasts over every feature channel.
    if not alpha.applies_to(f_img.shape):
        raise ValueError(
            f"Attention {alpha.shape} does not fit features {f_img.shape}"
        )
    return FeatureMap(f_evt.data + alpha.data * (f_img.data - f_evt.data))


def alpha_regularizer(
    alpha: AttentionMap, lam: float = DEFAULT_REGULARIZER_WEIGHT
) -> float:
    """Penalty ``lam * sum((alpha - 0.5)^2)`` pulling weights towards 0.5.

    Throws:
        ValueError: If ``lam`` is negative.
    """

    if lam < 0:
        raise ValueError(f"Regularizer weight must be >= 0, got {lam}")
    return float(lam * np.sum((alpha.data - 0.5) ** 2))


def alpha_regularizer_grad(
    alpha: AttentionMap, lam: float = DEFAULT_REGULARIZER_WEIGHT
) -> np.ndarray:
    """Gradient ``2 lam (alpha - 0.5)`` of :func:`alpha_regularizer`."""
    if lam < 0:
        raise ValueError(f"Regularizer weight must be >= 0, got {lam}")
    return 2.0 * lam * (alpha.data - 0.5)


@frozen
class FusionResult:
    """Fused features and the weights that produced them.

    Attributes:
        fused: Fused feature map.
        alpha: Image weights, or ``None`` for single modality modes.
        penalty: Regularizer penalty of ``alpha``; ``0`` without weights.
    """

    fused: FeatureMap
    alpha: AttentionMap | None
    penalty: float = 0.0


def fuse(
    f_img: FeatureMap,
    f_evt: FeatureMap,
    mode: FusionMode = FusionMode.ADAPTIVE,
    weights: AcmfWeights | None = None,
    reg_lambda: float = DEFAULT_REGULARIZER_WEIGHT,
) -> FusionResult:
    """Fuse one scale with the requested strategy.

    Args:
        f_img: Image features.
        f_evt: Event features.
        mode: Fusion strategy.
        weights: Attention head; required for ``adaptive``.
        reg_lambda: Weight of the penalty pulling ``alpha`` to 0.5.

    Returns:
        The fused features, the weights used and their penalty.

    Throws:
        ValueError: On shape mismatch, missing weights or a negative
            ``reg_lambda``.
    """

    _check_pair(f_img, f_evt)
    if reg_lambda < 0:
        raise ValueError(f"Regularizer weight must be >= 0, got {reg_lambda}")

    # Single modality modes pass one branch through untouched.
    if mode is FusionMode.RGB_ONLY:
        return FusionResult(f_img, None)
    if mode is FusionMode.EVENT_ONLY:
        return FusionResult(f_evt, None)

    if mode is FusionMode.UNIFORM:
        alpha = AttentionMap.constant(f_img.shape, 0.5)
    else:
        if weights is None:
            raise ValueError("Adaptive fusion needs attention weights")
        alpha = acmf_attention(f_img, f_evt, weights.w1, weights.w2)

    penalty = alpha_regularizer(alpha, reg_lambda)
    logger.debug(f"Fusion {mode.value}: alpha penalty {penalty:.6g}")
    return FusionResult(weighted_fuse(f_img, f_evt, alpha), alpha, penalty)


def fuse_pyramid(
    img_levels: dict[int, FeatureMap],
    evt_levels: dict[int, FeatureMap],
    mode: FusionMode = FusionMode.ADAPTIVE,
    weights: dict[int, AcmfWeights] | AcmfWeights | None = None,
    reg_lambda: float = DEFAULT_REGULARIZER_WEIGHT,
) -> dict[int, FusionResult]:
    """Fuse every pyramid scale independently.

    Args:
        img_levels: Image features keyed by scale ``s``.
        evt_levels: Event features with the same keys.
        mode: Fusion strategy applied at every scale.
        weights: One head per scale, or a single head shared by all.
        reg_lambda: Weight of the attention penalty at every scale.

    Returns:
        Fusion results keyed by scale, in ascending scale order.

    Throws:
        ValueError: If the scales differ or a head is missing.
    """

    if set(img_levels) != set(evt_levels):
        raise ValueError(
            f"Scales differ: {sorted(img_levels)} vs {sorted(evt_levels)}"
        )

    results: dict[int, FusionResult] = {}
    for scale in sorted(img_levels):

        # A dict holds one head per scale; a single head is shared.
        head = weights.get(scale) if isinstance(weights, dict) else weights
        if mode is FusionMode.ADAPTIVE and head is None:
            raise ValueError(f"No attention weights for scale {scale}")
        results[scale] = fuse(
            img_levels[scale], evt_levels[scale], mode, head, reg_lambda
        )
        logger.debug(f"Fused scale {scale} with {mode.value}")
    return results
