"""Minimum-variance analysis and adaptive fusion of feature maps."""

from .acmf import (
    DEFAULT_REGULARIZER_WEIGHT,
    AcmfWeights,
    FusionMode,
    FusionResult,
    acmf_attention,
    alpha_regularizer,
    alpha_regularizer_grad,
    fuse,
    fuse_pyramid,
    weighted_fuse,
)
from .conv import channel_avg_init, conv2d
from .conv_weights import ConvWeights
from .feature_map import AttentionMap, FeatureMap
from .theory import (
    FusionSimReport,
    RunningMoments,
    alpha_grid,
    combination_variance,
    estimate_alpha_from_samples,
    fused_variance,
    optimal_alpha,
    simulate_fusion,
)
from .variance_field import VarianceField
from .weights_io import (
    encode_feature_map,
    encode_weights,
    read_acmf_weights,
    read_feature_map,
    read_weights,
    write_feature_map,
    write_weights,
)

__all__ = [
    "DEFAULT_REGULARIZER_WEIGHT",
    "AcmfWeights",
    "AttentionMap",
    "ConvWeights",
    "FeatureMap",
    "FusionMode",
    "FusionResult",
    "FusionSimReport",
    "RunningMoments",
    "VarianceField",
    "acmf_attention",
    "alpha_grid",
    "alpha_regularizer",
    "alpha_regularizer_grad",
    "channel_avg_init",
    "combination_variance",
    "conv2d",
    "encode_feature_map",
    "encode_weights",
    "estimate_alpha_from_samples",
    "fuse",
    "fuse_pyramid",
    "fused_variance",
    "optimal_alpha",
    "read_acmf_weights",
    "read_feature_map",
    "read_weights",
    "simulate_fusion",
    "weighted_fuse",
    "write_feature_map",
    "write_weights",
]
