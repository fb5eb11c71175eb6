"""Weights and bias of one 2-D convolution layer."""

from __future__ import annotations

import numpy as np
from attrs import cmp_using, field, frozen


def _read_only(value: object) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@frozen(slots=True)
class ConvWeights:
    """Weights and bias of one 2-D convolution layer.

    Attributes:
        weights: Kernel of shape ``(out, in, kh, kw)``.
        bias: Bias vector of shape ``(out,)``.
    """

    weights: np.ndarray = field(
        converter=_read_only, eq=cmp_using(eq=np.array_equal), repr=False
    )
    bias: np.ndarray = field(
        converter=_read_only, eq=cmp_using(eq=np.array_equal), repr=False
    )

    def __attrs_post_init__(self) -> None:
        if self.weights.ndim != 4:
            raise ValueError(
                f"Weights must be (out, in, kh, kw), got "
                f"{self.weights.shape}"
            )
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError(
                f"Bias shape {self.bias.shape} does not match "
                f"{self.weights.shape[0]} output channels"
            )
        if not (
            np.all(np.isfinite(self.weights))
            and np.all(np.isfinite(self.bias))
        ):
            raise ValueError("Convolution parameters must be finite")

    @classmethod
    def zeros(
        cls, out_channels: int, in_channels: int, kernel: int
    ) -> "ConvWeights":
        """Return an all-zero layer with a square kernel."""
        return cls(
            np.zeros((out_channels, in_channels, kernel, kernel)),
            np.zeros(out_channels),
        )

    @property
    def out_channels(self) -> int:
        """Number of output channels."""
        return int(self.weights.shape[0])

    @property
    def in_channels(self) -> int:
        """Number of input channels."""
        return int(self.weights.shape[1])

    @property
    def kernel_h(self) -> int:
        """Kernel height."""
        return int(self.weights.shape[2])

    @property
    def kernel_w(self) -> int:
        """Kernel width."""
        return int(self.weights.shape[3])
