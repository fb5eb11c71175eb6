"""Feature and attention tensors exchanged by the fusion stage."""

from __future__ import annotations

import numpy as np
from attrs import cmp_using, field, frozen


def _read_only(value: object) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@frozen(slots=True)
class FeatureMap:
    """Feature tensor of one pyramid scale.

    Attributes:
        data: Finite values of shape ``(C, H, W)``.
    """

    data: np.ndarray = field(
        converter=_read_only, eq=cmp_using(eq=np.array_equal), repr=False
    )

    def __attrs_post_init__(self) -> None:
        if self.data.ndim != 3:
            raise ValueError(f"Feature map must be (C, H, W), got "
                             f"{self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("Feature map contains non-finite values")

    @property
    def shape(self) -> tuple[int, int, int]:
        """Tensor shape ``(C, H, W)``."""
        return self.data.shape  # type: ignore[return-value]

    @property
    def channels(self) -> int:
        """Number of channels ``C``."""
        return int(self.data.shape[0])


@frozen(slots=True)
class AttentionMap:
    """Fusion weights of the image branch, strictly inside ``(0, 1)``.

    The map either matches the feature shape ``(C, H, W)`` or has a single
    channel ``(1, H, W)`` that is shared by all feature channels.

    Attributes:
        data: Weights of shape ``(C, H, W)`` or ``(1, H, W)``.
    """

    data: np.ndarray = field(
        converter=_read_only, eq=cmp_using(eq=np.array_equal), repr=False
    )

    def __attrs_post_init__(self) -> None:
        if self.data.ndim != 3:
            raise ValueError(f"Attention map must be 3-D, got "
                             f"{self.data.shape}")
        if self.data.size and not (
            self.data.min() > 0.0 and self.data.max() < 1.0
        ):
            raise ValueError("Attention values must lie strictly in (0, 1)")

    @classmethod
    def constant(
        cls, shape: tuple[int, int, int], value: float
    ) -> "AttentionMap":
        """Return a map filled with ``value``."""
        return cls(np.full(shape, value, dtype=np.float64))

    @property
    def shape(self) -> tuple[int, int, int]:
        """Tensor shape."""
        return self.data.shape  # type: ignore[return-value]

    def applies_to(self, shape: tuple[int, ...]) -> bool:
        """Tell whether the map can weight features of ``shape``."""
        return self.data.shape == tuple(shape) or (
            self.data.shape[0] == 1 and self.data.shape[1:] == shape[1:]
        )
