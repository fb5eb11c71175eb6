"""Per-location noise variances of the two feature observations."""

from __future__ import annotations

import numpy as np
from attrs import cmp_using, field, frozen


def _as_array(value: object) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@frozen(slots=True)
class VarianceField:
    """Per-location noise variances of the two feature observations.

    Both fields share one shape, which may be a scalar, ``(H, W)`` or the
    full ``(C, H, W)`` feature shape.

    Attributes:
        sigma2_img: Noise variance of the image features.
        sigma2_evt: Noise variance of the event features.
    """

    sigma2_img: np.ndarray = field(
        converter=_as_array, eq=cmp_using(eq=np.array_equal)
    )
    sigma2_evt: np.ndarray = field(
        converter=_as_array, eq=cmp_using(eq=np.array_equal)
    )

    def __attrs_post_init__(self) -> None:
        if self.sigma2_img.shape != self.sigma2_evt.shape:
            raise ValueError(
                f"Variance fields differ in shape: {self.sigma2_img.shape} "
                f"vs {self.sigma2_evt.shape}"
            )
        if np.any(self.sigma2_img < 0) or np.any(self.sigma2_evt < 0):
            raise ValueError("Variances must be non-negative")
        if np.any((self.sigma2_img == 0) & (self.sigma2_evt == 0)):
            raise ValueError("Both variances are zero at some location")

    def swapped(self) -> "VarianceField":
        """Return the field with the two modalities exchanged."""
        return VarianceField(self.sigma2_evt, self.sigma2_img)
