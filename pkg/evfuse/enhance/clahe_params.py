"""Parameters of contrast limited adaptive histogram equalization."""

from __future__ import annotations

from enum import StrEnum

from attrs import field, frozen, validators


class ClaheMode(StrEnum):
    """How CLAHE treats color images."""

    PER_CHANNEL = "per_channel"
    LUMINANCE = "luminance"


@frozen(slots=True)
class ClaheParams:
    """Parameters of contrast limited adaptive histogram equalization.

    Attributes:
        tile_grid: Tiles per image side ``M``.
        clip_limit: Clip limit ``kappa`` in multiples of the uniform bin
            height; the absolute clip count of a tile is
            ``kappa * tile_pixels / gray_levels``.
        gray_levels: Number of histogram bins; must divide 256.
        mode: Equalize every channel independently or only the luminance.
    """

    tile_grid: int = field(default=8, validator=validators.ge(1))
    clip_limit: float = field(default=2.0, validator=validators.gt(0))
    gray_levels: int = field(default=256)
    mode: ClaheMode = field(default=ClaheMode.PER_CHANNEL, converter=ClaheMode)

    @gray_levels.validator
    def _check_levels(self, attribute: object, value: int) -> None:
        if value < 2 or 256 % value != 0:
            raise ValueError(f"gray_levels must divide 256, got {value}")
