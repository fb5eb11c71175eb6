"""Raw outputs of the detection head over the feature pyramid."""

from __future__ import annotations

import numpy as np
from attrs import cmp_using, field, frozen

from .detection import NUM_CLASSES

# t_x, t_y, t_w, t_h, t_obj and one logit per class.
VALUES_PER_ANCHOR = 5 + NUM_CLASSES


def _levels(value: dict[int, object]) -> dict[int, np.ndarray]:
    levels = {}
    for scale, grid in sorted(value.items()):
        array = np.array(grid, dtype=np.float64, copy=True)
        array.setflags(write=False)
        levels[int(scale)] = array
    return levels


def _levels_equal(a: dict[int, np.ndarray], b: dict[int, np.ndarray]) -> bool:
    return a.keys() == b.keys() and all(
        np.array_equal(a[k], b[k]) for k in a
    )


@frozen
class RawPrediction:
    """Raw head outputs keyed by pyramid scale.

    Attributes:
        levels: For each scale ``s`` an array ``(H_s, W_s, A, 8)`` holding
            ``(t_x, t_y, t_w, t_h, t_obj, t_1, t_2, t_3)`` per anchor.
    """

    levels: dict[int, np.ndarray] = field(
        converter=_levels, eq=cmp_using(eq=_levels_equal), repr=False
    )

    def __attrs_post_init__(self) -> None:
        for scale, grid in self.levels.items():
            if grid.ndim != 4 or grid.shape[3] != VALUES_PER_ANCHOR:
                raise ValueError(
                    f"Scale {scale}: expected (H, W, A, {VALUES_PER_ANCHOR}), "
                    f"got {grid.shape}"
                )
            if not np.all(np.isfinite(grid)):
                raise ValueError(f"Scale {scale}: non-finite raw values")

    def level(self, scale: int) -> np.ndarray:
        """Return the raw grid of ``scale``.

        Throws:
            ValueError: If the scale is absent.
        """

        if scale not in self.levels:
            raise ValueError(
                f"No predictions for scale {scale}; have {sorted(self.levels)}"
            )
        return self.levels[scale]

    @property
    def scales(self) -> list[int]:
        """Pyramid scales in ascending order."""
        return sorted(self.levels)

    def grid_shapes(self) -> dict[int, tuple[int, int]]:
        """``(H, W)`` of every scale."""
        return {s: (g.shape[0], g.shape[1]) for s, g in self.levels.items()}
