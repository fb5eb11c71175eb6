"""Parameters of the voxelization stage."""

from __future__ import annotations

from attrs import field, frozen, validators


@frozen(slots=True)
class VoxelParams:
    """Parameters of the voxelization stage.

    Attributes:
        bins: Temporal bins per polarity; the conservation argument needs
            at least two.
        theta_dens: Minimum event mass a ``(b, q)`` channel must reach to
            survive the density filter.
    """

    bins: int = field(default=4, validator=validators.ge(2))
    theta_dens: float = field(default=5.0, validator=validators.ge(0))
