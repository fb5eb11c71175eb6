"""Composed types of the detection stage."""

from typing import Protocol, Sequence, TypeAlias

from .anchor import Anchor
from .bbox import BBox

AnchorSet: TypeAlias = Sequence[Anchor]
AnchorTable: TypeAlias = dict[int, AnchorSet]
StrideTable: TypeAlias = dict[int, int]
GridShapes: TypeAlias = dict[int, tuple[int, int]]


class LabeledBox(Protocol):
    """Anything carrying a box and a class id, e.g. a ground-truth box."""

    @property
    def box(self) -> BBox: ...

    @property
    def class_id(self) -> int: ...
