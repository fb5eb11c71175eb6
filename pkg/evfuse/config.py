"""Pipeline configuration: packaged defaults, user files and overrides.

Values are resolved in the order command-line flag, configuration file,
packaged defaults. Every section is an attrs class whose validators raise
:class:`~evfuse.errors.ConfigError` naming the dotted field path.
"""

from __future__ import annotations

import copy
import functools
import logging
from importlib.resources import files
from pathlib import Path
from typing import Any, Callable, ClassVar, Mapping

import yaml  # type: ignore[import-untyped]
from attrs import Attribute, field, fields, frozen

from evfuse.detect import AssignStrategy, parse_anchors, stride_for
from evfuse.detect.types import AnchorTable
from evfuse.enhance import ClaheMode, ClaheParams
from evfuse.errors import ConfigError, FormatError
from evfuse.events import TimeWindow
from evfuse.fusion import FusionMode
from evfuse.json_utils import json_loads
from evfuse.voxelize import VoxelParams

logger = logging.getLogger(__name__)

JSONDict = dict[str, Any]

DEFAULT_CONFIG = "default_config.yaml"


def _require(
    predicate: Callable[[Any], bool], message: str
) -> Callable[[Any, Attribute, Any], None]:
    """Validator raising :class:`ConfigError` with the field path."""

    def check(instance: Any, attribute: Attribute, value: Any) -> None:
        if not predicate(value):
            raise ConfigError(f"{instance.SECTION}.{attribute.name}", message)

    return check


def _unit_interval(value: float) -> bool:
    return 0.0 <= value <= 1.0


def _non_negative(value: float) -> bool:
    return value >= 0


def _positive(value: float) -> bool:
    return value > 0


@frozen
class WindowConfig:
    """Time window of the voxelized events."""

    SECTION: ClassVar[str] = "window"

    t0: int = field(
        default=0,
        converter=int,
        validator=_require(_non_negative, "must be >= 0"),
    )
    dt: int = field(
        default=30000,
        converter=int,
        validator=_require(_positive, "must be > 0"),
    )

    def window(self) -> TimeWindow:
        return TimeWindow(self.t0, self.dt)


@frozen
class VoxelConfig:
    """Voxelization and event noise filters."""

    SECTION: ClassVar[str] = "voxel"

    bins: int = field(
        default=4,
        converter=int,
        validator=_require(
            lambda v: v >= 2, "must be >= 2 (voxelization needs B >= 2 bins)"
        ),
    )
    theta_hot: float = field(
        default=500.0,
        converter=float,
        validator=_require(_positive, "must be > 0"),
    )
    theta_dens: float = field(
        default=5.0,
        converter=float,
        validator=_require(_non_negative, "must be >= 0"),
    )

    def params(self) -> VoxelParams:
        return VoxelParams(bins=self.bins, theta_dens=self.theta_dens)


@frozen
class ClaheConfig:
    """Contrast enhancement."""

    SECTION: ClassVar[str] = "clahe"

    tile_grid: int = field(
        default=8,
        converter=int,
        validator=_require(lambda v: v >= 1, "must be >= 1"),
    )
    clip_limit: float = field(
        default=2.0,
        converter=float,
        validator=_require(_positive, "must be > 0"),
    )
    gray_levels: int = field(
        default=256,
        converter=int,
        validator=_require(
            lambda v: v >= 2 and 256 % v == 0, "must divide 256 and be >= 2"
        ),
    )
    mode: ClaheMode = field(
        default=ClaheMode.PER_CHANNEL, converter=ClaheMode
    )

    def params(self) -> ClaheParams:
        return ClaheParams(
            tile_grid=self.tile_grid,
            clip_limit=self.clip_limit,
            gray_levels=self.gray_levels,
            mode=self.mode,
        )


@frozen
class DegradeConfig:
    """Optional synthetic low-light degradation of the input images."""

    SECTION: ClassVar[str] = "degrade"

    enabled: bool = field(default=False, converter=bool)
    gamma: float = field(
        default=1.0,
        converter=float,
        validator=_require(lambda v: 0 < v <= 1, "must be in (0, 1]"),
    )
    sigma: float = field(
        default=0.0,
        converter=float,
        validator=_require(_non_negative, "must be >= 0"),
    )


@frozen
class FusionConfig:
    """Feature fusion strategy."""

    SECTION: ClassVar[str] = "fusion"

    mode: FusionMode = field(
        default=FusionMode.ADAPTIVE, converter=FusionMode
    )
    reg_lambda: float = field(
        default=1e-3,
        converter=float,
        validator=_require(_non_negative, "must be >= 0"),
    )


def _int_keys(value: Mapping[Any, Any]) -> dict[int, Any]:
    return {int(k): v for k, v in value.items()}


def _packaged_detect(key: str) -> dict[int, Any]:
    """Scale-keyed table of the packaged ``detect`` section."""
    return _int_keys(default_config_data()["detect"][key])


def _strides_match_scales(value: dict[int, int]) -> bool:
    return bool(value) and all(s == stride_for(k) for k, s in value.items())


@frozen
class DetectConfig:
    """Box decoding and post-processing."""

    SECTION: ClassVar[str] = "detect"

    conf: float = field(
        default=0.1,
        converter=float,
        validator=_require(_unit_interval, "must be in [0, 1]"),
    )
    nms: float = field(
        default=0.4,
        converter=float,
        validator=_require(_unit_interval, "must be in [0, 1]"),
    )
    assign: AssignStrategy = field(
        default=AssignStrategy.BEST_ANCHOR, converter=AssignStrategy
    )
    strides: dict[int, int] = field(
        factory=lambda: _packaged_detect("strides"),
        converter=_int_keys,
        validator=_require(
            _strides_match_scales, "every stride must equal 2**scale"
        ),
    )
    anchors: dict[int, list[list[float]]] = field(
        factory=lambda: _packaged_detect("anchors"), converter=_int_keys
    )

    def __attrs_post_init__(self) -> None:
        missing = sorted(set(self.strides) - set(self.anchors))
        if missing:
            raise ConfigError(
                "detect.anchors", f"no anchors for scales {missing}"
            )
        try:
            parse_anchors(self.anchors)
        except FormatError as exc:
            raise ConfigError("detect.anchors", str(exc)) from exc

    def anchor_table(self) -> AnchorTable:
        """Anchor templates keyed by scale."""
        return parse_anchors(self.anchors)


@frozen
class EvalConfig:
    """Evaluation protocol."""

    SECTION: ClassVar[str] = "eval"

    iou: float = field(
        default=0.4,
        converter=float,
        validator=_require(lambda v: 0 < v <= 1, "must be in (0, 1]"),
    )


@frozen
class PipelineConfig:
    """Complete configuration of every pipeline stage."""

    SECTION: ClassVar[str] = "config"

    seed: int = field(
        default=0,
        converter=int,
        validator=_require(_non_negative, "must be >= 0"),
    )
    workers: int = field(
        default=1,
        converter=int,
        validator=_require(lambda v: v >= 1, "must be >= 1"),
    )
    window: WindowConfig = field(
        factory=WindowConfig, metadata={"section": WindowConfig}
    )
    voxel: VoxelConfig = field(
        factory=VoxelConfig, metadata={"section": VoxelConfig}
    )
    clahe: ClaheConfig = field(
        factory=ClaheConfig, metadata={"section": ClaheConfig}
    )
    degrade: DegradeConfig = field(
        factory=DegradeConfig, metadata={"section": DegradeConfig}
    )
    fusion: FusionConfig = field(
        factory=FusionConfig, metadata={"section": FusionConfig}
    )
    detect: DetectConfig = field(
        factory=DetectConfig, metadata={"section": DetectConfig}
    )
    eval: EvalConfig = field(
        factory=EvalConfig, metadata={"section": EvalConfig}
    )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PipelineConfig":
        """Build and validate a configuration from nested mappings.

        Throws:
            ConfigError: On unknown keys or invalid values.
        """

        return _build(cls, data, None)  # type: ignore[return-value]


def _build(cls: type, data: Any, prefix: str | None) -> Any:
    """Instantiate the attrs class ``cls`` from a mapping."""

    where = prefix or "config"
    if not isinstance(data, Mapping):
        raise ConfigError(where, "must be a mapping")

    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            path = f"{prefix}.{key}" if prefix else str(key)
            raise ConfigError(path, "unknown key")

    kwargs = {}
    for name, value in data.items():
        section = known[name].metadata.get("section")
        kwargs[name] = _build(section, value, name) if section else value

    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (AttributeError, TypeError, ValueError) as exc:
        raise ConfigError(where, str(exc)) from exc


def deep_merge(base: JSONDict, update: Mapping[str, Any]) -> JSONDict:
    """Return ``base`` with ``update`` merged in, recursing into mappings."""

    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


@functools.cache
def _packaged_defaults() -> JSONDict:
    resource = files("evfuse").joinpath(DEFAULT_CONFIG)
    return yaml.safe_load(resource.read_text(encoding="utf-8"))


def default_config_data() -> JSONDict:
    """Packaged default configuration as nested mappings.

    The file is parsed once; every call returns a fresh copy.
    """
    return copy.deepcopy(_packaged_defaults())


def read_config_file(path: Path) -> JSONDict:
    """Read a JSON or YAML configuration file.

    Args:
        path: ``.json`` files are decoded as JSON, anything else as YAML.

    Returns:
        The decoded mapping.

    Throws:
        ConfigError: If the document is not a mapping.
    """

    text = path.read_text(encoding="utf-8")

    # Decode JSON or YAML depending on file extension.
    if path.suffix == ".json":
        data = json_loads(text)
    else:
        data = yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path.name} must contain a mapping")
    return data


def set_dotted(data: JSONDict, path: str, value: Any) -> None:
    """Assign ``value`` at the dotted ``path`` inside nested mappings."""

    *parents, leaf = path.split(".")
    node = data
    for key in parents:
        node = node.setdefault(key, {})
    node[leaf] = value


def load_config(
    path: Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """Resolve the effective configuration.

    Args:
        path: Optional user configuration file.
        overrides: Values keyed by dotted path, e.g. ``{"voxel.bins": 8}``;
            ``None`` values are ignored.

    Returns:
        The validated configuration.

    Throws:
        ConfigError: If a value violates its constraint.
    """

    data = default_config_data()
    if path is not None:
        logger.debug(f"Loading configuration from {path}")
        data = deep_merge(data, read_config_file(path))
    for dotted, value in (overrides or {}).items():
        if value is not None:
            set_dotted(data, dotted, value)
    return PipelineConfig.from_dict(data)
