"""Tests for configuration loading and validation."""

from pathlib import Path

import pytest
import yaml  # type: ignore[import-untyped]

from evfuse.config import (
    DetectConfig,
    PipelineConfig,
    deep_merge,
    default_config_data,
    load_config,
    read_config_file,
    set_dotted,
)
from evfuse.detect import Anchor, AssignStrategy
from evfuse.enhance import ClaheMode
from evfuse.errors import ConfigError
from evfuse.fusion import FusionMode
from evfuse.json_utils import write_json


def test_defaults_are_operating_constants() -> None:
    """Ensure the packaged defaults carry the published constants."""

    config = load_config()
    assert config.voxel.bins == 4
    assert config.voxel.theta_hot == 500.0
    assert config.voxel.theta_dens == 5.0
    assert config.clahe.tile_grid == 8
    assert config.clahe.clip_limit == 2.0
    assert config.clahe.mode is ClaheMode.PER_CHANNEL
    assert config.detect.conf == 0.1
    assert config.detect.nms == 0.4
    assert config.detect.assign is AssignStrategy.BEST_ANCHOR
    assert config.eval.iou == 0.4
    assert config.fusion.mode is FusionMode.ADAPTIVE
    assert config.fusion.reg_lambda == 1e-3
    assert config.window.window().dt == 30000


def test_packaged_defaults_match_class_defaults() -> None:
    """Ensure the YAML defaults and the attrs defaults agree."""

    assert load_config() == PipelineConfig.from_dict({})


def test_anchor_table_from_defaults() -> None:
    """Ensure every default stride has three anchor templates."""

    config = load_config()
    table = config.detect.anchor_table()
    assert sorted(table) == [2, 3, 4, 5]
    assert table[2][0] == Anchor(10, 13)
    assert config.detect.strides == {2: 4, 3: 8, 4: 16, 5: 32}


def test_single_bin_is_rejected_with_field_path() -> None:
    """Ensure B = 1 names voxel.bins in the error."""

    with pytest.raises(ConfigError) as info:
        load_config(overrides={"voxel.bins": 1})
    assert info.value.field == "voxel.bins"
    assert "voxel.bins" in str(info.value)


@pytest.mark.parametrize(
    "dotted, value, field",
    [
        ("clahe.clip_limit", 0, "clahe.clip_limit"),
        ("clahe.gray_levels", 100, "clahe.gray_levels"),
        ("window.dt", 0, "window.dt"),
        ("detect.nms", 1.5, "detect.nms"),
        ("degrade.gamma", 0.0, "degrade.gamma"),
        ("workers", 0, "config.workers"),
    ],
)
def test_invalid_values_name_their_field(
    dotted: str, value: object, field: str
) -> None:
    """Ensure each violated constraint reports its dotted path."""

    with pytest.raises(ConfigError) as info:
        load_config(overrides={dotted: value})
    assert info.value.field == field


def test_unknown_keys_and_bad_enums() -> None:
    """Ensure typos and unknown enum values are refused."""

    with pytest.raises(ConfigError) as info:
        PipelineConfig.from_dict({"voxel": {"binz": 3}})
    assert info.value.field == "voxel.binz"

    with pytest.raises(ConfigError) as info:
        PipelineConfig.from_dict({"fusion": {"mode": "average"}})
    assert info.value.field == "fusion"


def test_strides_must_follow_scale() -> None:
    """Ensure a stride other than 2**scale is refused."""

    with pytest.raises(ConfigError) as info:
        load_config(overrides={"detect.strides": {3: 16}})
    assert info.value.field == "detect.strides"


def test_yaml_file_overrides_defaults(tmp_path: Path) -> None:
    """Ensure YAML values replace the defaults they name."""

    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"voxel": {"bins": 8}, "seed": 3}))
    config = load_config(path)
    assert config.voxel.bins == 8
    assert config.voxel.theta_hot == 500.0
    assert config.seed == 3


def test_json_file_and_flag_precedence(tmp_path: Path) -> None:
    """Ensure flags beat the file and the file beats the defaults."""

    path = tmp_path / "config.json"
    write_json(
        path,
        {"clahe": {"tile_grid": 4, "clip_limit": 3.0},
         "detect": {"anchors": {"2": [[5, 5], [6, 6], [7, 7]]}}},
    )
    config = load_config(
        path, {"clahe.tile_grid": 2, "clahe.clip_limit": None}
    )
    assert config.clahe.tile_grid == 2
    assert config.clahe.clip_limit == 3.0
    assert config.detect.anchor_table()[2][2] == Anchor(7, 7)
    assert config.detect.anchor_table()[3][0] == Anchor(30, 61)


def test_read_config_file_requires_mapping(tmp_path: Path) -> None:
    """Ensure list documents are refused and empty ones are empty."""

    path = tmp_path / "config.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        read_config_file(path)
    path.write_text("")
    assert read_config_file(path) == {}


def test_merge_helpers() -> None:
    """Ensure nested merges keep siblings and dotted paths nest."""

    base = {"a": {"b": 1, "c": 2}, "d": 3}
    merged = deep_merge(base, {"a": {"b": 5}})
    assert merged == {"a": {"b": 5, "c": 2}, "d": 3}
    assert base["a"]["b"] == 1

    data: dict[str, object] = {}
    set_dotted(data, "x.y.z", 1)
    assert data == {"x": {"y": {"z": 1}}}
    assert "voxel" in default_config_data()


def test_detect_defaults_come_from_packaged_yaml() -> None:
    """Ensure attrs defaults and the packaged file share one anchor table."""

    packaged = default_config_data()["detect"]
    detect = DetectConfig()
    assert detect.anchors == packaged["anchors"]
    assert detect.strides == packaged["strides"]
    assert PipelineConfig().detect == detect

    # Callers get a private copy of the packaged document.
    packaged["anchors"].clear()
    assert default_config_data()["detect"]["anchors"]
    assert DetectConfig().anchors == detect.anchors
