import functools
import logging
import os
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

import click
from dotenv import load_dotenv  # type: ignore[import-not-found]

from evfuse.config import PipelineConfig, load_config
from evfuse.detect import (
    decode_all,
    nms,
    read_anchors,
    read_detections,
    read_raw,
    write_detections,
)
from evfuse.enhance import (
    ClaheMode,
    ImageTensor,
    ValueRange,
    clahe,
    degrade,
    normalize_and_pad,
    read_image,
    write_image,
)
from evfuse.evaluation import evaluate, read_ground_truth, write_report_csv
from evfuse.events import read_stream
from evfuse.fusion import (
    FeatureMap,
    FusionMode,
    fuse,
    read_acmf_weights,
    read_feature_map,
    simulate_fusion,
    write_feature_map,
)
from evfuse.json_utils import json_dumps, write_json
from evfuse.pipeline import run_pipeline
from evfuse.synthetic import write_fixture
from evfuse.voxelize import preprocess_events, write_voxel_grid
from evfuse.xlsx import write_report_workbook

try:
    __version__ = version("evfuse")
except PackageNotFoundError:
    __version__ = "0.0.1-dev"

F = TypeVar("F", bound=Callable[..., Any])


class IOFailure(click.ClickException):
    """File system error reported with exit code 2."""

    exit_code = 2


def _handle_errors(func: F) -> F:
    """Map domain errors to exit code 1 and I/O errors to exit code 2."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except OSError as exc:
            raise IOFailure(str(exc)) from exc
        except ValueError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper  # type: ignore[return-value]


def _config(ctx: click.Context, **overrides: Any) -> PipelineConfig:
    """Load the configuration selected by the group with flag overrides.

    Args:
        ctx: Current click context.
        overrides: Values keyed by dotted path with ``.`` written as ``__``.

    Returns:
        The validated configuration.
    """

    path = ctx.obj.get("config") if ctx.obj else None
    dotted = {k.replace("__", "."): v for k, v in overrides.items()}
    return load_config(Path(path) if path else None, dotted)


def _emit(data: object, out: Optional[str]) -> None:
    """Write JSON to ``out`` or echo it."""
    if out:
        write_json(Path(out), data)
    else:
        click.echo(json_dumps(data))


@click.group()
@click.option(
    "--debug/--no-debug", default=False, help="Enable verbose debug logging."
)
@click.option(
    "--trace/--no-trace", default=False, help="Enable trace level logging."
)
@click.option(
    "--log-file",
    type=click.Path(file_okay=True, dir_okay=False),
    envvar="EVFUSE_LOG_FILE",
    help="Path to write log output to instead of stderr.",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(file_okay=True, dir_okay=False),
    default=None,
    help="JSON or YAML configuration file (default: $EVFUSE_CONFIG).",
)
@click.version_option(__version__, prog_name="evfuse")
@click.pass_context
def cli(
    ctx: click.Context,
    debug: bool,
    trace: bool,
    log_file: Optional[str] = None,
    config_path: Optional[str] = None,
) -> None:
    """Configure logging, load environment variables and the config path."""
    if trace:
        level = 1
    elif debug:
        level = logging.DEBUG
    else:
        level = logging.INFO

    logging.basicConfig(
        filename=log_file,
        level=level,
        format="[%(levelname)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    if trace:
        logging.debug("Trace mode is on")
    if debug:
        logging.debug("Debug mode is on")
    load_dotenv()

    # The environment may come from .env, so it is read after loading it.
    ctx.ensure_object(dict)
    ctx.obj["config"] = config_path or os.environ.get("EVFUSE_CONFIG")


@cli.command()
@click.option(
    "--events", type=click.Path(dir_okay=False), required=True,
    help="Event CSV file.",
)
@click.option(
    "--out", "output", type=click.Path(dir_okay=False), required=True,
    help="Destination EVXG file.",
)
@click.option("--t0", type=int, default=None, help="Window start in us.")
@click.option("--dt", type=int, default=None, help="Window length in us.")
@click.option("--bins", type=int, default=None, help="Temporal bins B.")
@click.option(
    "--theta-hot", type=float, default=None, help="Hot pixel rate in Hz."
)
@click.option(
    "--theta-dens", type=float, default=None, help="Minimum channel mass."
)
@click.option(
    "--hot-filter/--no-hot-filter",
    default=True,
    help="Remove hot pixels before voxelization.",
)
@click.option(
    "--workers", type=int, default=1, show_default=True,
    help="Threads used to accumulate the grid.",
)
@click.pass_context
@_handle_errors
def voxelize(
    ctx: click.Context,
    events: str,
    output: str,
    t0: Optional[int],
    dt: Optional[int],
    bins: Optional[int],
    theta_hot: Optional[float],
    theta_dens: Optional[float],
    hot_filter: bool,
    workers: int,
) -> None:
    """Voxelize one window of an event CSV file into an EVXG grid."""

    # Flags override the file and packaged values of the same keys.
    config = _config(
        ctx,
        window__t0=t0,
        window__dt=dt,
        voxel__bins=bins,
        voxel__theta_hot=theta_hot,
        voxel__theta_dens=theta_dens,
    )

    # Restrict, drop hot pixels, voxelize and filter sparse channels.
    result = preprocess_events(
        read_stream(Path(events)),
        config.window.window(),
        config.voxel.params(),
        config.voxel.theta_hot if hot_filter else None,
        workers=workers,
    )
    write_voxel_grid(Path(output), result.grid)

    # Report the diagnostics on the console.
    click.echo(json_dumps(result.summary()))


@cli.command()
@click.option(
    "--in", "image", type=click.Path(dir_okay=False), required=True,
    help="Source EVIM image.",
)
@click.option(
    "--out", "output", type=click.Path(dir_okay=False), required=True,
    help="Destination EVIM image.",
)
@click.option(
    "--tiles", "tile_grid", type=int, default=None, help="CLAHE tiles M."
)
@click.option(
    "--clip", "clip_limit", type=float, default=None,
    help="CLAHE clip limit kappa.",
)
@click.option(
    "--mode",
    type=click.Choice([m.value for m in ClaheMode]),
    default=None,
    help="Equalize every channel or the luminance only.",
)
@click.option(
    "--gamma", type=float, default=None,
    help="Degrade with this attenuation before enhancing.",
)
@click.option(
    "--sigma", type=float, default=0.0, show_default=True,
    help="Noise standard deviation used with --gamma.",
)
@click.option("--seed", type=int, default=None, help="Noise seed.")
@click.option(
    "--pad32/--no-pad32",
    "pad",
    default=False,
    help="Scale to [0, 1] and pad to a multiple of 32.",
)
@click.pass_context
@_handle_errors
def enhance(
    ctx: click.Context,
    image: str,
    output: str,
    tile_grid: Optional[int],
    clip_limit: Optional[float],
    mode: Optional[str],
    gamma: Optional[float],
    sigma: float,
    seed: Optional[int],
    pad: bool,
) -> None:
    """Contrast enhance an EVIM image with CLAHE."""

    config = _config(
        ctx,
        clahe__tile_grid=tile_grid,
        clahe__clip_limit=clip_limit,
        clahe__mode=mode,
        seed=seed,
    )
    img = read_image(Path(image)).to_bytes_range()

    # Simulate low light first when an attenuation is given.
    if gamma is not None:
        unit = ImageTensor(img.data / 255.0, ValueRange.UNIT)
        img = degrade(unit, gamma, sigma, config.seed).to_bytes_range()

    out = clahe(img, config.clahe.params())

    # Optionally prepare the frame for a stride 32 backbone.
    if pad:
        out = normalize_and_pad(out)
    write_image(Path(output), out)


@cli.command("fuse-sim")
@click.option(
    "--sigma-img", type=float, required=True,
    help="Noise variance of the image features.",
)
@click.option(
    "--sigma-evt", type=float, required=True,
    help="Noise variance of the event features.",
)
@click.option(
    "--samples", type=int, default=100000, show_default=True,
    help="Monte-Carlo draws.",
)
@click.option("--seed", type=int, default=None, help="Random seed.")
@click.option(
    "--out", type=click.Path(dir_okay=False), default=None,
    help="Write the JSON report to FILE instead of the console.",
)
@click.pass_context
@_handle_errors
def fuse_sim(
    ctx: click.Context,
    sigma_img: float,
    sigma_evt: float,
    samples: int,
    seed: Optional[int],
    out: Optional[str],
) -> None:
    """Check the minimum-variance fusion weight by simulation."""

    # Sample both noise sources and compare measured with predicted variance.
    config = _config(ctx, seed=seed)
    report = simulate_fusion(sigma_img, sigma_evt, samples, config.seed)
    _emit(report.to_dict(), out)


@cli.command("fuse")
@click.argument("img_features", type=click.Path(dir_okay=False))
@click.argument("evt_features", type=click.Path(dir_okay=False))
@click.argument("output", type=click.Path(dir_okay=False))
@click.option(
    "--weights", type=click.Path(file_okay=False), default=None,
    help="Directory holding w1.evwt and w2.evwt.",
)
@click.option(
    "--mode",
    type=click.Choice([m.value for m in FusionMode]),
    default=None,
    help="Fusion strategy.",
)
@click.option(
    "--alpha-out", type=click.Path(dir_okay=False), default=None,
    help="Also write the attention map as EVFT.",
)
@click.option(
    "--reg-lambda", type=float, default=None,
    help="Weight of the penalty pulling the attention towards 0.5.",
)
@click.pass_context
@_handle_errors
def fuse_features(
    ctx: click.Context,
    img_features: str,
    evt_features: str,
    output: str,
    weights: Optional[str],
    mode: Optional[str],
    alpha_out: Optional[str],
    reg_lambda: Optional[float],
) -> None:
    """Fuse an image and an event feature map (EVFT files).

    Prints the fusion mode and the attention penalty as JSON.
    """

    config = _config(ctx, fusion__mode=mode, fusion__reg_lambda=reg_lambda)
    head = read_acmf_weights(Path(weights)) if weights else None

    # Fuse the pair and keep the attention map alongside when requested.
    result = fuse(
        read_feature_map(Path(img_features)),
        read_feature_map(Path(evt_features)),
        config.fusion.mode,
        head,
        config.fusion.reg_lambda,
    )
    write_feature_map(Path(output), result.fused)
    if alpha_out and result.alpha is not None:
        write_feature_map(Path(alpha_out), FeatureMap(result.alpha.data))

    # Single modality modes have no attention map to penalize.
    penalty = result.penalty if result.alpha is not None else None
    _emit({"mode": config.fusion.mode.value, "alpha_penalty": penalty}, None)


@cli.command()
@click.option(
    "--raw", "raw_path", type=click.Path(dir_okay=False), required=True,
    help="EVRP raw prediction file.",
)
@click.option(
    "--anchors", type=click.Path(dir_okay=False), default=None,
    help="Anchor JSON; the configured anchors when omitted.",
)
@click.option("--conf", type=float, default=None, help="tau_conf.")
@click.option("--nms", "nms_thresh", type=float, default=None, help="tau_nms.")
@click.option(
    "--out", type=click.Path(dir_okay=False), default=None,
    help="Write detections to FILE instead of the console.",
)
@click.pass_context
@_handle_errors
def decode(
    ctx: click.Context,
    raw_path: str,
    anchors: Optional[str],
    conf: Optional[float],
    nms_thresh: Optional[float],
    out: Optional[str],
) -> None:
    """Decode raw head outputs, threshold and suppress duplicates."""

    config = _config(ctx, detect__conf=conf, detect__nms=nms_thresh)
    raw = read_raw(Path(raw_path))

    # An anchor file replaces the configured templates for every scale.
    table = (
        read_anchors(Path(anchors), raw.scales)
        if anchors
        else config.detect.anchor_table()
    )
    # Decode every scale, then threshold and suppress per class.
    dets = nms(
        decode_all(raw, table, config.detect.strides),
        config.detect.conf,
        config.detect.nms,
    )
    if out:
        write_detections(Path(out), dets)
    else:
        click.echo(json_dumps([d.to_dict() for d in dets]))


@cli.command("eval")
@click.option(
    "--dets", type=click.Path(dir_okay=False), required=True,
    help="Detections JSON.",
)
@click.option(
    "--gt", type=click.Path(dir_okay=False), required=True,
    help="Ground-truth JSON.",
)
@click.option("--iou", type=float, default=None, help="IoU threshold.")
@click.option(
    "--out", type=click.Path(dir_okay=False), default=None,
    help="Write the JSON report to FILE instead of the console.",
)
@click.option(
    "--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
    help="Also write a P/R/F1 table as CSV.",
)
@click.option(
    "--xlsx", "xlsx_path", type=click.Path(dir_okay=False), default=None,
    help="Also write the table as an Excel workbook.",
)
@click.pass_context
@_handle_errors
def eval_command(
    ctx: click.Context,
    dets: str,
    gt: str,
    iou: Optional[float],
    out: Optional[str],
    csv_path: Optional[str],
    xlsx_path: Optional[str],
) -> None:
    """Match detections against ground truth and report P/R/F1."""

    config = _config(ctx, eval__iou=iou)
    report = evaluate(
        read_detections(Path(dets)),
        read_ground_truth(Path(gt)),
        config.eval.iou,
    )
    _emit(report.to_dict(), out)

    # Optional tables hold a single "total" row.
    if csv_path:
        write_report_csv(Path(csv_path), {"total": report})
    if xlsx_path:
        write_report_workbook({"total": report}, Path(xlsx_path))


@cli.command()
@click.argument("input_dir", type=click.Path(file_okay=False))
@click.argument("output_dir", type=click.Path(file_okay=False))
@click.option(
    "--weights", type=click.Path(file_okay=False), default=None,
    help="Directory holding w1.evwt and w2.evwt for adaptive fusion.",
)
@click.option("--workers", type=int, default=None, help="Frame threads.")
@click.option("--seed", type=int, default=None, help="Override the seed.")
@click.pass_context
@_handle_errors
def pipeline(
    ctx: click.Context,
    input_dir: str,
    output_dir: str,
    weights: Optional[str],
    workers: Optional[int],
    seed: Optional[int],
) -> None:
    """Run every stage on a directory of frame pairs."""

    config = _config(ctx, workers=workers, seed=seed)
    head = read_acmf_weights(Path(weights)) if weights else None
    summary = run_pipeline(Path(input_dir), Path(output_dir), config, head)

    # Per-frame details are in report.json; print the merged counts.
    click.echo(json_dumps(summary["total"]))


@cli.command()
@click.argument("output_dir", type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None, help="Fixture seed.")
@click.option(
    "--frames", type=int, default=3, show_default=True,
    help="Number of frames.",
)
@click.pass_context
@_handle_errors
def synth(
    ctx: click.Context, output_dir: str, seed: Optional[int], frames: int
) -> None:
    """Write a deterministic synthetic input directory for pipeline."""

    if frames < 1:
        raise click.BadParameter("must be >= 1", param_hint="--frames")
    # Events, images, features, raw outputs, ground truth and weights.
    config = _config(ctx, seed=seed)
    names = write_fixture(Path(output_dir), config.seed, frames, config)
    click.echo(f"Wrote {len(names)} frames to {output_dir}")
