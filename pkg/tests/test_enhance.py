"""Tests for degradation, CLAHE, normalization and EVIM files."""

from pathlib import Path

import numpy as np
import pytest

from evfuse.enhance import (
    ClaheMode,
    ClaheParams,
    ImageTensor,
    ValueRange,
    clahe,
    clip_histogram,
    degrade,
    normalize_and_pad,
    padded_size,
    read_image,
    write_image,
)


def _byte_image(
    rng: np.random.Generator, shape: tuple[int, ...]
) -> ImageTensor:
    return ImageTensor(rng.integers(0, 256, shape), ValueRange.BYTE)


def test_clip_histogram_example() -> None:
    """Ensure (10, 0, 0, 0) clipped at 2 becomes (4, 2, 2, 2)."""

    clipped = clip_histogram(np.array([10, 0, 0, 0]), 2.0)
    assert clipped.tolist() == [4.0, 2.0, 2.0, 2.0]


def test_clip_histogram_below_limit_is_unchanged() -> None:
    """Ensure a histogram under the limit passes through."""

    clipped = clip_histogram(np.array([1, 2, 0, 1]), 5.0)
    assert clipped.tolist() == [1.0, 2.0, 0.0, 1.0]


def test_clip_histogram_conserves_mass(rng: np.random.Generator) -> None:
    """Ensure clipping keeps the total count exactly."""

    for _ in range(1000):
        h = rng.integers(0, 200, 256)
        kappa = float(rng.integers(1, 50))
        clipped = clip_histogram(h, kappa)
        assert float(np.sum(clipped)) == float(np.sum(h))
        assert clipped.min() >= 0


def test_clip_histogram_rejects_bad_input() -> None:
    """Ensure negative counts and non-positive limits are refused."""

    with pytest.raises(ValueError):
        clip_histogram(np.array([1, -1]), 1.0)
    with pytest.raises(ValueError):
        clip_histogram(np.array([1, 1]), 0.0)


def test_clip_histogram_bins_stay_below_redistributed_limit(
    rng: np.random.Generator,
) -> None:
    """Ensure every bin ends at or below kappa + excess / |V|."""

    for _ in range(500):
        levels = int(rng.choice([16, 64, 256]))
        h = rng.integers(0, 300, levels) * (rng.random(levels) < 0.3)
        kappa = float(rng.uniform(0.5, 80.0))
        clipped = clip_histogram(h, kappa)
        excess = float(np.sum(np.maximum(h - kappa, 0.0)))
        assert clipped.max() <= kappa + excess / levels + 1e-9
        assert np.all(clipped >= np.minimum(h, kappa))


def test_clahe_single_tile_matches_global_oracle(
    rng: np.random.Generator,
) -> None:
    """Ensure M = 1 equals a global clipped histogram equalization."""

    for _ in range(20):
        img = _byte_image(rng, (1, 64, 64))
        kappa = float(rng.choice([1.0, 2.0, 3.0, 4.0]))
        out = clahe(img, ClaheParams(tile_grid=1, clip_limit=kappa))

        # Integer clip counts keep the oracle's plain sums exact.
        plane = img.data[0].astype(np.int64)
        n = plane.size
        hist = np.bincount(plane.ravel(), minlength=256).astype(np.float64)
        limit = kappa * n / 256
        clipped = np.minimum(hist, limit)
        clipped += (hist.sum() - clipped.sum()) / 256
        mapping = np.floor(255.0 * np.cumsum(clipped) / n + 0.5)
        np.testing.assert_array_equal(out.data[0], mapping[plane])


def test_clahe_keeps_constant_image_constant() -> None:
    """Ensure equalizing a flat image yields a flat image."""

    img = ImageTensor(np.full((3, 64, 64), 100.0), ValueRange.BYTE)
    out = clahe(img, ClaheParams())
    assert np.unique(out.data).size == 1
    again = clahe(out, ClaheParams())
    assert np.unique(again.data).size == 1


def test_clahe_output_is_byte_image(rng: np.random.Generator) -> None:
    """Ensure the result keeps the shape and stays in 0..255."""

    img = _byte_image(rng, (3, 50, 70))
    out = clahe(img, ClaheParams(tile_grid=4, clip_limit=2.0))
    assert out.data.shape == img.data.shape
    assert out.value_range is ValueRange.BYTE
    assert out.data.min() >= 0 and out.data.max() <= 255


def test_clahe_per_channel_treats_planes_independently(
    rng: np.random.Generator,
) -> None:
    """Ensure each channel is equalized on its own."""

    img = _byte_image(rng, (2, 32, 32))
    params = ClaheParams(tile_grid=2)
    out = clahe(img, params)
    single = clahe(ImageTensor(img.data[1:], ValueRange.BYTE), params)
    np.testing.assert_array_equal(out.data[1], single.data[0])


def test_clahe_luminance_keeps_gray_images_gray(
    rng: np.random.Generator,
) -> None:
    """Ensure luminance mode leaves gray pixels nearly gray."""

    gray = rng.integers(0, 256, (1, 32, 48))
    img = ImageTensor(np.repeat(gray, 3, axis=0), ValueRange.BYTE)
    out = clahe(img, ClaheParams(tile_grid=4, mode=ClaheMode.LUMINANCE))
    assert out.data.shape == (3, 32, 48)
    spread = out.data.max(axis=0) - out.data.min(axis=0)
    assert spread.max() <= 1


def test_clahe_rejects_invalid_input(rng: np.random.Generator) -> None:
    """Ensure unit images, small images and gray luminance fail."""

    unit = ImageTensor(np.zeros((1, 16, 16)), ValueRange.UNIT)
    with pytest.raises(ValueError):
        clahe(unit, ClaheParams())
    with pytest.raises(ValueError):
        clahe(_byte_image(rng, (1, 4, 4)), ClaheParams(tile_grid=8))
    with pytest.raises(ValueError):
        clahe(
            _byte_image(rng, (1, 16, 16)),
            ClaheParams(mode=ClaheMode.LUMINANCE),
        )


def test_clahe_balances_tiles_when_ceil_tiles_run_out(
    rng: np.random.Generator,
) -> None:
    """Ensure a 9 pixel axis with M = 8 is split instead of refused."""

    img = _byte_image(rng, (1, 9, 9))
    out = clahe(img, ClaheParams(tile_grid=8))
    assert out.data.shape == (1, 9, 9)
    assert out.data.min() >= 0 and out.data.max() <= 255

    flat = ImageTensor(np.full((1, 9, 12), 40.0), ValueRange.BYTE)
    assert np.unique(clahe(flat, ClaheParams(tile_grid=8)).data).size == 1


def test_clahe_params_validation() -> None:
    """Ensure gray levels must divide 256 and kappa must be positive."""

    with pytest.raises(ValueError):
        ClaheParams(gray_levels=100)
    with pytest.raises(ValueError):
        ClaheParams(clip_limit=0.0)
    assert ClaheParams(gray_levels=64).gray_levels == 64


def test_degrade_identity_without_noise(rng: np.random.Generator) -> None:
    """Ensure gamma 1 and sigma 0 return the clean image."""

    clean = ImageTensor(rng.random((3, 8, 8)), ValueRange.UNIT)
    assert degrade(clean, 1.0, 0.0, seed=1) == clean


def test_degrade_attenuates(rng: np.random.Generator) -> None:
    """Ensure gamma scales intensities when no noise is added."""

    clean = ImageTensor(rng.random((3, 8, 8)), ValueRange.UNIT)
    out = degrade(clean, 0.25, 0.0, seed=1)
    np.testing.assert_allclose(out.data, 0.25 * clean.data)


def test_degrade_is_seeded(rng: np.random.Generator) -> None:
    """Ensure the same seed gives the same noise and stays in [0, 1]."""

    clean = ImageTensor(rng.random((3, 16, 16)), ValueRange.UNIT)
    first = degrade(clean, 0.5, [0.1, 0.2, 0.3], seed=7)
    second = degrade(clean, 0.5, [0.1, 0.2, 0.3], seed=7)
    other = degrade(clean, 0.5, [0.1, 0.2, 0.3], seed=8)
    assert first == second
    assert first != other
    assert first.data.min() >= 0 and first.data.max() <= 1


def test_degrade_noise_mean_matches_attenuated_image(
    rng: np.random.Generator,
) -> None:
    """Ensure degrade - 0.2 * clean averages to zero within 3 sigma."""

    sigma = 0.01
    clean = ImageTensor(
        rng.uniform(0.25, 0.75, (1, 250, 400)), ValueRange.UNIT
    )
    out = degrade(clean, 0.2, sigma, seed=11)

    # Attenuated values sit 5 sigma above 0, so clipping is negligible.
    residual = out.data - 0.2 * clean.data
    n = residual.size
    assert n == 100_000
    assert abs(residual.mean()) <= 3 * sigma / np.sqrt(n)
    assert residual.std() == pytest.approx(sigma, rel=0.02)


@pytest.mark.parametrize(
    "gamma, sigma", [(0.0, 0.1), (1.5, 0.1), (0.5, -0.1)]
)
def test_degrade_rejects_bad_parameters(
    gamma: float, sigma: float
) -> None:
    """Ensure gamma outside (0, 1] and negative sigma are refused."""

    clean = ImageTensor(np.zeros((1, 2, 2)), ValueRange.UNIT)
    with pytest.raises(ValueError):
        degrade(clean, gamma, sigma, seed=0)


def test_padded_size() -> None:
    """Ensure sizes round up to multiples of 32."""

    assert padded_size(260) == 288
    assert padded_size(346) == 352
    assert padded_size(288) == 288


def test_normalize_and_pad_shape_and_endpoints(
    rng: np.random.Generator,
) -> None:
    """Ensure a 260x346 frame becomes 288x352 with zero padding."""

    data = rng.integers(0, 256, (3, 260, 346)).astype(np.float64)
    data[0, 0, 0] = 0
    data[0, 0, 1] = 255
    out = normalize_and_pad(ImageTensor(data, ValueRange.BYTE))

    assert out.data.shape == (3, 288, 352)
    assert out.value_range is ValueRange.UNIT
    assert out.data[0, 0, 0] == 0.0
    assert out.data[0, 0, 1] == 1.0
    assert not out.data[:, 260:, :].any()
    assert not out.data[:, :, 346:].any()
    np.testing.assert_array_equal(
        np.rint(out.data[:, :260, :346] * 255.0), data
    )


def test_evim_round_trip(tmp_path: Path, rng: np.random.Generator) -> None:
    """Ensure EVIM files keep byte images exactly."""

    img = _byte_image(rng, (3, 5, 7))
    path = tmp_path / "frame.evim"
    write_image(path, img)
    assert path.read_bytes()[:4] == b"EVIM"
    assert read_image(path) == img
