"""Minimum-variance fusion of two noisy observations of one latent feature.

Both observations are modelled as the latent value plus independent zero
mean noise with variances ``sigma2_img`` and ``sigma2_evt``. The convex
combination ``alpha * f_img + (1 - alpha) * f_evt`` is unbiased for every
``alpha``; its variance ``alpha^2 sigma2_img + (1 - alpha)^2 sigma2_evt``
is minimal at ``alpha* = sigma2_evt / (sigma2_img + sigma2_evt)`` where it
equals ``sigma2_img sigma2_evt / (sigma2_img + sigma2_evt)``.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from attrs import define, field, frozen

from .feature_map import FeatureMap
from .variance_field import VarianceField

logger = logging.getLogger(__name__)


def optimal_alpha(variances: VarianceField) -> np.ndarray:
    """Weight of the image observation in the minimum-variance combination.

    The smaller variance always goes into the numerator, which makes the
    result for swapped modalities exactly ``1 - alpha``.

    Args:
        variances: Noise variances of both observations.

    Returns:
        ``sigma2_evt / (sigma2_img + sigma2_evt)`` with the shape of the
        variance fields.
    """

    a = variances.sigma2_img
    b = variances.sigma2_evt
    total = a + b

    # Dividing the smaller variance keeps swapped inputs symmetric.
    return np.where(b <= a, b / total, 1.0 - a / total)


def fused_variance(variances: VarianceField) -> np.ndarray:
    """Variance reached by the minimum-variance combination.

    Args:
        variances: Noise variances of both observations.

    Returns:
        ``sigma2_img sigma2_evt / (sigma2_img + sigma2_evt)``, never above
        the smaller of the two inputs.
    """

    a = variances.sigma2_img
    b = variances.sigma2_evt

    # Rounding can push the product ratio just above min(a, b).
    return np.minimum(a * b / (a + b), np.minimum(a, b))


def combination_variance(
    alpha: float | np.ndarray, variances: VarianceField
) -> np.ndarray:
    """Variance of the combination for an arbitrary weight ``alpha``."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return (
        alpha**2 * variances.sigma2_img
        + (1.0 - alpha) ** 2 * variances.sigma2_evt
    )


@define
class RunningMoments:
    """Streaming mean and variance that can be merged across shards.

    Batches are folded in with the pairwise update of Chan et al., so
    partial results computed on separate workers combine into the same
    moments as one pass over all samples.

    Attributes:
        count: Number of samples seen.
        mean: Running mean.
        m2: Sum of squared deviations from the mean.
    """

    count: int = 0
    mean: np.ndarray = field(factory=lambda: np.zeros(()))
    m2: np.ndarray = field(factory=lambda: np.zeros(()))

    def update(self, sample: np.ndarray) -> None:
        """Fold one sample into the moments."""

        x = np.asarray(sample, dtype=np.float64)
        self.count += 1

        # Welford step: the deviation is taken before and after the shift.
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        self.m2 = self.m2 + delta * (x - self.mean)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        """Return the moments of both sample sets combined.

        Args:
            other: Moments of a disjoint set of samples.

        Returns:
            New combined moments; the operands are unchanged.
        """

        if other.count == 0:
            return RunningMoments(self.count, self.mean, self.m2)
        if self.count == 0:
            return RunningMoments(other.count, other.mean, other.m2)

        # Pairwise combination of two disjoint sample sets.
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / count)
        m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / count)
        return RunningMoments(count, mean, m2)

    def variance(self, ddof: int = 1) -> np.ndarray:
        """Sample variance with ``ddof`` delta degrees of freedom.

        Throws:
            ValueError: If fewer than ``ddof + 1`` samples were seen.
        """

        if self.count <= ddof:
            raise ValueError(
                f"Need more than {ddof} samples, got {self.count}"
            )
        return self.m2 / (self.count - ddof)


def _sample_variance(samples: Sequence[FeatureMap], name: str) -> np.ndarray:
    if len(samples) < 2:
        raise ValueError(
            f"Need at least 2 {name} samples, got {len(samples)}"
        )
    moments = RunningMoments()
    for sample in samples:
        if sample.shape != samples[0].shape:
            raise ValueError(f"{name} samples differ in shape")
        moments.update(sample.data)
    return moments.variance(ddof=1)


def estimate_alpha_from_samples(
    samples_img: Sequence[FeatureMap], samples_evt: Sequence[FeatureMap]
) -> np.ndarray:
    """Estimate the optimal fusion weight from repeated observations.

    The per-location mean of each modality stands in for the latent value;
    the unbiased sample variances around it are plugged into
    :func:`optimal_alpha`.

    Args:
        samples_img: Noisy image feature maps of one latent scene.
        samples_evt: Noisy event feature maps of the same scene.

    Returns:
        Estimated weights with the shape of the feature maps.

    Throws:
        ValueError: With fewer than 2 samples per modality, mismatched
            shapes, or locations where both modalities are noise free.
    """

    var_img = _sample_variance(samples_img, "image")
    var_evt = _sample_variance(samples_evt, "event")
    if var_img.shape != var_evt.shape:
        raise ValueError(
            f"Modalities differ in shape: {var_img.shape} vs {var_evt.shape}"
        )
    return optimal_alpha(VarianceField(var_img, var_evt))


@frozen
class FusionSimReport:
    """Outcome of a Monte-Carlo check of the minimum-variance weight.

    Attributes:
        sigma2_img: Image noise variance.
        sigma2_evt: Event noise variance.
        samples: Number of draws.
        seed: Random seed.
        alpha_star: Optimal weight.
        analytic_variance: Variance predicted at ``alpha_star``.
        empirical_variance: Sample variance measured at ``alpha_star``.
        grid: Rows ``{alpha, analytic, empirical}`` for the weight grid.
        grid_best_alpha: Grid weight with the smallest analytic variance.
    """

    sigma2_img: float
    sigma2_evt: float
    samples: int
    seed: int
    alpha_star: float
    analytic_variance: float
    empirical_variance: float
    grid: list[dict[str, float]]
    grid_best_alpha: float

    def to_dict(self) -> dict[str, object]:
        """Return a JSON friendly representation."""
        return {
            "sigma2_img": self.sigma2_img,
            "sigma2_evt": self.sigma2_evt,
            "samples": self.samples,
            "seed": self.seed,
            "alpha_star": self.alpha_star,
            "analytic_variance": self.analytic_variance,
            "empirical_variance": self.empirical_variance,
            "grid_best_alpha": self.grid_best_alpha,
            "grid": self.grid,
        }


def alpha_grid(alpha_star: float, points: int = 21) -> np.ndarray:
    """Evenly spaced weights on ``[0, 1]`` with ``alpha_star`` inserted."""
    if points < 2:
        raise ValueError(f"Grid needs at least 2 points, got {points}")
    return np.unique(np.append(np.linspace(0.0, 1.0, points), alpha_star))


def simulate_fusion(
    sigma2_img: float,
    sigma2_evt: float,
    samples: int,
    seed: int,
    grid_points: int = 21,
) -> FusionSimReport:
    """Measure the variance of fused estimates under the Gaussian model.

    The same noise draws are reused for every weight on the grid, so the
    empirical variances of different weights are directly comparable.

    Args:
        sigma2_img: Image noise variance.
        sigma2_evt: Event noise variance.
        samples: Number of draws, at least 2.
        seed: Seed of the random generator.
        grid_points: Points of the evenly spaced weight grid.

    Returns:
        The simulation report.

    Throws:
        ValueError: On invalid variances or fewer than 2 samples.
    """

    if samples < 2:
        raise ValueError(f"Need at least 2 samples, got {samples}")
    variances = VarianceField(sigma2_img, sigma2_evt)

    # Only the noise matters; the latent value cancels out of the variance.
    rng = np.random.default_rng(seed)
    noise_img = rng.standard_normal(samples) * np.sqrt(sigma2_img)
    noise_evt = rng.standard_normal(samples) * np.sqrt(sigma2_evt)

    def empirical(alpha: float) -> float:
        fused = noise_evt + alpha * (noise_img - noise_evt)
        return float(np.var(fused, ddof=1))

    # Analytic and empirical variance on a grid that contains alpha*.
    alpha_star = float(optimal_alpha(variances))
    grid = alpha_grid(alpha_star, grid_points)
    analytic = combination_variance(grid, variances)
    rows = [
        {"alpha": float(a), "analytic": float(v), "empirical": empirical(a)}
        for a, v in zip(grid, analytic)
    ]

    report = FusionSimReport(
        sigma2_img=float(sigma2_img),
        sigma2_evt=float(sigma2_evt),
        samples=samples,
        seed=seed,
        alpha_star=alpha_star,
        analytic_variance=float(fused_variance(variances)),
        empirical_variance=empirical(alpha_star),
        grid=rows,
        grid_best_alpha=float(grid[int(np.argmin(analytic))]),
    )
    logger.info(
        f"alpha*={report.alpha_star:.6g} analytic="
        f"{report.analytic_variance:.6g} empirical="
        f"{report.empirical_variance:.6g}"
    )
    return report
