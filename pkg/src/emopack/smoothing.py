"""Neutral smoothing: pull low-intensity samples toward uniform mass.

A sample whose total emotion score falls below its dataset's mean gets a
smoothing factor alpha, capped at 0.45, and its scores move toward 1/M.
The class ranking is provably preserved by the update, but the primary-
emotion retention rule is enforced defensively anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from emopack.corpus import N_EMOTIONS, NEUTRAL_INDEX, Sample
from emopack.errors import DataError

ALPHA_CAP = 0.45
RETENTION_EPS = 1e-9


@dataclass(frozen=True)
class SmoothingContext:
    """Per-dataset smoothing parameters."""

    mean_intensity: float
    n_classes: int = N_EMOTIONS
    alpha_cap: float = ALPHA_CAP


def sample_intensity(emotion: np.ndarray) -> float:
    """Total vote mass of one sample's emotion scores."""
    return float(np.sum(emotion))


def mean_intensity(samples: list[Sample]) -> float:
    if not samples:
        raise DataError("mean intensity of an empty sample list is undefined")
    return float(np.mean([sample_intensity(s.emotion) for s in samples]))


def smoothing_factor(intensity: float, ctx: SmoothingContext) -> float:
    """Alpha for one sample: 0 at or above the mean, else capped relative deficit."""
    if ctx.mean_intensity <= 0:
        raise DataError("mean intensity must be positive to smooth (degenerate dataset)")
    if intensity >= ctx.mean_intensity:
        return 0.0
    return min(abs(ctx.mean_intensity - intensity) / ctx.mean_intensity, ctx.alpha_cap)


def smooth(emotion: np.ndarray, ctx: SmoothingContext) -> np.ndarray:
    """Apply the smoothing update e' = e(1-a) + (1-e) a/M with retention guard."""
    alpha = smoothing_factor(sample_intensity(emotion), ctx)
    if alpha == 0.0:
        return emotion.copy()
    smoothed = emotion * (1.0 - alpha) + (1.0 - emotion) * (alpha / ctx.n_classes)
    # Retention: the top class must survive smoothing. The update has slope
    # 1 - a - a/M > 0 in e_j, so this never fires for valid alpha; if it
    # somehow did, clamp neutral just below the original top class's score.
    original_top = int(np.argmax(emotion))
    if int(np.argmax(smoothed)) != original_top:
        smoothed[NEUTRAL_INDEX] = smoothed[original_top] - RETENTION_EPS
    return smoothed


def smooth_dataset(samples: list[Sample]) -> tuple[list[Sample], float]:
    """Smooth all samples of one source dataset against their shared mean.

    Returns the smoothed samples and the mean intensity used.
    """
    ctx = SmoothingContext(mean_intensity=mean_intensity(samples))
    out = [replace(s, emotion=smooth(s.emotion, ctx)) for s in samples]
    return out, ctx.mean_intensity


def smooth_corpus(samples: list[Sample]) -> tuple[list[Sample], dict[str, float]]:
    """Smooth a merged corpus dataset-by-dataset, preserving input order.

    Intensities are only comparable within one annotation scheme, so the
    mean is computed per `dataset` field.
    """
    by_dataset: dict[str, list[int]] = {}
    for i, sample in enumerate(samples):
        by_dataset.setdefault(sample.dataset, []).append(i)
    out: list[Sample] = list(samples)
    means: dict[str, float] = {}
    for dataset, indices in by_dataset.items():
        smoothed, mean = smooth_dataset([samples[i] for i in indices])
        means[dataset] = mean
        for i, sample in zip(indices, smoothed):
            out[i] = sample
    return out, means
