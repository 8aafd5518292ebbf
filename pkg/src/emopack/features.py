"""Log-mel featurization and spectrogram-side augmentation.

The featurizer reproduces the Whisper front end: 400-point FFT with a
periodic Hann window, 160-sample hop with reflect padding, an 80-band
Slaney-normalized mel filterbank, log10 with a 1e-10 clamp, a dynamic
floor 8 below the per-utterance maximum, and (x + 4) / 4 scaling.
Everything is computed in float64 and emitted as float32.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from emopack.audio import Waveform
from emopack.errors import ConfigError, DataError

SAMPLE_RATE = 16000
N_FFT = 400
HOP_LENGTH = 160
N_MELS = 80
CONTEXT_SECONDS = 30
CONTEXT_SAMPLES = SAMPLE_RATE * CONTEXT_SECONDS
FRAMES_PER_CONTEXT = CONTEXT_SAMPLES // HOP_LENGTH  # 3000


@dataclass(frozen=True)
class MelSpectrogram:
    """80 x n_frames matrix of normalized log-mel values, 10 ms per frame."""

    values: np.ndarray
    frame_hop_s: float = HOP_LENGTH / SAMPLE_RATE

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SpecAugmentConfig:
    """Mask counts/widths, noise level, and per-transform probabilities."""

    n_freq_masks: int = 2
    max_freq_width: int = 27
    n_time_masks: int = 2
    max_time_width: int = 100
    noise_std: float = 0.05
    p_freq_mask: float = 0.2
    p_time_mask: float = 0.2
    p_noise: float = 0.2
    p_roll: float = 0.2
    mask_fill: str = "mean"  # "mean" or "zero"

    def __post_init__(self):
        if self.n_freq_masks < 0 or self.n_time_masks < 0:
            raise ConfigError("mask counts must be non-negative")
        if self.mask_fill not in ("mean", "zero"):
            raise ConfigError(f"mask_fill must be 'mean' or 'zero', got {self.mask_fill!r}")
        for name in ("p_freq_mask", "p_time_mask", "p_noise", "p_roll"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ConfigError(f"{name} must be in [0, 1], got {p}")

    @classmethod
    def from_dict(cls, raw: dict) -> "SpecAugmentConfig":
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown spec-augment config key(s) {sorted(unknown)}")
        return cls(**raw)


def _hz_to_mel(freq: np.ndarray) -> np.ndarray:
    # Slaney scale: linear below 1 kHz, logarithmic above
    freq = np.asarray(freq, dtype=np.float64)
    mel = freq / (200.0 / 3.0)
    log_region = freq >= 1000.0
    log_step = np.log(6.4) / 27.0
    with np.errstate(divide="ignore"):
        mel = np.where(log_region, 15.0 + np.log(np.maximum(freq, 1e-300) / 1000.0) / log_step, mel)
    return mel


def _mel_to_hz(mel: np.ndarray) -> np.ndarray:
    mel = np.asarray(mel, dtype=np.float64)
    freq = mel * (200.0 / 3.0)
    log_step = np.log(6.4) / 27.0
    return np.where(mel >= 15.0, 1000.0 * np.exp(log_step * (mel - 15.0)), freq)


@lru_cache(maxsize=1)
def mel_filterbank() -> np.ndarray:
    """80 x 201 triangular Slaney-normalized filterbank for a 400-point FFT."""
    fft_freqs = np.fft.rfftfreq(N_FFT, 1.0 / SAMPLE_RATE)
    mel_points = np.linspace(_hz_to_mel(0.0), _hz_to_mel(SAMPLE_RATE / 2.0), N_MELS + 2)
    hz_points = _mel_to_hz(mel_points)
    band_widths = np.diff(hz_points)
    ramps = hz_points[:, None] - fft_freqs[None, :]
    lower = -ramps[:-2] / band_widths[:-1, None]
    upper = ramps[2:] / band_widths[1:, None]
    weights = np.maximum(0.0, np.minimum(lower, upper))
    weights *= (2.0 / (hz_points[2 : N_MELS + 2] - hz_points[:N_MELS]))[:, None]
    return weights


@lru_cache(maxsize=1)
def _hann_window() -> np.ndarray:
    # periodic Hann, matching torch.hann_window(N_FFT)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(N_FFT) / N_FFT))


def log_mel_spectrogram(w: Waveform) -> MelSpectrogram:
    """Featurize a 16 kHz waveform; frame count is floor(len / 160)."""
    if w.sample_rate_hz != SAMPLE_RATE:
        raise DataError(f"featurizer requires {SAMPLE_RATE} Hz input, got {w.sample_rate_hz} Hz")
    x = np.asarray(w.samples, dtype=np.float64)
    pad = N_FFT // 2
    if len(x) <= pad:
        raise DataError(f"waveform too short to featurize: {len(x)} samples (need > {pad})")
    padded = np.pad(x, pad, mode="reflect")
    n_frames = 1 + len(x) // HOP_LENGTH
    idx = np.arange(N_FFT)[None, :] + HOP_LENGTH * np.arange(n_frames)[:, None]
    frames = padded[idx] * _hann_window()[None, :]
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2  # (n_frames, 201)
    mel = mel_filterbank() @ power.T
    mel = mel[:, :-1]  # the trailing frame is dropped, matching the reference
    log_spec = np.log10(np.maximum(mel, 1e-10))
    log_spec = np.maximum(log_spec, log_spec.max() - 8.0)
    return MelSpectrogram(values=((log_spec + 4.0) / 4.0).astype(np.float32))


def pad_or_trim(w: Waveform, context_s: float = CONTEXT_SECONDS) -> tuple[Waveform, int]:
    """Zero-pad or truncate to the context length.

    Returns the fixed-length waveform and the number of mel frames covered
    by real (non-padding) audio, for loss masking downstream.
    """
    target = int(round(context_s * w.sample_rate_hz))
    x = w.samples
    valid_frames = min(len(x), target) // HOP_LENGTH
    if len(x) >= target:
        return w.with_samples(x[:target].copy()), valid_frames
    out = np.zeros(target, dtype=np.float64)
    out[: len(x)] = x
    return w.with_samples(out), valid_frames


def roll_waveform(w: Waveform, shift: int) -> Waveform:
    """Circular shift; applied per member waveform before concatenation."""
    if abs(shift) > len(w.samples):
        raise DataError(f"roll shift {shift} exceeds waveform length {len(w.samples)}")
    return w.with_samples(np.roll(w.samples, shift))


def _draw_mask(rng: np.random.Generator, axis_size: int, max_width: int) -> tuple[int, int]:
    width = int(rng.integers(0, min(max_width, axis_size) + 1))
    start = int(rng.integers(0, axis_size - width + 1))
    return start, width


def spec_augment(
    m: MelSpectrogram, cfg: SpecAugmentConfig, rng: np.random.Generator
) -> MelSpectrogram:
    """Frequency masks, time masks, and noise infusion on a spectrogram.

    Masks are filled with the pre-mask per-utterance mean (or zero); each
    of the three transforms fires independently with its own probability.
    """
    values = m.values.astype(np.float32, copy=True)
    n_mels, n_frames = values.shape
    fill = float(values.mean()) if cfg.mask_fill == "mean" else 0.0
    if rng.random() < cfg.p_freq_mask:
        for _ in range(cfg.n_freq_masks):
            start, width = _draw_mask(rng, n_mels, cfg.max_freq_width)
            values[start : start + width, :] = fill
    if rng.random() < cfg.p_time_mask:
        for _ in range(cfg.n_time_masks):
            start, width = _draw_mask(rng, n_frames, cfg.max_time_width)
            values[:, start : start + width] = fill
    if rng.random() < cfg.p_noise:
        values += rng.normal(0.0, cfg.noise_std, values.shape).astype(np.float32)
    return MelSpectrogram(values=values, frame_hop_s=m.frame_hop_s)
