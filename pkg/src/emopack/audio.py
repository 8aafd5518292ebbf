"""Waveform container, WAV I/O, and windowed-sinc rate conversion."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from emopack.errors import DataError


@dataclass(frozen=True)
class Waveform:
    """Mono audio: float amplitudes (nominally in [-1, 1]) plus a sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        if self.samples.ndim != 1 or len(self.samples) < 1:
            raise DataError("waveform must be a non-empty 1-D array")
        if self.sample_rate_hz <= 0:
            raise DataError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if not np.all(np.isfinite(self.samples)):
            raise DataError("waveform contains non-finite samples")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    def with_samples(self, samples: np.ndarray) -> "Waveform":
        return Waveform(samples=samples, sample_rate_hz=self.sample_rate_hz)


def read_wav(path: str | Path) -> Waveform:
    """Read a mono 16-bit PCM or float WAV file into float64 amplitudes."""
    try:
        rate, data = wavfile.read(path)
    except Exception as exc:
        raise DataError(f"cannot read WAV file {path}: {exc}") from exc
    if data.ndim != 1:
        raise DataError(f"{path}: expected mono audio, got {data.ndim} channels")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise DataError(f"{path}: unsupported WAV sample format {data.dtype}")
    return Waveform(samples=samples, sample_rate_hz=int(rate))


def write_wav(path: str | Path, w: Waveform) -> None:
    """Write a waveform as float32 WAV."""
    wavfile.write(path, w.sample_rate_hz, w.samples.astype(np.float32))


def sinc_interpolate(
    x: np.ndarray,
    factor: float,
    taps: int = 64,
    beta: float = 8.6,
    chunk: int = 1 << 16,
) -> np.ndarray:
    """Evaluate x at fractional positions n*factor with a Kaiser-windowed sinc.

    The kernel cutoff scales with 1/factor when factor > 1 so that reading
    the signal faster does not alias. Output length is round(len(x)/factor).
    """
    x = np.asarray(x, dtype=np.float64)
    n_out = int(round(len(x) / factor))
    if n_out < 1:
        raise DataError(f"resampling by {factor} would produce an empty signal")
    half = taps // 2
    cutoff = min(1.0, 1.0 / factor)
    offsets = np.arange(-half + 1, half + 1, dtype=np.float64)
    padded = np.pad(x, (half, half))
    out = np.empty(n_out, dtype=np.float64)
    for lo in range(0, n_out, chunk):
        hi = min(lo + chunk, n_out)
        pos = np.arange(lo, hi, dtype=np.float64) * factor
        base = np.floor(pos).astype(np.int64)
        delta = (base[:, None] + offsets[None, :]) - pos[:, None]
        window = np.i0(beta * np.sqrt(np.maximum(0.0, 1.0 - (delta / half) ** 2))) / np.i0(beta)
        kernel = cutoff * np.sinc(cutoff * delta) * window
        taps_idx = base[:, None] + offsets.astype(np.int64)[None, :] + half
        out[lo:hi] = np.einsum("ij,ij->i", padded[taps_idx], kernel)
    return out


def resample_to(w: Waveform, target_hz: int) -> Waveform:
    """True rate conversion: change both the samples and the declared rate."""
    if w.sample_rate_hz == target_hz:
        return w
    factor = w.sample_rate_hz / target_hz
    return Waveform(samples=sinc_interpolate(w.samples, factor), sample_rate_hz=target_hz)
