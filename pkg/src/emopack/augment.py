"""Waveform-domain augmentation suite.

Seven effects, each fired independently with its own probability (0.2 by
default) and its own derived RNG stream, so augmentation outcomes do not
depend on scheduling, worker count, or which other effects fired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from emopack.audio import Waveform, sinc_interpolate
from emopack.errors import ConfigError, DataError
from emopack.rng import derive_rng


@dataclass(frozen=True)
class AugmentConfig:
    """Per-effect probabilities and parameter ranges.

    The effect list and the 20% default probability come from the training
    recipe; the parameter ranges are this pipeline's defaults and are fully
    overridable from the config file.
    """

    p_polarity: float = 0.2
    p_gain: float = 0.2
    p_reverse: float = 0.2
    p_noise: float = 0.2
    p_resample: float = 0.2
    p_equalize: float = 0.2
    p_echo: float = 0.2
    gain_db: tuple[float, float] = (-6.0, 6.0)
    noise_snr_db: tuple[float, float] = (5.0, 40.0)
    resample_factor: tuple[float, float] = (0.9, 1.1)
    eq_freq_hz: tuple[float, float] = (100.0, 6000.0)
    eq_gain_db: tuple[float, float] = (-12.0, 12.0)
    eq_q: tuple[float, float] = (0.5, 2.0)
    echo_delay_ms: tuple[float, float] = (50.0, 400.0)
    echo_decay: tuple[float, float] = (0.1, 0.5)

    def __post_init__(self):
        for name in ("p_polarity", "p_gain", "p_reverse", "p_noise", "p_resample", "p_equalize", "p_echo"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ConfigError(f"{name} must be in [0, 1], got {p}")
        for name in ("gain_db", "noise_snr_db", "resample_factor", "eq_freq_hz", "eq_gain_db", "eq_q", "echo_delay_ms", "echo_decay"):
            lo, hi = getattr(self, name)
            if not (lo < hi):
                raise ConfigError(f"{name} range must be non-degenerate, got ({lo}, {hi})")

    @classmethod
    def from_dict(cls, raw: dict) -> "AugmentConfig":
        kwargs = {}
        for key, value in raw.items():
            if key not in cls.__dataclass_fields__:
                raise ConfigError(f"unknown augment config key {key!r}")
            kwargs[key] = tuple(value) if isinstance(value, list) else value
        return cls(**kwargs)


def polarity_invert(w: Waveform) -> Waveform:
    return w.with_samples(-w.samples)


def apply_gain_db(w: Waveform, gain_db: float) -> Waveform:
    """Scale amplitudes by 10^(dB/20). No clipping is applied."""
    if not math.isfinite(gain_db):
        raise DataError(f"gain must be finite, got {gain_db}")
    return w.with_samples(w.samples * 10.0 ** (gain_db / 20.0))


def reverse_audio(w: Waveform) -> Waveform:
    return w.with_samples(w.samples[::-1].copy())


def add_noise(w: Waveform, snr_db: float, rng: np.random.Generator) -> Waveform:
    """Add white Gaussian noise scaled to the exact realized SNR."""
    if snr_db == math.inf:
        return w
    signal_power = float(np.mean(w.samples**2))
    if signal_power <= 0.0:
        raise DataError("cannot set an SNR against a zero-energy signal")
    noise = rng.standard_normal(len(w.samples))
    noise_power = float(np.mean(noise**2))
    target_power = signal_power / 10.0 ** (snr_db / 10.0)
    noise *= math.sqrt(target_power / noise_power)
    return w.with_samples(w.samples + noise)


def resample(w: Waveform, factor: float) -> Waveform:
    """Pitch/tempo perturbation: read the signal at `factor` speed.

    The declared sample rate is left unchanged, so a 1 kHz tone comes out
    at factor kHz. Output length is round(len/factor).
    """
    if not (0.5 <= factor <= 2.0):
        raise DataError(f"resample factor must be in [0.5, 2], got {factor}")
    if factor == 1.0:
        return w
    return w.with_samples(sinc_interpolate(w.samples, factor))


def _peaking_coefficients(f0: float, gain_db: float, q: float, rate: int):
    # RBJ audio EQ cookbook, peaking EQ
    a = 10.0 ** (gain_db / 40.0)
    w0 = 2.0 * math.pi * f0 / rate
    alpha = math.sin(w0) / (2.0 * q)
    cos_w0 = math.cos(w0)
    b = np.array([1.0 + alpha * a, -2.0 * cos_w0, 1.0 - alpha * a])
    a_coef = np.array([1.0 + alpha / a, -2.0 * cos_w0, 1.0 - alpha / a])
    return b / a_coef[0], a_coef / a_coef[0]


def equalize(w: Waveform, f0: float, gain_db: float, q: float) -> Waveform:
    """Single peaking biquad with zero initial state."""
    if not (0.0 < f0 < w.sample_rate_hz / 2.0):
        raise DataError(f"EQ center frequency {f0} outside (0, Nyquist)")
    if q <= 0.0:
        raise DataError(f"EQ Q must be positive, got {q}")
    b, a = _peaking_coefficients(f0, gain_db, q, w.sample_rate_hz)
    return w.with_samples(lfilter(b, a, w.samples))


def add_echo(w: Waveform, delay_ms: float, decay: float) -> Waveform:
    """y[n] = x[n] + decay * x[n - d]; the tail extends the signal by d."""
    if delay_ms <= 0.0:
        raise DataError(f"echo delay must be positive, got {delay_ms}")
    if not (0.0 <= decay < 1.0):
        raise DataError(f"echo decay must be in [0, 1), got {decay}")
    d = int(round(delay_ms * w.sample_rate_hz / 1000.0))
    out = np.zeros(len(w.samples) + d, dtype=np.float64)
    out[: len(w.samples)] = w.samples
    out[d:] += decay * w.samples
    return w.with_samples(out)


EFFECT_ORDER = ("polarity", "gain", "reverse", "noise", "resample", "equalize", "echo")


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def augment_waveform_with_log(
    w: Waveform, cfg: AugmentConfig, global_seed: int, sample_id: str
) -> tuple[Waveform, list[str]]:
    """Apply the effect chain; also report which effects fired.

    Effects are evaluated in a fixed order, each against its own RNG
    stream keyed by (seed, sample id, effect index).
    """
    fired: list[str] = []
    for index, name in enumerate(EFFECT_ORDER):
        rng = derive_rng(global_seed, sample_id, "fx", index)
        if rng.random() >= getattr(cfg, f"p_{name}"):
            continue
        fired.append(name)
        if name == "polarity":
            w = polarity_invert(w)
        elif name == "gain":
            w = apply_gain_db(w, rng.uniform(*cfg.gain_db))
        elif name == "reverse":
            w = reverse_audio(w)
        elif name == "noise":
            snr = rng.uniform(*cfg.noise_snr_db)
            if np.any(w.samples != 0.0):
                w = add_noise(w, snr, rng)
        elif name == "resample":
            w = resample(w, rng.uniform(*cfg.resample_factor))
        elif name == "equalize":
            f0 = _log_uniform(rng, *cfg.eq_freq_hz)
            f0 = min(f0, 0.45 * w.sample_rate_hz)  # stay below Nyquist for low rates
            w = equalize(w, f0, rng.uniform(*cfg.eq_gain_db), rng.uniform(*cfg.eq_q))
        elif name == "echo":
            w = add_echo(w, rng.uniform(*cfg.echo_delay_ms), rng.uniform(*cfg.echo_decay))
    return w, fired


def augment_waveform(w: Waveform, cfg: AugmentConfig, global_seed: int, sample_id: str) -> Waveform:
    """Apply the independently-fired effect chain to one waveform."""
    return augment_waveform_with_log(w, cfg, global_seed, sample_id)[0]
