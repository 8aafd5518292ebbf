"""Procedural test-signal synthesis.

Golden feature fixtures are described by small recipe dicts (kind plus
parameters) in the golden index; this module turns a recipe back into the
exact float32 waveform it describes. Synthesis is deterministic: noise
comes from a seeded generator named in the recipe.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from emopack.audio import Waveform
from emopack.errors import DataError

FIXTURE_RATE = 16000


def synthesize(recipe: dict) -> Waveform:
    """Render one fixture recipe at 16 kHz, float32."""
    kind = recipe.get("kind")
    duration = float(recipe["duration_s"])
    n = int(round(duration * FIXTURE_RATE))
    t = np.arange(n, dtype=np.float64) / FIXTURE_RATE

    if kind == "silence":
        x = np.zeros(n)
    elif kind == "tone":
        amp = float(recipe.get("amplitude", 0.5))
        freqs = recipe.get("freqs_hz") or [recipe["freq_hz"]]
        weights = recipe.get("weights") or [1.0] * len(freqs)
        x = np.zeros(n)
        for freq, weight in zip(freqs, weights):
            x += float(weight) * np.sin(2.0 * np.pi * float(freq) * t)
        x *= amp / max(1.0, sum(abs(float(w)) for w in weights))
        if "am_hz" in recipe:
            x *= 0.5 + 0.5 * np.sin(2.0 * np.pi * float(recipe["am_hz"]) * t)
        if "dc" in recipe:
            x = x + float(recipe["dc"])
    elif kind == "chirp":
        amp = float(recipe.get("amplitude", 0.5))
        f0, f1 = float(recipe["f0_hz"]), float(recipe["f1_hz"])
        if recipe.get("sweep", "linear") == "log":
            k = np.log(f1 / f0)
            phase = 2.0 * np.pi * f0 * duration / k * (np.exp(t / duration * k) - 1.0)
        else:
            phase = 2.0 * np.pi * (f0 * t + (f1 - f0) / (2.0 * duration) * t**2)
        x = amp * np.sin(phase)
    elif kind == "noise":
        amp = float(recipe.get("amplitude", 0.1))
        rng = np.random.default_rng(int(recipe["seed"]))
        x = rng.standard_normal(n)
        if "lowpass_pole" in recipe:
            a = float(recipe["lowpass_pole"])
            x = lfilter([1.0 - a], [1.0, -a], x)
        if "am_hz" in recipe:
            x *= 0.5 + 0.5 * np.sin(2.0 * np.pi * float(recipe["am_hz"]) * t)
        peak = np.max(np.abs(x))
        if peak > 0:
            x *= amp / peak
    elif kind == "click":
        amp = float(recipe.get("amplitude", 1.0))
        x = np.zeros(n)
        for pos in recipe["positions_s"]:
            idx = int(round(float(pos) * FIXTURE_RATE))
            if not (0 <= idx < n):
                raise DataError(f"click position {pos}s outside a {duration}s fixture")
            x[idx] = amp
    else:
        raise DataError(f"unknown fixture kind {kind!r}")

    return Waveform(samples=x.astype(np.float32).astype(np.float64), sample_rate_hz=FIXTURE_RATE)
