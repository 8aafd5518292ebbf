"""The canonical fixture recipes and their synthesis.

Synthesis here is intentionally self-contained: the pipeline under test
re-renders the same recipes from the golden index with its own code, so
this module is the independent side of the contract. Signals are
quantized to float32, which is what both featurizers consume.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

SAMPLE_RATE = 16000


def synthesize(recipe: dict) -> np.ndarray:
    """Render a recipe to a float32 waveform at 16 kHz."""
    kind = recipe.get("kind")
    duration = float(recipe["duration_s"])
    n = int(round(duration * SAMPLE_RATE))
    t = np.arange(n, dtype=np.float64) / SAMPLE_RATE

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
            x[int(round(float(pos) * SAMPLE_RATE))] = amp
    else:
        raise ValueError(f"unknown fixture kind {kind!r}")

    return x.astype(np.float32)


FIXTURES: list[dict] = [
    {"name": "silence_1s", "recipe": {"kind": "silence", "duration_s": 1.0}},
    {"name": "silence_30s", "recipe": {"kind": "silence", "duration_s": 30.0}},
    {"name": "tone_440", "recipe": {"kind": "tone", "duration_s": 2.0, "freq_hz": 440.0, "amplitude": 0.5}},
    {"name": "tone_1000", "recipe": {"kind": "tone", "duration_s": 2.0, "freq_hz": 1000.0, "amplitude": 0.8}},
    {"name": "tone_100", "recipe": {"kind": "tone", "duration_s": 3.0, "freq_hz": 100.0, "amplitude": 0.3}},
    {"name": "tone_3000", "recipe": {"kind": "tone", "duration_s": 1.0, "freq_hz": 3000.0, "amplitude": 0.6}},
    {"name": "tone_7900", "recipe": {"kind": "tone", "duration_s": 1.0, "freq_hz": 7900.0, "amplitude": 0.4}},
    {"name": "tone_quiet", "recipe": {"kind": "tone", "duration_s": 2.0, "freq_hz": 440.0, "amplitude": 1e-4}},
    {
        "name": "tone_harmonics",
        "recipe": {
            "kind": "tone", "duration_s": 2.0, "amplitude": 0.6,
            "freqs_hz": [220.0, 440.0, 660.0, 880.0, 1100.0, 1320.0, 1540.0, 1760.0],
            "weights": [1.0, 0.5, 0.33, 0.25, 0.2, 0.17, 0.14, 0.125],
        },
    },
    {
        "name": "tone_fifth",
        "recipe": {"kind": "tone", "duration_s": 4.0, "amplitude": 0.5,
                   "freqs_hz": [200.0, 600.0], "weights": [1.0, 0.8]},
    },
    {"name": "tone_am", "recipe": {"kind": "tone", "duration_s": 3.0, "freq_hz": 440.0, "amplitude": 0.5, "am_hz": 3.0}},
    {"name": "tone_dc", "recipe": {"kind": "tone", "duration_s": 1.0, "freq_hz": 440.0, "amplitude": 0.25, "dc": 0.3}},
    {"name": "chirp_lin_up", "recipe": {"kind": "chirp", "duration_s": 5.0, "f0_hz": 100.0, "f1_hz": 4000.0, "amplitude": 0.5}},
    {"name": "chirp_lin_full", "recipe": {"kind": "chirp", "duration_s": 30.0, "f0_hz": 20.0, "f1_hz": 7000.0, "amplitude": 0.3}},
    {"name": "chirp_log", "recipe": {"kind": "chirp", "duration_s": 5.0, "f0_hz": 50.0, "f1_hz": 6000.0, "amplitude": 0.5, "sweep": "log"}},
    {"name": "chirp_down", "recipe": {"kind": "chirp", "duration_s": 2.0, "f0_hz": 5000.0, "f1_hz": 200.0, "amplitude": 0.4}},
    {"name": "chirp_quiet", "recipe": {"kind": "chirp", "duration_s": 3.0, "f0_hz": 300.0, "f1_hz": 3000.0, "amplitude": 0.01}},
    {"name": "noise_white", "recipe": {"kind": "noise", "duration_s": 3.0, "seed": 7, "amplitude": 0.5}},
    {"name": "noise_soft", "recipe": {"kind": "noise", "duration_s": 1.0, "seed": 11, "amplitude": 0.05}},
    {"name": "noise_lowpass", "recipe": {"kind": "noise", "duration_s": 5.0, "seed": 3, "amplitude": 0.4, "lowpass_pole": 0.95}},
    {"name": "speechlike", "recipe": {"kind": "noise", "duration_s": 5.0, "seed": 5, "amplitude": 0.5, "lowpass_pole": 0.9, "am_hz": 4.0}},
    {"name": "speechlike_long", "recipe": {"kind": "noise", "duration_s": 10.0, "seed": 8, "amplitude": 0.45, "lowpass_pole": 0.92, "am_hz": 2.5}},
    {"name": "click_single", "recipe": {"kind": "click", "duration_s": 1.0, "positions_s": [0.5], "amplitude": 0.9}},
    {
        "name": "click_train",
        "recipe": {"kind": "click", "duration_s": 2.0, "amplitude": 0.8,
                   "positions_s": [round(0.1 * k, 2) for k in range(1, 20)]},
    },
    {"name": "click_pair", "recipe": {"kind": "click", "duration_s": 1.0, "positions_s": [0.25, 0.75], "amplitude": 0.7}},
]
