"""Golden generation: reference extractor over the canonical fixtures."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from melparity.epkio import write_fixture
from melparity.recipes import FIXTURES, SAMPLE_RATE, synthesize

TOLERANCE = 1e-4


def reference_log_mel(waveform: np.ndarray) -> np.ndarray:
    """Featurize with the reference Whisper extractor, no padding."""
    from transformers import WhisperFeatureExtractor

    extractor = WhisperFeatureExtractor()
    out = extractor(
        waveform,
        sampling_rate=SAMPLE_RATE,
        padding="do_not_pad",
        return_tensors="np",
    )["input_features"][0]
    return np.asarray(out, dtype=np.float32)


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def generate_goldens(out_dir: str | Path) -> dict:
    """Write one golden file per fixture plus the provenance index."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for fixture in FIXTURES:
        waveform = synthesize(fixture["recipe"])
        values = reference_log_mel(waveform)
        file_name = fixture["name"] + ".epk"
        path = out_dir / file_name
        write_fixture(path, values, len(waveform) / SAMPLE_RATE)
        entries.append(
            {
                "name": fixture["name"],
                "file": file_name,
                "recipe": fixture["recipe"],
                "shape": [int(values.shape[0]), int(values.shape[1])],
                "checksum_sha256": sha256_of(path),
            }
        )
    index = {
        "sample_rate_hz": SAMPLE_RATE,
        "tolerance": TOLERANCE,
        "n_fixtures": len(entries),
        "fixtures": entries,
    }
    with open(out_dir / "index.json", "w", encoding="utf-8") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return index
