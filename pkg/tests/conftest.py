"""Shared test helpers: tiny corpora, manifests, and WAV files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from emopack.audio import Waveform, write_wav
from emopack.corpus import Sample


def make_sample(
    id: str = "s0",
    dataset: str = "ds",
    speaker: str = "spk",
    language: str = "EN",
    duration_s: float = 1.0,
    emotion=None,
    domain_id: int = 0,
) -> Sample:
    if emotion is None:
        emotion = np.zeros(8)
        emotion[0] = 1.0
    return Sample(
        id=id,
        audio_path=f"{id}.wav",
        dataset=dataset,
        speaker=speaker,
        language=language,
        duration_s=duration_s,
        raw_labels={},
        emotion=np.asarray(emotion, dtype=np.float64),
        domain_id=domain_id,
    )


def write_manifest(path: Path, records: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return path


def manifest_record(id: str, duration_s: float = 1.0, labels=None, **overrides) -> dict:
    record = {
        "id": id,
        "audio_path": f"{id}.wav",
        "dataset": "ds",
        "speaker": "spk",
        "language": "EN",
        "duration_s": duration_s,
        "labels": labels if labels is not None else {"anger": 1.0},
    }
    record.update(overrides)
    return record


@pytest.fixture
def fixture_corpus(tmp_path):
    """A 10-sample corpus with real WAV files and a manifest."""
    rng = np.random.default_rng(1234)
    records = []
    for i in range(10):
        duration = float(rng.uniform(0.8, 3.0))
        n = int(duration * 16000)
        tone = 0.3 * np.sin(2 * np.pi * (200 + 150 * i) * np.arange(n) / 16000)
        write_wav(tmp_path / f"s{i}.wav", Waveform(samples=tone, sample_rate_hz=16000))
        label = ["anger", "happiness", "sadness", "neutral", "fear"][i % 5]
        records.append(
            manifest_record(
                f"s{i}",
                duration_s=round(n / 16000, 6),
                labels={label: 1.0 + 0.5 * (i % 3)},
                speaker=f"spk{i % 3}",
                dataset="dsA" if i < 6 else "dsB",
            )
        )
    manifest = write_manifest(tmp_path / "manifest.jsonl", records)
    return {"dir": tmp_path, "manifest": manifest, "n": 10}
