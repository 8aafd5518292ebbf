"""Manifest ingestion, soft-label harmonization, and domain assignment.

Raw per-dataset labels are mapped into a canonical 8-emotion score vector.
Scores stay unnormalized here (vote mass); they are only projected onto a
probability simplex inside the loss computation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from emopack.errors import DataError
from emopack.rng import derive_rng

# Canonical emotion classes. The order is fixed; every 8-vector in the
# pipeline and in serialized files is indexed by it.
EMOTIONS = (
    "happiness",
    "sadness",
    "disgust",
    "fear",
    "surprise",
    "anger",
    "other",
    "neutral",
)
N_EMOTIONS = len(EMOTIONS)
NEUTRAL_INDEX = EMOTIONS.index("neutral")
EMOTION_INDEX = {name: i for i, name in enumerate(EMOTIONS)}

MANIFEST_FIELDS = ("id", "audio_path", "dataset", "speaker", "language", "duration_s", "labels")


@dataclass(frozen=True)
class RawSample:
    """One manifest line: audio reference, metadata, and raw label scores."""

    id: str
    audio_path: str
    dataset: str
    speaker: str
    language: str
    duration_s: float
    raw_labels: dict[str, float]


@dataclass(frozen=True)
class Sample:
    """A RawSample with harmonized emotion scores and a domain id."""

    id: str
    audio_path: str
    dataset: str
    speaker: str
    language: str
    duration_s: float
    raw_labels: dict[str, float]
    emotion: np.ndarray  # shape (8,), non-negative, not normalized
    domain_id: int = -1

    def domain_triple(self) -> tuple[str, str, str]:
        return (self.dataset, self.speaker, self.language)


@dataclass
class LabelMapping:
    """Raw label -> weighted canonical targets.

    Canonical names not present in `entries` implicitly map to themselves
    with weight 1.
    """

    entries: dict[str, list[tuple[int, float]]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict[str, list]) -> "LabelMapping":
        entries: dict[str, list[tuple[int, float]]] = {}
        for label, targets in raw.items():
            parsed = []
            for target in targets:
                name, weight = target
                if name not in EMOTION_INDEX:
                    raise DataError(f"mapping for {label!r} names unknown emotion {name!r}")
                weight = float(weight)
                if not (0.0 < weight <= 1.0):
                    raise DataError(f"mapping weight for {label!r} -> {name!r} must be in (0, 1], got {weight}")
                parsed.append((EMOTION_INDEX[name], weight))
            if not parsed:
                raise DataError(f"mapping for {label!r} has no targets")
            entries[label] = parsed
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path) -> "LabelMapping":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def default(cls) -> "LabelMapping":
        """The shipped mapping: identity for canonical names plus the contempt rule."""
        text = resources.files("emopack.data").joinpath("default_mapping.json").read_text("utf-8")
        return cls.from_dict(json.loads(text))

    def targets_for(self, raw_label: str) -> list[tuple[int, float]]:
        if raw_label in self.entries:
            return self.entries[raw_label]
        if raw_label in EMOTION_INDEX:
            return [(EMOTION_INDEX[raw_label], 1.0)]
        raise DataError(f"unknown raw label {raw_label!r}; add it to the mapping file")


@dataclass(frozen=True)
class DomainTable:
    """Bijection between (dataset, speaker, language) triples and ids [0, D)."""

    triples: tuple[tuple[str, str, str], ...]

    def __len__(self) -> int:
        return len(self.triples)

    def index_of(self, triple: tuple[str, str, str]) -> int:
        return self._lookup()[triple]

    def _lookup(self) -> dict[tuple[str, str, str], int]:
        # tiny table; rebuilt on demand to keep the dataclass frozen/hashable
        return {t: i for i, t in enumerate(self.triples)}


def load_manifest(path: str | Path) -> list[RawSample]:
    """Parse a JSONL manifest into RawSamples, validating as it goes."""
    samples: list[RawSample] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            missing = [f for f in MANIFEST_FIELDS if f not in record]
            if missing:
                raise DataError(f"{path}:{lineno}: missing field(s) {', '.join(missing)}")
            duration = float(record["duration_s"])
            if duration <= 0:
                raise DataError(f"{path}:{lineno}: non-positive duration {duration}")
            sample_id = str(record["id"])
            if sample_id in seen:
                raise DataError(f"{path}:{lineno}: duplicate id {sample_id!r}")
            seen.add(sample_id)
            labels = {str(k): float(v) for k, v in record["labels"].items()}
            for k, v in labels.items():
                if not np.isfinite(v) or v < 0:
                    raise DataError(f"{path}:{lineno}: label {k!r} has invalid score {v}")
            samples.append(
                RawSample(
                    id=sample_id,
                    audio_path=str(record["audio_path"]),
                    dataset=str(record["dataset"]),
                    speaker=str(record["speaker"]),
                    language=str(record["language"]),
                    duration_s=duration,
                    raw_labels=labels,
                )
            )
    return samples


def harmonize(raw_labels: dict[str, float], mapping: LabelMapping) -> np.ndarray:
    """Map raw label scores onto the canonical 8-emotion vector.

    Each raw score is distributed over its canonical targets scaled by the
    mapping weights: c_j = sum_r score(r) * weight(r -> j).
    """
    scores = np.zeros(N_EMOTIONS, dtype=np.float64)
    for label, value in raw_labels.items():
        for idx, weight in mapping.targets_for(label):
            scores[idx] += float(value) * weight
    if not np.all(np.isfinite(scores)):
        raise DataError("harmonized scores are not finite")
    if not np.any(scores > 0):
        raise DataError(f"harmonization produced an all-zero distribution from {sorted(raw_labels)}")
    return scores


def harmonize_sample(raw: RawSample, mapping: LabelMapping) -> Sample:
    try:
        emotion = harmonize(raw.raw_labels, mapping)
    except DataError as exc:
        raise DataError(f"sample {raw.id!r}: {exc}") from exc
    return Sample(
        id=raw.id,
        audio_path=raw.audio_path,
        dataset=raw.dataset,
        speaker=raw.speaker,
        language=raw.language,
        duration_s=raw.duration_s,
        raw_labels=raw.raw_labels,
        emotion=emotion,
    )


def assign_domains(samples: list[Sample]) -> tuple[list[Sample], DomainTable]:
    """Give every unique (dataset, speaker, language) triple one id.

    Triples are numbered in first-appearance order, so the assignment is
    deterministic and idempotent.
    """
    lookup: dict[tuple[str, str, str], int] = {}
    out: list[Sample] = []
    for sample in samples:
        triple = sample.domain_triple()
        if triple not in lookup:
            lookup[triple] = len(lookup)
        out.append(replace(sample, domain_id=lookup[triple]))
    table = DomainTable(tuple(lookup))
    return out, table


def split_train_val(
    samples: list[Sample], train_fraction: float, seed: int
) -> tuple[list[Sample], list[Sample]]:
    """Deterministic random partition with |train| = round(fraction * N)."""
    if not samples:
        raise DataError("cannot split an empty sample list")
    if not (0.0 < train_fraction < 1.0):
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    order = derive_rng(seed, "split").permutation(len(samples))
    n_train = int(np.floor(train_fraction * len(samples) + 0.5))
    train_idx = sorted(order[:n_train])
    val_idx = sorted(order[n_train:])
    return [samples[i] for i in train_idx], [samples[i] for i in val_idx]
