"""End-to-end pipeline: harmonize, smooth, split, pack, augment, featurize,
serialize. Featurization is parallel over sequences; every random draw is
keyed by (seed, stable id), so output bytes do not depend on worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from emopack.audio import Waveform, read_wav, resample_to
from emopack.augment import augment_waveform_with_log
from emopack.config import PipelineConfig
from emopack.corpus import (
    DomainTable,
    Sample,
    LabelMapping,
    assign_domains,
    harmonize_sample,
    load_manifest,
    split_train_val,
)
from emopack.epk import FeatureFile, MemberRecord, write_epk
from emopack.errors import DataError
from emopack.features import SAMPLE_RATE, log_mel_spectrogram, pad_or_trim, roll_waveform, spec_augment
from emopack.packing import PackedSequence, prepare_pool, retrieve_sequence
from emopack.rng import derive_rng
from emopack.smoothing import smooth_corpus


@dataclass
class PipelineReport:
    """Summary of one pipeline run, serialized to report.json."""

    n_samples: int = 0
    n_train: int = 0
    n_val: int = 0
    n_domains: int = 0
    n_sequences: int = 0
    total_packed_duration_s: float = 0.0
    sequence_durations_s: list[float] = field(default_factory=list)
    dataset_mean_intensity: dict[str, float] = field(default_factory=dict)
    augment_fired: dict[str, int] = field(default_factory=dict)
    augment_trials: int = 0

    def to_dict(self) -> dict:
        rates = {
            name: (count / self.augment_trials if self.augment_trials else 0.0)
            for name, count in sorted(self.augment_fired.items())
        }
        return {
            "n_samples": self.n_samples,
            "n_train": self.n_train,
            "n_val": self.n_val,
            "n_domains": self.n_domains,
            "n_sequences": self.n_sequences,
            "total_packed_duration_s": self.total_packed_duration_s,
            "dataset_mean_intensity": self.dataset_mean_intensity,
            "augment_fired": dict(sorted(self.augment_fired.items())),
            "augment_trials": self.augment_trials,
            "augment_firing_rate": rates,
        }


def load_corpus(cfg: PipelineConfig) -> tuple[list[Sample], DomainTable]:
    """Manifests -> harmonized, domain-tagged samples."""
    if not cfg.manifests:
        raise DataError("no input: the config lists no manifests")
    mapping = LabelMapping.load(cfg.mapping) if cfg.mapping else LabelMapping.default()
    raw = []
    seen: set[str] = set()
    for path in cfg.manifests:
        for sample in load_manifest(path):
            if sample.id in seen:
                raise DataError(f"id {sample.id!r} appears in more than one manifest")
            seen.add(sample.id)
            raw.append(sample)
    harmonized = [harmonize_sample(s, mapping) for s in raw]
    return assign_domains(harmonized)


def pack_sequences(
    samples: list[Sample], cfg: PipelineConfig, n_sequences: int
) -> list[PackedSequence]:
    pool = prepare_pool(samples)
    rng = derive_rng(cfg.seed, "pack")
    return [
        retrieve_sequence(
            pool,
            cfg.context_s,
            rng,
            refresh_threshold=cfg.refresh_threshold,
            fill_fraction=cfg.fill_fraction,
        )
        for _ in range(n_sequences)
    ]


def _member_payload(sample: Sample) -> dict:
    return {
        "id": sample.id,
        "audio_path": sample.audio_path,
        "duration_s": sample.duration_s,
        "emotion": [float(v) for v in sample.emotion],
        "domain_id": sample.domain_id,
    }


def _build_sequence(task: dict) -> dict:
    """Worker: assemble, augment, featurize, and write one sequence.

    Module-level so it pickles for process pools. All randomness is keyed
    by (seed, member id) or (seed, sequence index).
    """
    cfg_augment = task["augment_cfg"]
    cfg_specaug = task["spec_augment_cfg"]
    seed = task["seed"]
    seq_index = task["seq_index"]
    audio_root = Path(task["audio_root"]) if task["audio_root"] else None

    pieces: list[np.ndarray] = []
    member_records: list[MemberRecord] = []
    fired_counts: dict[str, int] = {}
    cursor = 0
    for member in task["members"]:
        wav_path = Path(member["audio_path"])
        if audio_root is not None and not wav_path.is_absolute():
            wav_path = audio_root / wav_path
        try:
            w = read_wav(wav_path)
        except DataError as exc:
            raise DataError(f"stage=audio sample={member['id']}: {exc}") from exc
        w = resample_to(w, SAMPLE_RATE)
        w, fired = augment_waveform_with_log(w, cfg_augment, seed, member["id"])
        for name in fired:
            fired_counts[name] = fired_counts.get(name, 0) + 1
        roll_rng = derive_rng(seed, member["id"], "roll")
        if roll_rng.random() < cfg_specaug.p_roll:
            w = roll_waveform(w, int(roll_rng.integers(0, len(w.samples))))
            fired_counts["roll"] = fired_counts.get("roll", 0) + 1
        pieces.append(w.samples)
        member_records.append(
            MemberRecord(
                id=member["id"],
                start_s=cursor / SAMPLE_RATE,
                dur_s=len(w.samples) / SAMPLE_RATE,
                emotion=np.asarray(member["emotion"], dtype=np.float32),
                domain_id=member["domain_id"],
            )
        )
        cursor += len(w.samples)

    joined = Waveform(samples=np.concatenate(pieces), sample_rate_hz=SAMPLE_RATE)
    padded, _ = pad_or_trim(joined, task["context_s"])
    mel = log_mel_spectrogram(padded)
    mel = spec_augment(mel, cfg_specaug, derive_rng(seed, "specaug", seq_index))

    out_path = Path(task["out_dir"]) / f"{seq_index // 1000:04d}" / f"seq_{seq_index:06d}.epk"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_epk(
        out_path,
        FeatureFile(
            values=mel.values,
            total_duration_s=task["total_duration_s"],
            members=member_records,
        ),
    )
    sidecar = {
        "seq_index": seq_index,
        "file": str(out_path.relative_to(task["out_dir"])),
        "total_duration_s": task["total_duration_s"],
        "n_frames": int(mel.values.shape[1]),
        "members": [
            {
                "id": m.id,
                "start_s": round(m.start_s, 6),
                "dur_s": round(m.dur_s, 6),
                "emotion": [float(v) for v in m.emotion],
                "domain_id": m.domain_id,
            }
            for m in member_records
        ],
    }
    return {"seq_index": seq_index, "sidecar": sidecar, "fired": fired_counts, "n_members": len(member_records)}


def run_pipeline(cfg: PipelineConfig) -> PipelineReport:
    cfg.validate()
    report = PipelineReport()
    samples, table = load_corpus(cfg)
    report.n_samples = len(samples)
    report.n_domains = len(table)

    if cfg.smoothing:
        samples, means = smooth_corpus(samples)
        report.dataset_mean_intensity = {k: round(v, 9) for k, v in sorted(means.items())}

    split_seed = cfg.split_seed if cfg.split_seed is not None else cfg.seed
    train, val = split_train_val(samples, cfg.train_fraction, split_seed)
    report.n_train, report.n_val = len(train), len(val)

    total_train_s = sum(s.duration_s for s in train)
    n_sequences = cfg.n_sequences
    if n_sequences is None:
        n_sequences = max(1, int(np.ceil(total_train_s / cfg.context_s)))
    sequences = pack_sequences(train, cfg, n_sequences)
    report.n_sequences = len(sequences)
    report.sequence_durations_s = [round(s.total_duration_s, 9) for s in sequences]
    report.total_packed_duration_s = float(sum(s.total_duration_s for s in sequences))

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [
        {
            "seq_index": i,
            "members": [_member_payload(m) for m in seq.members],
            "total_duration_s": seq.total_duration_s,
            "context_s": cfg.context_s,
            "seed": cfg.seed,
            "augment_cfg": cfg.augment,
            "spec_augment_cfg": cfg.spec_augment,
            "audio_root": cfg.audio_root,
            "out_dir": str(out_dir),
        }
        for i, seq in enumerate(sequences)
    ]
    if cfg.workers == 1:
        results = [_build_sequence(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_build_sequence, tasks))
    results.sort(key=lambda r: r["seq_index"])

    with open(out_dir / "sequences.jsonl", "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r["sidecar"], sort_keys=True) + "\n")
    for r in results:
        report.augment_trials += r["n_members"]
        for name, count in r["fired"].items():
            report.augment_fired[name] = report.augment_fired.get(name, 0) + count

    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
