"""EPK1 feature file format.

Layout (little-endian throughout):

    magic   4 bytes ASCII "EPK1"
    u32     version (= 1)
    u32     n_mels
    u32     n_frames
    u32     n_members
    f32     total_duration_s
    f32[n_mels * n_frames]   feature values, row-major (mel-bin major)
    then per member:
        u32     id length in bytes
        bytes   UTF-8 id
        f32     start_s
        f32     dur_s
        f32[8]  smoothed emotion scores
        u32     domain_id
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from emopack.corpus import N_EMOTIONS
from emopack.errors import DataError

MAGIC = b"EPK1"
VERSION = 1


@dataclass(frozen=True)
class MemberRecord:
    """One packed sample's span and labels inside a feature file."""

    id: str
    start_s: float
    dur_s: float
    emotion: np.ndarray
    domain_id: int


@dataclass
class FeatureFile:
    """In-memory form of one EPK1 file."""

    values: np.ndarray  # (n_mels, n_frames) float32
    total_duration_s: float
    members: list[MemberRecord] = field(default_factory=list)


def write_epk(path: str | Path, f: FeatureFile) -> None:
    values = np.ascontiguousarray(f.values, dtype="<f4")
    if values.ndim != 2:
        raise DataError("feature values must be a 2-D matrix")
    n_mels, n_frames = values.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIII", VERSION, n_mels, n_frames, len(f.members)))
        fh.write(struct.pack("<f", f.total_duration_s))
        fh.write(values.tobytes(order="C"))
        for m in f.members:
            raw_id = m.id.encode("utf-8")
            emotion = np.ascontiguousarray(m.emotion, dtype="<f4")
            if emotion.shape != (N_EMOTIONS,):
                raise DataError(f"member {m.id!r}: emotion vector must have {N_EMOTIONS} entries")
            fh.write(struct.pack("<I", len(raw_id)))
            fh.write(raw_id)
            fh.write(struct.pack("<ff", m.start_s, m.dur_s))
            fh.write(emotion.tobytes(order="C"))
            fh.write(struct.pack("<I", m.domain_id))


def frame_targets(f: FeatureFile, frame_hop_s: float = 0.01) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame supervision targets for a packed feature file.

    Each member's emotion distribution is tiled across its own frame span;
    frames covered by no member (padding) get an all-zero target and a
    False mask entry so they can be excluded from loss averaging.
    """
    n_frames = f.values.shape[1]
    targets = np.zeros((N_EMOTIONS, n_frames), dtype=np.float32)
    mask = np.zeros(n_frames, dtype=bool)
    for m in f.members:
        start = int(round(m.start_s / frame_hop_s))
        stop = min(n_frames, int(round((m.start_s + m.dur_s) / frame_hop_s)))
        if start >= n_frames:
            continue
        targets[:, start:stop] = np.asarray(m.emotion, dtype=np.float32)[:, None]
        mask[start:stop] = True
    return targets, mask


def read_epk(path: str | Path) -> FeatureFile:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise DataError(f"{path}: not an EPK1 file (bad magic {data[:4]!r})")
    version, n_mels, n_frames, n_members = struct.unpack_from("<IIII", data, 4)
    if version != VERSION:
        raise DataError(f"{path}: unsupported version {version}")
    (total_duration_s,) = struct.unpack_from("<f", data, 20)
    offset = 24
    n_values = n_mels * n_frames
    values = np.frombuffer(data, dtype="<f4", count=n_values, offset=offset).reshape(n_mels, n_frames)
    offset += 4 * n_values
    members = []
    for _ in range(n_members):
        (id_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        member_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        start_s, dur_s = struct.unpack_from("<ff", data, offset)
        offset += 8
        emotion = np.frombuffer(data, dtype="<f4", count=N_EMOTIONS, offset=offset).copy()
        offset += 4 * N_EMOTIONS
        (domain_id,) = struct.unpack_from("<I", data, offset)
        offset += 4
        members.append(
            MemberRecord(id=member_id, start_s=start_s, dur_s=dur_s, emotion=emotion, domain_id=domain_id)
        )
    if offset != len(data):
        raise DataError(f"{path}: {len(data) - offset} trailing bytes")
    return FeatureFile(values=values.copy(), total_duration_s=total_duration_s, members=members)
