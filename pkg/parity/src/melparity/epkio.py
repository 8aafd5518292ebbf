"""Reader/writer for the EPK1 feature layout (fixture subset: no members).

Layout, little-endian: magic "EPK1", u32 version=1, u32 n_mels,
u32 n_frames, u32 n_members, f32 total_duration_s, then n_mels*n_frames
f32 values row-major. Member records follow in full files; golden
fixtures carry none.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"EPK1"
VERSION = 1


def write_fixture(path: str | Path, values: np.ndarray, total_duration_s: float) -> None:
    values = np.ascontiguousarray(values, dtype="<f4")
    n_mels, n_frames = values.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIII", VERSION, n_mels, n_frames, 0))
        fh.write(struct.pack("<f", total_duration_s))
        fh.write(values.tobytes(order="C"))


def read_values(path: str | Path) -> np.ndarray:
    """Read just the feature matrix; member records, if any, are ignored."""
    with open(path, "rb") as fh:
        header = fh.read(24)
        if header[:4] != MAGIC:
            raise ValueError(f"{path}: bad magic {header[:4]!r}")
        version, n_mels, n_frames, _n_members = struct.unpack_from("<IIII", header, 4)
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = fh.read(4 * n_mels * n_frames)
    return np.frombuffer(data, dtype="<f4").reshape(n_mels, n_frames).copy()
