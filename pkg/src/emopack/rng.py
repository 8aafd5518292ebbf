"""Deterministic RNG stream derivation.

Every random decision in the pipeline draws from a stream keyed by the
global seed plus stable identifiers (sample id, sequence index, effect
index), never by thread or worker identity. Outputs are therefore
independent of scheduling and worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_key(global_seed: int, *parts: object) -> int:
    """Hash (seed, parts...) into a stable 64-bit stream key."""
    text = ":".join([str(int(global_seed))] + [str(p) for p in parts])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little", signed=False)


def derive_rng(global_seed: int, *parts: object) -> np.random.Generator:
    """Create an independent generator for the stream named by `parts`."""
    return np.random.Generator(np.random.PCG64(derive_key(global_seed, *parts)))
