"""Duration-based sequence packing.

Builds training sequences by repeatedly drawing a random sample that still
fits in the remaining context window, until the window is at least 80%
full. Drawn samples leave the pool; when too few samples fit, the pool is
refreshed (all samples restored) and the draw continues.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from emopack.corpus import Sample
from emopack.errors import DataError

DEFAULT_FILL_FRACTION = 0.8


@dataclass
class SortedPool:
    """Samples sorted by duration with per-sample availability flags."""

    samples: list[Sample]
    durations: list[float]
    alive: np.ndarray
    alive_count: int
    refreshes: int = 0

    def refresh(self) -> None:
        self.alive[:] = True
        self.alive_count = len(self.samples)
        self.refreshes += 1


@dataclass
class PackedSequence:
    """An ordered draw of samples filling one context window."""

    sample_ids: list[str] = field(default_factory=list)
    total_duration_s: float = 0.0
    target_length_s: float = 30.0
    members: list[Sample] = field(default_factory=list)
    refreshed: bool = False


def prepare_pool(samples: list[Sample], start: int = 0, end: int | None = None) -> SortedPool:
    """Sort the [start, end) subset by duration; all samples start alive."""
    if end is None:
        end = len(samples)
    if not (0 <= start < end <= len(samples)):
        raise DataError(f"empty or invalid pool range [{start}, {end}) for {len(samples)} samples")
    subset = sorted(samples[start:end], key=lambda s: s.duration_s)
    return SortedPool(
        samples=subset,
        durations=[s.duration_s for s in subset],
        alive=np.ones(len(subset), dtype=bool),
        alive_count=len(subset),
    )


def retrieve_sequence(
    pool: SortedPool,
    target_length_s: float,
    rng: np.random.Generator,
    refresh_threshold: int = 1,
    fill_fraction: float = DEFAULT_FILL_FRACTION,
) -> PackedSequence:
    """Draw samples until the sequence reaches fill_fraction of the target.

    At each step the feasible set S is every alive sample whose duration
    fits in the remaining window, found by binary search on the sorted
    durations. If |S| < refresh_threshold at the start of a step, all
    flags are restored and the step retries; if S is empty even right
    after a refresh, no sample fits and packing is unsatisfiable.
    """
    if target_length_s <= 0:
        raise DataError(f"target length must be positive, got {target_length_s}")
    seq = PackedSequence(target_length_s=target_length_s)
    just_refreshed = False
    while seq.total_duration_s < fill_fraction * target_length_s:
        remaining = target_length_s - seq.total_duration_s
        # rightmost index with duration <= remaining
        hi = bisect.bisect_right(pool.durations, remaining)
        feasible = np.flatnonzero(pool.alive[:hi])
        if len(feasible) < refresh_threshold:
            if not just_refreshed:
                pool.refresh()
                if seq.sample_ids:
                    seq.refreshed = True
                just_refreshed = True
                continue
            if len(feasible) == 0:
                raise DataError(
                    f"unsatisfiable: no sample fits in the remaining {remaining:.3f}s "
                    f"of a {target_length_s:.3f}s window even after a pool refresh"
                )
            # below threshold but non-empty after a refresh: draw anyway so
            # the loop always makes progress
        just_refreshed = False
        pick = int(feasible[rng.integers(len(feasible))])
        sample = pool.samples[pick]
        pool.alive[pick] = False
        pool.alive_count -= 1
        seq.sample_ids.append(sample.id)
        seq.members.append(sample)
        seq.total_duration_s += sample.duration_s
    return seq
