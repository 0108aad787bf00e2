"""Reproducible random streams.

Every random quantity in the package is drawn from a counter-based Philox
generator keyed by ``(seed, stream_id)``.  Component ``j`` of an ensemble
always consumes stream ``j`` (1-based), so components can be built in any
order, or in parallel, and still give bit-identical results.  Stream id 0 is
reserved for ensemble-level draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64):
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if not (0 <= self.stream_id <= _MASK64):
            raise ValueError(f"stream_id must fit in 64 unsigned bits, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream, a Generator, or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None:
        raise ValueError("an explicit random stream is required")
    return RngStream(int(rng)).generator()


def realization_seed(master_seed: int, index: int) -> int:
    """Seed of realization ``index`` derived from a run's master seed."""
    ss = np.random.SeedSequence(int(master_seed) & _MASK64, spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def component_streams(seed: int, p: int):
    """Streams 1..p of an ensemble."""
    return [RngStream(seed, j) for j in range(1, p + 1)]
