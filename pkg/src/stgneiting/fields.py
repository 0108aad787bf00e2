"""Field realizations and the cosine-wave summation shared by both simulators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import SpaceTimePointSet

# complex/real working-array budget, in elements
_CHUNK = 1 << 22


@dataclass
class FieldRealization:
    points: SpaceTimePointSet
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.points.n,):
            raise ValueError(f"expected {self.points.n} values, got shape {self.values.shape}")

    def as_grid(self) -> np.ndarray:
        """Values reshaped to ``(t_count, *spatial_shape)``."""
        g = self.points.grid
        if g is None:
            raise ValueError("field was not simulated on a regular grid")
        return self.values.reshape((g.t_count, *g.shape))


def sum_waves(freqs, temporal_phase, phases, amps, points: SpaceTimePointSet) -> np.ndarray:
    """Evaluate ``sum_j amps_j / sqrt(p) * cos(<freqs_j, x> + theta_j(t) + phases_j)``.

    ``temporal_phase(times)`` returns the ``(p, len(times))`` matrix of
    ``theta_j(t)``.  Regular grids are evaluated through separable complex
    exponentials; arbitrary point sets are evaluated directly in chunks.
    """
    freqs = np.asarray(freqs, dtype=float)
    p = freqs.shape[0]
    weights = np.asarray(amps, dtype=float) / np.sqrt(p)
    if points.grid is not None:
        return _sum_waves_grid(freqs, temporal_phase, phases, weights, points.grid)

    utimes, inverse = np.unique(points.times, return_inverse=True)
    theta = temporal_phase(utimes)
    out = np.empty(points.n)
    step = max(1, _CHUNK // max(p, 1))
    for start in range(0, points.n, step):
        sl = slice(start, start + step)
        arg = points.spatial[sl] @ freqs.T
        arg += theta[:, inverse[sl]].T
        arg += phases
        out[sl] = np.cos(arg) @ weights
    return out


def _sum_waves_grid(freqs, temporal_phase, phases, weights, grid):
    p = freqs.shape[0]
    axes = grid.axes()
    times = grid.times()
    coef = weights * np.exp(1j * np.asarray(phases))
    waves = [np.exp(1j * np.outer(freqs[:, d], ax)) for d, ax in enumerate(axes)]
    inner = int(np.prod(grid.shape[:-1]))
    per_t = p * inner
    t_step = max(1, _CHUNK // max(per_t, 1))
    out = np.empty((grid.t_count, inner, grid.shape[-1]))
    for t0 in range(0, grid.t_count, t_step):
        ts = times[t0:t0 + t_step]
        acc = coef[:, None] * np.exp(1j * temporal_phase(ts))
        for w in waves[:-1]:
            acc = (acc[:, :, None] * w[:, None, :]).reshape(p, -1)
        block = (acc.T @ waves[-1]).real
        out[t0:t0 + len(ts)] = block.reshape(len(ts), inner, -1)
    return out.reshape(-1)
