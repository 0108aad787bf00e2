"""Extended Gneiting space-time covariance model.

    C(h, u) = (gamma(u) + 1) ** (-k/2) * phi(|h|**2 / (gamma(u) + 1))

``phi`` is completely monotone, ``phi(t) = E[exp(-R t)]`` with ``R`` drawn
from a :class:`MixtureMeasure`; ``gamma`` is a temporal variogram from
:mod:`stgneiting.variograms`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .rng import as_generator
from .variograms import ParameterError, VariogramSpec


class MixtureKind(str, Enum):
    DIRAC = "dirac"
    SQRT_GAMMA_HALF = "sqrt_gamma_half"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class MixtureMeasure:
    """Probability measure ``mu`` of the latent spatial scale ``R``.

    * ``dirac(r)``: ``phi(t) = exp(-r t)``
    * ``sqrt_gamma_half(c)``: ``phi(t) = exp(-c sqrt(t))``, drawn as
      ``R = c**2 / (4 G)`` with ``G ~ Gamma(1/2, rate 1)``
    * ``tabulated(atoms)``: finite mixture of ``(r, weight)`` atoms
    """

    kind: MixtureKind
    r: float | None = None
    c: float | None = None
    atoms: tuple[tuple[float, float], ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", MixtureKind(self.kind))
        errors = []
        if self.kind is MixtureKind.DIRAC:
            if self.r is None or not (self.r > 0 and math.isfinite(self.r)):
                errors.append(f"mixture.r={self.r} outside legal range (0, inf)")
        elif self.kind is MixtureKind.SQRT_GAMMA_HALF:
            if self.c is None or not (self.c > 0 and math.isfinite(self.c)):
                errors.append(f"mixture.c={self.c} outside legal range (0, inf)")
        else:
            atoms = tuple((float(r), float(w)) for r, w in self.atoms)
            if not atoms:
                errors.append("mixture.atoms: at least one atom required")
            for i, (r, w) in enumerate(atoms):
                if not (r >= 0 and math.isfinite(r)):
                    errors.append(f"mixture.atoms[{i}].r={r:g} outside legal range [0, inf)")
                if not w > 0:
                    errors.append(f"mixture.atoms[{i}].weight={w:g} must be > 0")
            total = math.fsum(w for _, w in atoms)
            if atoms and abs(total - 1) > 1e-12:
                errors.append(f"mixture.atoms: weights sum to {total!r}, not 1")
            object.__setattr__(self, "atoms", atoms)
        if errors:
            raise ParameterError(errors)
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    @classmethod
    def dirac(cls, r):
        return cls(MixtureKind.DIRAC, r=float(r))

    @classmethod
    def sqrt_gamma_half(cls, c):
        return cls(MixtureKind.SQRT_GAMMA_HALF, c=float(c))

    @classmethod
    def tabulated(cls, atoms):
        return cls(MixtureKind.TABULATED, atoms=tuple(atoms))

    def _default_label(self):
        if self.kind is MixtureKind.DIRAC:
            return f"dirac({self.r:g})"
        if self.kind is MixtureKind.SQRT_GAMMA_HALF:
            return f"sqrt_gamma_half({self.c:g})"
        return "tabulated(" + ", ".join(f"{r:g}:{w:g}" for r, w in self.atoms) + ")"

    def has_atom_at_zero(self) -> bool:
        return self.kind is MixtureKind.TABULATED and any(r == 0 for r, _ in self.atoms)

    def phi(self, t):
        """Completely monotone function ``E[exp(-R t)]``; ``phi(0) == 1`` exactly."""
        t = np.asarray(t, dtype=float)
        if self.kind is MixtureKind.DIRAC:
            out = np.exp(-self.r * t)
        elif self.kind is MixtureKind.SQRT_GAMMA_HALF:
            out = np.exp(-self.c * np.sqrt(t))
        else:
            out = sum(w * np.exp(-r * t) for r, w in self.atoms)
            out = np.where(t == 0, 1.0, out)
        return out if out.ndim else float(out)

    def sample(self, rng, size=None):
        gen = as_generator(rng)
        n = 1 if size is None else size
        if self.kind is MixtureKind.DIRAC:
            out = np.full(n, self.r)
        elif self.kind is MixtureKind.SQRT_GAMMA_HALF:
            out = self.c ** 2 / (4.0 * gen.gamma(0.5, 1.0, size=n))
        else:
            rs = np.array([r for r, _ in self.atoms])
            ws = np.array([w for _, w in self.atoms])
            out = gen.choice(rs, size=n, p=ws / ws.sum())
        return float(out[0]) if size is None else out

    def to_dict(self) -> dict:
        if self.kind is MixtureKind.DIRAC:
            return {"kind": "dirac", "r": self.r}
        if self.kind is MixtureKind.SQRT_GAMMA_HALF:
            return {"kind": "sqrt_gamma_half", "c": self.c}
        return {"kind": "tabulated", "atoms": [list(a) for a in self.atoms]}


@dataclass(frozen=True)
class GneitingModel:
    k: int
    mu: MixtureMeasure
    gamma: VariogramSpec

    def __post_init__(self):
        if not (isinstance(self.k, (int, np.integer)) and self.k >= 1):
            raise ParameterError([f"model.k={self.k!r} must be a positive integer"])

    def covariance(self, h, u):
        """C(h, u) for lag vectors ``h`` (shape ``(..., k)``) and time lags ``u``."""
        h = np.asarray(h, dtype=float)
        if h.shape[-1:] != (self.k,):
            raise ValueError(f"spatial lag must have trailing dimension k={self.k}, got shape {h.shape}")
        g1 = np.asarray(self.gamma(u)) + 1.0
        h2 = np.sum(h * h, axis=-1)
        out = g1 ** (-self.k / 2) * np.asarray(self.mu.phi(h2 / g1))
        return out if out.ndim else float(out)

    def temporal_covariance(self, u):
        out = (np.asarray(self.gamma(u)) + 1.0) ** (-self.k / 2)
        return out if out.ndim else float(out)

    def variogram(self, h, u):
        """Space-time variogram ``1 - C(h, u)`` of the unit-variance field."""
        return 1.0 - np.asarray(self.covariance(h, u))

    def to_dict(self) -> dict:
        return {"k": int(self.k), "mixture": self.mu.to_dict(), "variogram": self.gamma.to_dict()}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def describe(self) -> str:
        return f"k={self.k}, mu={self.mu.label}, gamma={self.gamma.describe()}"


def evaluate_covariance(model: GneitingModel, h, u):
    h = np.asarray(h, dtype=float)
    if h.ndim == 0 or h.shape[-1] != model.k:
        raise ValueError(f"h must have length k={model.k}, got shape {h.shape}")
    return model.covariance(h, u)


@dataclass(frozen=True)
class GridSpec:
    """Regular space-time grid; points are ordered time-major, last spatial axis fastest."""

    origin: tuple[float, ...]
    mesh: tuple[float, ...]
    shape: tuple[int, ...]
    t_origin: float = 0.0
    t_mesh: float = 1.0
    t_count: int = 1

    def __post_init__(self):
        if not (len(self.origin) == len(self.mesh) == len(self.shape) >= 1):
            raise ValueError("origin, mesh and shape must have the same positive length")
        if any(n < 1 for n in self.shape) or self.t_count < 1:
            raise ValueError("grid node counts must be >= 1")
        if any(m <= 0 for m in self.mesh) or self.t_mesh <= 0:
            raise ValueError("grid meshes must be > 0")

    @property
    def k(self) -> int:
        return len(self.shape)

    @property
    def n(self) -> int:
        return int(np.prod(self.shape)) * self.t_count

    def axes(self) -> list[np.ndarray]:
        return [o + m * np.arange(n) for o, m, n in zip(self.origin, self.mesh, self.shape)]

    def times(self) -> np.ndarray:
        return self.t_origin + self.t_mesh * np.arange(self.t_count)

    def to_dict(self) -> dict:
        return {
            "origin": list(self.origin), "mesh": list(self.mesh), "shape": list(self.shape),
            "t_origin": self.t_origin, "t_mesh": self.t_mesh, "t_count": self.t_count,
        }


@dataclass(frozen=True)
class SpaceTimePointSet:
    spatial: np.ndarray
    times: np.ndarray
    grid: GridSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.spatial, dtype=float))
        t = np.atleast_1d(np.asarray(self.times, dtype=float))
        if s.shape[0] < 1 or s.shape[0] != t.shape[0] or t.ndim != 1:
            raise ValueError("need n >= 1 points with matching spatial and time coordinates")
        object.__setattr__(self, "spatial", s)
        object.__setattr__(self, "times", t)

    @classmethod
    def from_grid(cls, grid: GridSpec) -> "SpaceTimePointSet":
        mesh = np.meshgrid(grid.times(), *grid.axes(), indexing="ij")
        times = mesh[0].ravel()
        spatial = np.stack([m.ravel() for m in mesh[1:]], axis=1)
        return cls(spatial, times, grid)

    @property
    def n(self) -> int:
        return self.times.shape[0]

    @property
    def k(self) -> int:
        return self.spatial.shape[1]
