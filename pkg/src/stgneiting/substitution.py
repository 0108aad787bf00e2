"""Substitution simulation.

Each component composes a cosine wave with a linear spatial drift and an
intrinsic Gaussian path ``W_j`` whose variogram is the temporal ``gamma``:

    cos(sqrt(2 R_j) <w_j, x> + |w_j| / sqrt(2) * W_j(t) + phi_j)

with ``w_j ~ N(0, I_k)``.  Paths are only known on the simulated instants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import FieldRealization, sum_waves
from .model import GneitingModel, SpaceTimePointSet
from .rng import RngStream, as_generator
from .variograms import VariogramSpec

MAX_INSTANTS = 10_000
JITTERS = (0.0, 1e-12, 1e-10, 1e-8)
# absolute tolerance when matching requested times to simulated instants
INSTANT_TOL = 1e-9


class PathFactorizationError(np.linalg.LinAlgError):
    """The increment covariance could not be factorized."""


@dataclass(frozen=True)
class IntrinsicPath:
    """One path of ``W`` on sorted instants, anchored at ``W(0) = 0``."""

    time_instants: np.ndarray
    values: np.ndarray

    def at(self, t):
        return self.values[match_instants(self.time_instants, t)]


@dataclass(frozen=True)
class PathFactor:
    """Lower Cholesky factor of ``K(t, t') = gamma(t) + gamma(t') - gamma(t - t')``
    restricted to the nonzero instants; ``jitter`` is what had to be added."""

    instants: np.ndarray
    nonzero: np.ndarray
    chol: np.ndarray
    jitter: float

    def paths(self, z: np.ndarray) -> np.ndarray:
        """Map standard normals ``z`` of shape ``(..., n_nonzero)`` to path values."""
        out = np.zeros(z.shape[:-1] + self.instants.shape)
        out[..., self.nonzero] = z @ self.chol.T
        return out


def _normalize_instants(instants) -> np.ndarray:
    t = np.atleast_1d(np.asarray(instants, dtype=float))
    if t.ndim != 1 or t.size == 0:
        raise ValueError("instants must be a non-empty vector")
    if not np.all(np.isfinite(t)):
        raise ValueError("instants must be finite")
    s = np.sort(t)
    if np.any(np.diff(s) <= INSTANT_TOL):
        raise ValueError("instants must be distinct")
    if s.size > MAX_INSTANTS:
        raise ValueError(f"{s.size} instants exceed the dense factorization cap of {MAX_INSTANTS}")
    return s


def path_factor(spec: VariogramSpec, instants) -> PathFactor:
    t = _normalize_instants(instants)
    nonzero = np.abs(t) > INSTANT_TOL
    tn = t[nonzero]
    g = np.asarray(spec(tn), dtype=float)
    cov = g[:, None] + g[None, :] - np.asarray(spec(tn[:, None] - tn[None, :]), dtype=float)
    eye = np.eye(tn.size)
    for jitter in JITTERS:
        try:
            chol = np.linalg.cholesky(cov + jitter * eye)
        except np.linalg.LinAlgError:
            continue
        return PathFactor(t, nonzero, chol, jitter)
    raise PathFactorizationError(
        f"increment covariance of {spec.describe()} is not positive definite on the "
        f"requested instants even with jitter {JITTERS[-1]:g}; is gamma a valid variogram?")


def simulate_intrinsic_path(spec: VariogramSpec, instants, rng) -> IntrinsicPath:
    factor = path_factor(spec, instants)
    gen = as_generator(rng)
    z = gen.standard_normal(int(factor.nonzero.sum()))
    return IntrinsicPath(factor.instants, factor.paths(z))


def match_instants(instants: np.ndarray, times) -> np.ndarray:
    """Index of each requested time among ``instants``; raises if any is missing."""
    times = np.asarray(times, dtype=float)
    idx = np.clip(np.searchsorted(instants, times), 1, max(instants.size - 1, 1))
    if instants.size == 1:
        idx = np.zeros_like(idx)
    else:
        left = idx - 1
        idx = np.where(np.abs(instants[left] - times) <= np.abs(instants[idx] - times), left, idx)
    bad = np.abs(instants[idx] - times) > INSTANT_TOL
    if np.any(bad):
        missing = np.unique(np.atleast_1d(times)[np.atleast_1d(bad)])
        raise ValueError(f"time instant(s) {missing[:5].tolist()} were not simulated; "
                         "the substitution field only exists on its simulated instants")
    return idx


@dataclass(frozen=True)
class SubstitutionEnsemble:
    r: np.ndarray
    omega_tilde: np.ndarray
    phi: np.ndarray
    amp: np.ndarray
    paths: np.ndarray
    instants: np.ndarray
    seed: int | None = None

    @property
    def p(self) -> int:
        return self.r.shape[0]

    @property
    def k(self) -> int:
        return self.omega_tilde.shape[1]

    def spatial_frequencies(self) -> np.ndarray:
        return np.sqrt(2.0 * self.r)[:, None] * self.omega_tilde

    def path(self, j: int) -> IntrinsicPath:
        return IntrinsicPath(self.instants, self.paths[j])


def build_substitution_ensemble(model: GneitingModel, instants, p: int, seed: int) -> SubstitutionEnsemble:
    """Component ``j`` draws ``R, w, phi, U`` and its path from stream ``(seed, j)``.

    The Cholesky factor is computed once and shared; the paths are independent.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    factor = path_factor(model.gamma, instants)
    m = int(factor.nonzero.sum())
    k = model.k
    r = np.empty(p)
    w = np.empty((p, k))
    phi = np.empty(p)
    amp = np.empty(p)
    z = np.empty((p, m))
    for j in range(p):
        gen = RngStream(seed, j + 1).generator()
        r[j] = model.mu.sample(gen)
        w[j] = gen.standard_normal(k)
        phi[j] = gen.uniform(0.0, 2 * math.pi)
        amp[j] = math.sqrt(-2.0 * math.log(1.0 - gen.random()))
        z[j] = gen.standard_normal(m)
    return SubstitutionEnsemble(r, w, phi, amp, factor.paths(z), factor.instants, seed)


def evaluate_substitution(ensemble: SubstitutionEnsemble, points: SpaceTimePointSet,
                          provenance: dict | None = None) -> FieldRealization:
    if points.k != ensemble.k:
        raise ValueError(f"points have dimension {points.k}, ensemble has {ensemble.k}")
    # fail before any work if a time is missing
    match_instants(ensemble.instants, np.unique(points.times))
    speed = np.linalg.norm(ensemble.omega_tilde, axis=1) / math.sqrt(2.0)

    def theta(ts):
        return speed[:, None] * ensemble.paths[:, match_instants(ensemble.instants, ts)]

    values = sum_waves(ensemble.spatial_frequencies(), theta, ensemble.phi, ensemble.amp, points)
    prov = {"method": "substitution", "p": ensemble.p, "seed": ensemble.seed}
    prov.update(provenance or {})
    return FieldRealization(points, values, prov)
