"""Continuous spectral simulation.

A realization is a normalized sum of ``p`` cosine waves whose space-time
frequencies ``(omega, tau)`` are drawn from the covariance's spectral measure
in two stages: ``omega ~ N(0, 2r I_k)`` given ``r ~ mu``, then ``tau`` from the
conditional law with characteristic function ``exp(-lam * gamma(u))``,
``lam = |omega|**2 / (4r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import distributions as dist
from .fields import FieldRealization, sum_waves
from .model import GneitingModel, SpaceTimePointSet
from .rng import RngStream, as_generator
from .variograms import Family, Strategy, VariogramSpec

DEFAULT_EPS = 0.01
# cap on the expected number of shot-noise points per unit lam (generic route)
MAX_POINTS_PER_LAMBDA = 100.0


@dataclass(frozen=True)
class ConditionalTemporalLaw:
    strategy: Strategy
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not self.lam >= 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")

    @classmethod
    def from_frequency(cls, strategy, omega, r):
        omega = np.asarray(omega, dtype=float)
        return cls(strategy, float(omega @ omega) / (4.0 * r))


def sample_spatial_frequency(r: float, k: int, rng, size=None):
    """Spatial frequency with i.i.d. N(0, 2r) coordinates."""
    if not r > 0:
        raise ValueError("spatial frequency requires r > 0; an atom of mu at zero has no spectral representation")
    return dist.sample_gaussian_vector(k, 2.0 * r, rng, size=size)


# ---------------------------------------------------------------- shot noise

def _log_shot_noise(a, lam, eps, gen, n):
    """Logarithmic variogram via the ``lam_sn / t`` shot-noise on ``t >= a``."""
    lam_sn = lam / math.log(a)
    times = dist.sample_poisson_times_logintensity(a, lam_sn, eps, gen, size=n)
    # marks are Laplace with rate T_n
    marks = gen.laplace(0.0, 1.0, size=times.shape) / times
    return marks.sum(axis=1)


def _log_grid():
    g = np.concatenate([np.logspace(-30, 250, 24000), np.linspace(0.02, 2000.0, 50000)])
    return np.unique(g)


class ShotNoiseTable:
    """Tabulated pieces of the generic shot-noise sampler for one variogram.

    The shot-noise points ``T_n`` with marks ``X_{T_n}`` form a Poisson
    process on ``(t, x)`` with intensity ``lam exp(-t w(x)) w(x) X(dx) dt``,
    ``w(x) = x**2 / (1 + x**2)``.  Keeping the points with ``t <= t0`` is the
    same as keeping each jump ``x`` of a Poisson process with intensity
    ``lam X(dx)`` with probability ``1 - exp(-t0 w(x))``; this table stores
    the law of those retained jumps.  The discarded small jumps are replaced
    by a Gaussian with the same variance.
    """

    def __init__(self, spec: VariogramSpec, eps: float = DEFAULT_EPS,
                 max_points: float = MAX_POINTS_PER_LAMBDA):
        x = _log_grid()
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            rho = np.nan_to_num(np.asarray(spec.spectral_density(x), dtype=float), nan=0.0, posinf=0.0)
            w = 1.0 / (1.0 + 1.0 / (x * x))
        self.x = x

        def trap(f):
            return float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(x)))

        def theta(t):
            with np.errstate(under="ignore"):
                return 2.0 * trap(w * np.exp(-t * w) * rho)

        def expected_points(t):
            return 2.0 * trap(-np.expm1(-t * w) * rho)

        theta0 = theta(0.0)
        if theta(1e12) > eps * theta0:
            t0 = 1e12
        else:
            t0 = math.exp(brentq(lambda lt: theta(math.exp(lt)) - eps * theta0, -30.0, math.log(1e12)))
        if expected_points(t0) > max_points:
            t0 = math.exp(brentq(lambda lt: expected_points(math.exp(lt)) - max_points, -30.0, math.log(t0)))
        self.t0 = t0
        keep = -np.expm1(-t0 * w) * rho
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (keep[1:] + keep[:-1]) * np.diff(x))])
        self.rate = 2.0 * cdf[-1]
        self.cdf = cdf / cdf[-1]
        small = x <= 1.0
        xs = x[small]
        with np.errstate(under="ignore"):
            resid = xs * xs * np.exp(-t0 * w[small]) * rho[small]
        self.small_var = 2.0 * float(np.sum(0.5 * (resid[1:] + resid[:-1]) * np.diff(xs)))
        self.relative_residual = theta(t0) / theta0

    def jumps(self, n, gen):
        mag = np.interp(gen.random(n), self.cdf, self.x)
        return np.where(gen.random(n) < 0.5, -mag, mag)

    def sample(self, lam, gen, n):
        batch = max(1, int(4e6 / max(lam * self.rate, 1.0)))
        out = np.concatenate([
            dist.sample_compound_poisson(lam * self.rate, self.jumps, gen, size=min(batch, n - i))
            for i in range(0, n, batch)
        ])
        return out + gen.normal(0.0, math.sqrt(lam * self.small_var), size=n)


@lru_cache(maxsize=64)
def shot_noise_table(spec: VariogramSpec, eps: float = DEFAULT_EPS) -> ShotNoiseTable:
    return ShotNoiseTable(spec, eps)


# ----------------------------------------------------------- dispatch

def sample_temporal_frequency(law: ConditionalTemporalLaw, spec: VariogramSpec, rng,
                              size=None, eps: float = DEFAULT_EPS):
    """Temporal frequency with characteristic function ``exp(-lam * gamma(u))``."""
    strategy = law.strategy
    if strategy not in spec.supported_strategies():
        raise ValueError(f"strategy {strategy.value} does not apply to {spec.describe()}")
    gen = as_generator(rng)
    n = 1 if size is None else size
    lam = law.lam
    p = spec.params
    if lam == 0:
        out = np.zeros(n)
    elif strategy is Strategy.DIRECT_CAUCHY:
        out = lam * p["b"] * gen.standard_cauchy(n)
    elif strategy is Strategy.GAMMA_MIXTURE:
        a2 = p["a"] ** 2
        x = gen.gamma(lam / math.log(a2), 1.0 / a2, size=n)
        out = gen.standard_normal(n) * np.sqrt(2.0 * x)
    elif strategy is Strategy.STABLE_MIXTURE:
        if spec.family is Family.FRACTIONAL_POWER:
            a, alpha, beta = p["scale"], p["alpha"], 1.0
        else:
            a, alpha, beta = p["a"], p["alpha"], p["beta"]
        tilt = lam ** (1.0 / beta)
        s = dist.sample_tilted_unilateral_stable(beta, tilt, gen, size=n)
        t = dist.sample_symmetric_stable(alpha, gen, size=n)
        out = t * (s * a * tilt) ** (1.0 / alpha)
    elif strategy is Strategy.COMPOUND_POISSON:
        out = dist.sample_compound_poisson(lam * spec.spectral_mass, spec.sample_jumps, gen, size=n)
    elif spec.family is Family.LOGARITHMIC:
        out = _log_shot_noise(p["a"], lam, eps, gen, n)
    else:
        out = shot_noise_table(spec, eps).sample(lam, gen, n)
    return float(out[0]) if size is None else out


# ----------------------------------------------------------- ensembles

@dataclass(frozen=True)
class SpectralEnsemble:
    """``p`` cosine components: frequencies, temporal frequencies, phases, amplitudes."""

    omega: np.ndarray
    tau: np.ndarray
    phi: np.ndarray
    amp: np.ndarray
    seed: int | None = None

    @property
    def p(self) -> int:
        return self.tau.shape[0]

    @property
    def k(self) -> int:
        return self.omega.shape[1]

    def frequencies_squared(self) -> np.ndarray:
        return np.sum(self.omega ** 2, axis=1)


def _component(model: GneitingModel, stream: RngStream, eps: float):
    gen = stream.generator()
    r = model.mu.sample(gen)
    omega = sample_spatial_frequency(r, model.k, gen)
    law = ConditionalTemporalLaw.from_frequency(model.gamma.strategy, omega, r)
    tau = sample_temporal_frequency(law, model.gamma, gen, eps=eps)
    phi = gen.uniform(0.0, 2 * math.pi)
    u = 1.0 - gen.random()
    return omega, tau, phi, math.sqrt(-2.0 * math.log(u))


def build_spectral_ensemble(model: GneitingModel, p: int, seed: int,
                            eps: float = DEFAULT_EPS) -> SpectralEnsemble:
    """Draw ``p`` independent components; component ``j`` uses stream ``(seed, j)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if model.mu.has_atom_at_zero():
        raise ValueError("spectral simulation needs a mixture measure without an atom at zero; "
                         "use the substitution method instead")
    parts = [_component(model, RngStream(seed, j), eps) for j in range(1, p + 1)]
    omega = np.array([c[0] for c in parts]).reshape(p, model.k)
    tau, phi, amp = (np.array([c[i] for c in parts]) for i in (1, 2, 3))
    return SpectralEnsemble(omega, tau, phi, amp, seed)


def evaluate_spectral(ensemble: SpectralEnsemble, points: SpaceTimePointSet,
                      provenance: dict | None = None) -> FieldRealization:
    if points.k != ensemble.k:
        raise ValueError(f"points have dimension {points.k}, ensemble has {ensemble.k}")
    tau = ensemble.tau
    values = sum_waves(ensemble.omega, lambda t: np.outer(tau, t), ensemble.phi, ensemble.amp, points)
    prov = {"method": "spectral", "p": ensemble.p, "seed": ensemble.seed}
    prov.update(provenance or {})
    return FieldRealization(points, values, prov)
