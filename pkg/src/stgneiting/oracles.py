"""Standard transform-oracle suites for the temporal, stable and mixture samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import distributions as dist
from .model import MixtureMeasure
from .rng import RngStream
from .spectral import ConditionalTemporalLaw, sample_temporal_frequency
from .validation import OracleReport, transform_oracle
from .variograms import Strategy, VariogramSpec

U_GRID = (0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0)
LAMBDAS = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class OracleCase:
    name: str
    report: OracleReport

    def line(self) -> str:
        return f"{'PASS' if self.report.passed else 'FAIL'}  {self.name:<48s} {self.report.summary()}"


def temporal_cases():
    """One variogram per conditional sampler strategy."""
    return [
        ("direct_cauchy", VariogramSpec.linear(1.0)),
        ("gamma_mixture", VariogramSpec.logarithmic(2.06)),
        ("stable_mixture", VariogramSpec.cauchy_class(1.0, 1.0, 0.5)),
        ("stable_mixture/power", VariogramSpec.fractional_power(1.5)),
        ("compound_poisson", VariogramSpec.table_entry("bounded_exponential", sill=2.0, scale=0.5)),
        ("shot_noise/logarithmic", VariogramSpec.logarithmic(2.06, strategy=Strategy.SHOT_NOISE)),
    ]


def temporal_cf_suite(n_draws: int = 100_000, seed: int = 0, lams=LAMBDAS, u_grid=U_GRID,
                      cases=None) -> list[OracleCase]:
    """Empirical CF of each conditional sampler against ``exp(-lam * gamma(u))``."""
    out = []
    for i, (name, spec) in enumerate(cases or temporal_cases()):
        for j, lam in enumerate(lams):
            law = ConditionalTemporalLaw(spec.strategy, lam)
            gen = RngStream(seed, 1 + 16 * i + j).generator()
            rep = transform_oracle(lambda n: sample_temporal_frequency(law, spec, gen, size=n),
                                   lambda u: math.exp(-lam * float(spec(u))), u_grid, n_draws, "cf")
            out.append(OracleCase(f"{name} {spec.describe()} lam={lam:g}", rep))
    return out


def tilted_stable_suite(n_draws: int = 100_000, seed: int = 0, betas=(0.5, 0.9), tilts=(0.0, 1.0, 100.0),
                        s_grid=(0.5, 1.0, 2.0)) -> list[OracleCase]:
    out = []
    for i, beta in enumerate(betas):
        for j, tilt in enumerate(tilts):
            gen = RngStream(seed, 1000 + 16 * i + j).generator()
            rep = transform_oracle(lambda n: dist.sample_tilted_unilateral_stable(beta, tilt, gen, size=n),
                                   lambda s: math.exp(tilt ** beta - (tilt + s) ** beta), s_grid, n_draws,
                                   "laplace")
            out.append(OracleCase(f"tilted_stable beta={beta:g} tilt={tilt:g}", rep))
    return out


def mixture_suite(n_draws: int = 100_000, seed: int = 0, c: float = 0.01,
                  t_grid=(1.0, 100.0, 1e4)) -> list[OracleCase]:
    mu = MixtureMeasure.sqrt_gamma_half(c)
    gen = RngStream(seed, 2000).generator()
    rep = transform_oracle(lambda n: mu.sample(gen, size=n), lambda t: float(mu.phi(t)), t_grid, n_draws,
                           "laplace")
    return [OracleCase(f"mixture {mu.label}", rep)]


def full_suite(n_draws: int = 100_000, seed: int = 0) -> list[OracleCase]:
    return temporal_cf_suite(n_draws, seed) + tilted_stable_suite(n_draws, seed) + mixture_suite(n_draws, seed)


def suite_passed(cases) -> bool:
    return all(c.report.passed for c in cases)


def summarize(cases) -> str:
    return "\n".join(c.line() for c in cases) + "\n"

