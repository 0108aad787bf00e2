"""Named models used by the figures, the validation protocol and the test-suite."""

from __future__ import annotations

from .model import GneitingModel, MixtureMeasure
from .variograms import VariogramSpec


def fig1() -> GneitingModel:
    return GneitingModel(2, MixtureMeasure.dirac(0.01), VariogramSpec.linear(1.0))


def fig2() -> GneitingModel:
    return GneitingModel(2, MixtureMeasure.dirac(0.01), VariogramSpec.logarithmic(2.06))


def fig3() -> GneitingModel:
    return GneitingModel(2, MixtureMeasure.dirac(0.01), VariogramSpec.cauchy_class(1.0, 1.0, 0.5))


def fig4() -> GneitingModel:
    # same model as fig3, simulated by substitution
    return fig3()


def fig5() -> GneitingModel:
    return GneitingModel(2, MixtureMeasure.sqrt_gamma_half(0.01), VariogramSpec.cauchy_class(1.0, 1.0, 0.5))


def tabulated_power() -> GneitingModel:
    return GneitingModel(
        2,
        MixtureMeasure.tabulated([(0.005, 0.5), (0.05, 0.5)]),
        VariogramSpec.fractional_power(1.5),
    )


def bounded_exponential() -> GneitingModel:
    return GneitingModel(2, MixtureMeasure.dirac(0.02),
                         VariogramSpec.table_entry("bounded_exponential", sill=2.0, scale=0.5))


def atom_at_zero() -> GneitingModel:
    """Mixture with an atom at r = 0: only the substitution method applies."""
    return GneitingModel(2, MixtureMeasure.tabulated([(0.0, 0.3), (0.01, 0.7)]), VariogramSpec.linear(1.0))


CATALOG = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "tabulated_power": tabulated_power,
    "bounded_exponential": bounded_exponential,
    "atom_at_zero": atom_at_zero,
}


def get_model(name: str) -> GneitingModel:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown catalog model {name!r}; known: {sorted(CATALOG)}") from None
