"""Method-agnostic entry point used by the CLI and the validation protocol."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .fields import FieldRealization
from .model import GneitingModel, SpaceTimePointSet
from .rng import realization_seed
from .spectral import DEFAULT_EPS, build_spectral_ensemble, evaluate_spectral
from .substitution import build_substitution_ensemble, evaluate_substitution
from ._version import __version__


class Method(str, Enum):
    SPECTRAL = "spectral"
    SUBSTITUTION = "substitution"


def simulate_field(model: GneitingModel, method, p: int, points: SpaceTimePointSet, seed: int,
                   instants=None, eps: float = DEFAULT_EPS) -> FieldRealization:
    """One realization.  For substitution, ``instants`` defaults to the distinct point times."""
    method = Method(method)
    prov = {"model_hash": model.digest(), "library_version": __version__}
    if method is Method.SPECTRAL:
        ens = build_spectral_ensemble(model, p, seed, eps=eps)
        prov["eps"] = eps
        return evaluate_spectral(ens, points, prov)
    if instants is None:
        instants = np.unique(points.times)
    ens = build_substitution_ensemble(model, instants, p, seed)
    return evaluate_substitution(ens, points, prov)


def simulate_realizations(model: GneitingModel, method, p: int, points: SpaceTimePointSet,
                          master_seed: int, n: int, instants=None, eps: float = DEFAULT_EPS):
    """Yield ``n`` independent realizations; realization ``i`` uses ``realization_seed(master_seed, i)``."""
    for i in range(n):
        field = simulate_field(model, method, p, points, realization_seed(master_seed, i), instants, eps)
        field.provenance["realization"] = i
        field.provenance["master_seed"] = master_seed
        yield field
