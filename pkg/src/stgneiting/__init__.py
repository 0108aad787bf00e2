"""Simulation of space-time Gaussian random fields with extended Gneiting covariance."""

from ._version import __version__
from .catalog import CATALOG, get_model
from .fields import FieldRealization
from .model import GneitingModel, GridSpec, MixtureMeasure, SpaceTimePointSet, evaluate_covariance
from .rng import RngStream, realization_seed
from .simulation import Method, simulate_field, simulate_realizations
from .spectral import (
    ConditionalTemporalLaw, SpectralEnsemble, build_spectral_ensemble, evaluate_spectral,
    sample_spatial_frequency, sample_temporal_frequency,
)
from .substitution import (
    IntrinsicPath, SubstitutionEnsemble, build_substitution_ensemble, evaluate_substitution,
    simulate_intrinsic_path,
)
from .variograms import (
    Family, ParameterError, Strategy, VariogramSpec, classify_variogram, evaluate_variogram,
)

__all__ = [
    "__version__", "CATALOG", "get_model", "FieldRealization", "GneitingModel", "GridSpec",
    "MixtureMeasure", "SpaceTimePointSet", "evaluate_covariance", "RngStream", "realization_seed",
    "Method", "simulate_field", "simulate_realizations", "ConditionalTemporalLaw", "SpectralEnsemble",
    "build_spectral_ensemble", "evaluate_spectral", "sample_spatial_frequency", "sample_temporal_frequency",
    "IntrinsicPath", "SubstitutionEnsemble", "build_substitution_ensemble", "evaluate_substitution",
    "simulate_intrinsic_path", "Family", "ParameterError", "Strategy", "VariogramSpec",
    "classify_variogram", "evaluate_variogram",
]
