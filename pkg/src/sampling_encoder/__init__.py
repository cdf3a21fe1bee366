"""Bayesian target encoding of categorical variables by posterior sampling."""

from .base import BaseEstimator, NotFittedError, TransformerMixin, clone
from .conjugate import (
    BetaParams,
    CategoryStats,
    DirichletParams,
    ImproperDistributionError,
    NormalGammaParams,
    TargetSummary,
    posterior_mean,
    posterior_update,
    scaled_prior,
)
from .data import Column, Dataset, GeneratorSpec, generate, quantile_bin, read_csv, write_csv
from .encoder import (
    EncodedDataset,
    SamplingBayesianEncoder,
    TargetMeanEncoder,
    apply_mapping,
    predict_average,
)
from .rng import PosteriorDraw, SeedContext, derive_stream, draw

__version__ = "0.1.0"

__all__ = [
    "BaseEstimator",
    "BetaParams",
    "CategoryStats",
    "Column",
    "Dataset",
    "DirichletParams",
    "EncodedDataset",
    "GeneratorSpec",
    "ImproperDistributionError",
    "NormalGammaParams",
    "NotFittedError",
    "PosteriorDraw",
    "SamplingBayesianEncoder",
    "SeedContext",
    "TargetMeanEncoder",
    "TargetSummary",
    "TransformerMixin",
    "apply_mapping",
    "clone",
    "derive_stream",
    "draw",
    "generate",
    "posterior_mean",
    "posterior_update",
    "predict_average",
    "quantile_bin",
    "read_csv",
    "scaled_prior",
    "write_csv",
]
