"""Discrete Bochner identities, Beckner inequalities and entropy decay for
reversible Markov chains."""

import json

from ._core import (
    ConfigError,
    ConvexEntropy,
    DegenerateInputError,
    DomainError,
    HypothesisError,
    NumericalError,
    SizeError,
    big_theta,
    erf,
    fv_phi,
    fv_refinement_csv,
    lambda_h,
    theta,
    theta_surface_csv,
)
from ._core import Model as _Model


def model(spec=None, **kwargs):
    """Build a chain from a model block, e.g. model(type="zero_range", L=3, N=3)."""
    block = dict(spec or {}, **kwargs)
    return _Model(json.dumps(block))


__all__ = [
    "ConfigError",
    "ConvexEntropy",
    "DegenerateInputError",
    "DomainError",
    "HypothesisError",
    "NumericalError",
    "SizeError",
    "big_theta",
    "erf",
    "fv_phi",
    "fv_refinement_csv",
    "lambda_h",
    "model",
    "theta",
    "theta_surface_csv",
]
