"""axiswalk: simulation and verification of axis-driven planar random walks.

The package simulates nearest-neighbour lattice walks that behave like
simple random walk away from the coordinate axes but receive an outward
push of polynomial strength on them, tracks their axis-excursion structure,
and checks the measured statistics against exact and asymptotic
predictions.

Layout
------
``models``
    Walk families, exact one-step laws, reproducible replica streams.
``excursions``
    Excursion records, path summaries, reconstruction identities.
``analytics``
    Exact series, recurrences and limit-law oracles used as references.
``stats``
    Empirical-distribution helpers (ECDF, KS, DKW, tail-exponent fits).
``runner``
    Batch experiment driver with CSV/manifest output and resume.
``verify``
    Named verification targets comparing simulation against predictions.
``cli``
    ``axiswalk`` command-line entry point.
"""

from ._backend import BACKEND, available_backends, backend_name
from .models import (
    MODEL_KINDS,
    EarlyStop,
    LatticeState,
    ModelSpec,
    RngStream,
    simulate_path,
    step,
    transition_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "MODEL_KINDS",
    "EarlyStop",
    "LatticeState",
    "ModelSpec",
    "RngStream",
    "__version__",
    "available_backends",
    "backend_name",
    "simulate_path",
    "step",
    "transition_distribution",
]
