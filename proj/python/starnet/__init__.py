"""Entanglement distribution in NV-center star networks."""

from ._core import (
    InvalidArgument,
    NumericalFailure,
    PhysicsRejection,
    __version__,
    chain_hopping,
    concurrence,
    dicke_state,
    eof,
    eof_from_concurrence,
    estimate_gradient,
    fit_exponential,
    gradient_coherence,
    ideal_pair,
    loss_configurations,
    max_entanglement_scan,
    partial_trace,
    run,
    star_hamiltonian,
    star_spectrum,
    validate_star_geometry,
    w_state,
)

__all__ = [
    "InvalidArgument",
    "NumericalFailure",
    "PhysicsRejection",
    "__version__",
    "chain_hopping",
    "concurrence",
    "dicke_state",
    "eof",
    "eof_from_concurrence",
    "estimate_gradient",
    "fit_exponential",
    "gradient_coherence",
    "ideal_pair",
    "loss_configurations",
    "max_entanglement_scan",
    "partial_trace",
    "run",
    "star_hamiltonian",
    "star_spectrum",
    "validate_star_geometry",
    "w_state",
]
