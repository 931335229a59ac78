"""Two-level atom coupled to two degenerate cavities under phase decoherence:
closed-form solution, numerical propagators and concurrence analysis."""

from .closedform import (
    concurrence_ab_closed,
    concurrence_b_closed,
    ground_probability,
    rho_closed,
    stationary_values,
)
from .dynamics import integrate_master_equation, spectral_propagate
from .entanglement import concurrence, pairwise_concurrences
from .model import FockAtomBasis, ModelParams, build_hamiltonian, initial_state

__all__ = [
    "FockAtomBasis",
    "ModelParams",
    "build_hamiltonian",
    "concurrence",
    "concurrence_ab_closed",
    "concurrence_b_closed",
    "ground_probability",
    "initial_state",
    "integrate_master_equation",
    "pairwise_concurrences",
    "rho_closed",
    "spectral_propagate",
    "stationary_values",
]
