"""Scalar observables along a trajectory, from any of the three engines."""
from __future__ import annotations

import numpy as np

from . import closedform as cf
from .dynamics import DEFAULT_DT, SpectralPropagator, integrate_master_equation
from .entanglement import (
    SubspaceLeakError,
    concurrence,
    extract_mode_qubits,
    field_state,
    pairwise_concurrences,
)
from .model import GROUND, FockAtomBasis, ModelParams, atom_projector, build_hamiltonian, initial_state

METHODS = ("closed", "spectral", "rk4")
COLUMNS = ("P_g", "C_AB", "C_B", "C_a", "C_b", "purity", "trace")


def state_observables(rho, p: ModelParams, basis: FockAtomBasis) -> dict:
    """Observables of a full model density matrix."""
    c_a, c_b, c_ab = pairwise_concurrences(rho, p, basis)
    c_field = concurrence(extract_mode_qubits(field_state(rho, basis)))
    return {
        "P_g": float(np.trace(atom_projector(basis, GROUND) @ rho).real),
        "C_AB": c_ab,
        "C_B": c_field,
        "C_a": c_a,
        "C_b": c_b,
        "purity": float(np.trace(rho @ rho).real),
        "trace": float(np.trace(rho).real),
    }


def closed_observables(p: ModelParams, t: float, delta_mix: float = 0.0) -> dict:
    """Same observables from the closed-form expressions.

    The single-mode concurrences follow C_a = (g_a/g) C_AB, C_b = (g_b/g) C_AB.
    """
    rho = cf.rho_closed(p, t, delta_mix).matrix
    c_ab = cf.concurrence_ab_closed(p, t, delta_mix)
    return {
        "P_g": cf.ground_probability(p, t, delta_mix),
        "C_AB": c_ab,
        "C_B": cf.concurrence_b_closed(p, t, delta_mix),
        "C_a": abs(p.g_a) / p.g * c_ab,
        "C_b": abs(p.g_b) / p.g * c_ab,
        "purity": float(np.trace(rho @ rho).real),
        "trace": float(np.trace(rho).real),
    }


def evolve_states(p: ModelParams, times, method: str, delta_mix: float = 0.0,
                  dt: float = DEFAULT_DT, basis: FockAtomBasis | None = None):
    """Full density matrices at ``times`` from the spectral or RK4 engine."""
    basis = basis or FockAtomBasis(2)
    times = np.asarray(times, dtype=float)
    h = build_hamiltonian(p, basis)
    rho0 = initial_state("thermal_vacuum", basis, delta_mix)
    if method == "spectral":
        prop = SpectralPropagator(h)
        return [prop.propagate(rho0, p.gamma, t) for t in times]
    if method == "rk4":
        grid = times if times[0] == 0.0 else np.concatenate([[0.0], times])
        states = integrate_master_equation(h, rho0, p.gamma, grid, dt).states
        return states if times[0] == 0.0 else states[1:]
    raise ValueError(f"no full-state engine named {method!r}")


def evolve_observables(p: ModelParams, times, method: str = "closed", delta_mix: float = 0.0,
                       dt: float = DEFAULT_DT, basis: FockAtomBasis | None = None) -> dict:
    """``{column: ndarray}`` for each name in :data:`COLUMNS` over ``times``."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    basis = basis or FockAtomBasis(2)
    if method == "closed":
        rows = [closed_observables(p, t, delta_mix) for t in times]
    else:
        states = evolve_states(p, times, method, delta_mix, dt, basis)
        rows = []
        for t, rho in zip(times, states):
            try:
                rows.append(state_observables(rho, p, basis))
            except SubspaceLeakError as exc:
                raise SubspaceLeakError(f"t={t:g}: {exc}", exc.residual) from exc
    return {name: np.array([r[name] for r in rows]) for name in COLUMNS}
