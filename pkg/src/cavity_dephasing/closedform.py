"""Closed-form state and entanglement for the vacuum-field initial states.

Starting from ``|00>`` with the atom in ``(1 - delta_mix)|e><e| + delta_mix|g><g|``
the dynamics stays in the span of

    |00>|e>, |00>|g>, |phi>|e>, |phi>|g>,   |phi> = (g_a|10> + g_b|01>)/g,

which is the ordered basis used by :class:`EffectiveState`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import EXCITED, GROUND, FockAtomBasis, ModelParams

EFFECTIVE_LABELS = ("|00>|e>", "|00>|g>", "|phi>|e>", "|phi>|g>")


class NoStationaryStateError(ValueError):
    pass


@dataclass(frozen=True)
class EffectiveState:
    matrix: np.ndarray
    params: ModelParams
    t: float
    labels: tuple = EFFECTIVE_LABELS


def _envelope(p: ModelParams, t: float):
    """Return ``(cos(Omega t) e^{-gamma t Omega^2/2}, sin(Omega t) e^{...})``."""
    om = p.big_omega
    env = math.exp(-0.5 * p.gamma * t * om * om)
    return math.cos(om * t) * env, math.sin(om * t) * env


def _check_mix(delta_mix):
    if not 0.0 <= delta_mix <= 1.0:
        raise ValueError(f"delta_mix must lie in [0, 1], got {delta_mix}")


def rho_closed(p: ModelParams, t: float, delta_mix: float = 0.0) -> EffectiveState:
    if t < 0:
        raise ValueError("t must be non-negative")
    _check_mix(delta_mix)
    om = p.big_omega
    d = p.delta
    g = p.g
    ratio = d * d / (om * om)
    co, si = _envelope(p, t)

    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.5 * (1.0 + ratio + (1.0 - ratio) * co)
    rho[3, 3] = 2.0 * g * g / (om * om) * (1.0 - co)
    rho[0, 3] = (g / om) * ((d / om) * (1.0 - co) + 1j * si)
    rho[3, 0] = rho[0, 3].conjugate()
    rho *= 1.0 - delta_mix
    rho[1, 1] = delta_mix
    return EffectiveState(rho, p, t)


def phi_state(p: ModelParams, basis: FockAtomBasis, atom=GROUND) -> np.ndarray:
    """``|phi>`` tensored with the given atomic level, in ``basis``."""
    return (p.g_a * basis.ket(1, 0, atom) + p.g_b * basis.ket(0, 1, atom)) / p.g


def effective_basis(p: ModelParams, basis: FockAtomBasis) -> np.ndarray:
    """Columns are the effective basis vectors expressed in ``basis``."""
    if basis.n_max < 2:
        raise ValueError("the |phi>|e> state needs n_max >= 2")
    return np.column_stack(
        [
            basis.ket(0, 0, EXCITED),
            basis.ket(0, 0, GROUND),
            phi_state(p, basis, EXCITED),
            phi_state(p, basis, GROUND),
        ]
    )


def embed(state: EffectiveState, basis: FockAtomBasis) -> np.ndarray:
    w = effective_basis(state.params, basis)
    return w @ state.matrix @ w.conj().T


def field_state_closed(p: ModelParams, t: float, delta_mix: float = 0.0) -> np.ndarray:
    """Reduced field state as a 2x2 matrix on ``(|00>, |phi>)``."""
    rho = rho_closed(p, t, delta_mix).matrix
    return np.diag([rho[0, 0] + rho[1, 1], rho[2, 2] + rho[3, 3]])


def field_state_photon_basis(p: ModelParams, t: float, delta_mix: float = 0.0) -> np.ndarray:
    """Reduced field state on photon-number qubits ``|00>, |01>, |10>, |11>`` (n_a n_b)."""
    diag = field_state_closed(p, t, delta_mix)
    phi = np.array([0.0, p.g_b, p.g_a, 0.0], dtype=complex) / p.g
    vac = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    return diag[0, 0] * np.outer(vac, vac) + diag[1, 1] * np.outer(phi, phi.conj())


def ground_probability(p: ModelParams, t: float, delta_mix: float = 0.0) -> float:
    _check_mix(delta_mix)
    co, _ = _envelope(p, t)
    om2 = p.big_omega**2
    return delta_mix + (1.0 - delta_mix) * 2.0 * p.g**2 / om2 * (1.0 - co)


def ground_probability_resonant(p: ModelParams, t: float) -> float:
    """1/2 [1 - cos(2gt) exp(-2 gamma g^2 t)], valid for zero detuning."""
    g = p.g
    return 0.5 * (1.0 - math.cos(2.0 * g * t) * math.exp(-2.0 * p.gamma * g * g * t))


def concurrence_ab_closed(p: ModelParams, t: float, delta_mix: float = 0.0) -> float:
    """Atom versus both modes."""
    _check_mix(delta_mix)
    om = p.big_omega
    co, si = _envelope(p, t)
    d = p.delta
    inner = (d * d) / (om * om) * (1.0 - co) ** 2 + si * si
    return (1.0 - delta_mix) * 2.0 * p.g / om * math.sqrt(inner)


def concurrence_ab_resonant(p: ModelParams, t: float) -> float:
    g = p.g
    return abs(math.sin(2.0 * g * t)) * math.exp(-2.0 * g * g * p.gamma * t)


def concurrence_b_closed(p: ModelParams, t: float, delta_mix: float = 0.0) -> float:
    """Mode a versus mode b."""
    _check_mix(delta_mix)
    co, _ = _envelope(p, t)
    return (1.0 - delta_mix) * 4.0 * abs(p.g_a * p.g_b) / p.big_omega**2 * (1.0 - co)


def stationary_values(p: ModelParams, delta_mix: float = 0.0):
    """Return ``(C_AB, C_B, P_g)`` in the long-time limit."""
    if p.gamma <= 0:
        raise NoStationaryStateError("no stationary state without decoherence (gamma = 0)")
    _check_mix(delta_mix)
    om2 = p.big_omega**2
    scale = 1.0 - delta_mix
    c_ab = scale * 2.0 * p.g * abs(p.delta) / om2
    c_b = scale * 4.0 * abs(p.g_a * p.g_b) / om2
    p_g = delta_mix + scale * 2.0 * p.g**2 / om2
    return c_ab, c_b, p_g


def steady_time(p: ModelParams) -> float:
    """Time at which the transient envelope has dropped below e^-10."""
    if p.gamma <= 0:
        raise NoStationaryStateError("no stationary state without decoherence (gamma = 0)")
    return max(200.0, 20.0 / (p.gamma * p.big_omega**2))
