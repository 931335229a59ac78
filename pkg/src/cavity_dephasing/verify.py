"""Cross-checks between the operator algebra, the three propagators and the
closed-form entanglement results."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closedform as cf
from .dynamics import DEFAULT_DT, SpectralPropagator, integrate_master_equation, m_operator_algebraic, m_operator_spectral
from .entanglement import concurrence, extract_mode_qubits, field_state, pairwise_concurrences
from .linalg import commutator, max_abs
from .model import (
    FockAtomBasis,
    ModelParams,
    algebraic_hamiltonian,
    build_constants_of_motion,
    build_hamiltonian,
    build_su2_generators,
    initial_state,
    kernel_complement_projector,
)


@dataclass
class Check:
    name: str
    deviation: float
    tolerance: float
    skipped: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.skipped) or self.deviation <= self.tolerance

    def line(self) -> str:
        if self.skipped:
            return f"SKIP  {self.name}: {self.skipped}"
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: max deviation {self.deviation:.3e} (tolerance {self.tolerance:.0e})"


def _embedded_closed(closed_form, p, t, delta_mix, basis):
    return cf.embed(closed_form(p, t, delta_mix), basis)


def run_verification(p: ModelParams, delta_mix: float = 0.0, t_max: float = 10.0,
                     n_points: int = 101, dt: float = DEFAULT_DT, n_max: int = 2,
                     closed_form=cf.rho_closed) -> list:
    """Run every check and return a list of :class:`Check`.

    ``closed_form`` replaces :func:`closedform.rho_closed`; used to confirm
    that a corrupted closed form is caught.
    """
    basis = FockAtomBasis(n_max)
    h = build_hamiltonian(p, basis)
    k1, k2 = build_constants_of_motion(p, basis)
    s_plus, s_minus, s_0 = build_su2_generators(p, basis)
    proj = kernel_complement_projector(k1)
    checks = []

    checks.append(Check("a: algebraic form vs direct Hamiltonian",
                        max_abs(algebraic_hamiltonian(p, basis) - h), 1e-10))
    checks.append(Check("b: [H, K1] and [H, K2] vanish",
                        max(max_abs(commutator(h, k1)), max_abs(commutator(h, k2))), 1e-12))
    su2 = max(
        max_abs(proj @ (commutator(s_0, s_plus) - s_plus) @ proj),
        max_abs(proj @ (commutator(s_0, s_minus) + s_minus) @ proj),
        max_abs(proj @ (commutator(s_plus, s_minus) - 2 * s_0) @ proj),
    )
    checks.append(Check("c: SU(2) commutators on the complement of ker K1", su2, 1e-10))

    m_dev = 0.0
    for k in range(4):
        for t in (0.0, 0.7, 2.0):
            m_dev = max(m_dev, max_abs(m_operator_algebraic(p, basis, k, t, p.gamma)
                                       - m_operator_spectral(h, k, t, p.gamma)))
    checks.append(Check("d: algebraic vs spectral M^k (k <= 3)", m_dev, 1e-9))

    times = np.linspace(0.0, t_max, n_points)
    rho0 = initial_state("thermal_vacuum", basis, delta_mix)
    prop = SpectralPropagator(h)
    spectral = [prop.propagate(rho0, p.gamma, t) for t in times]
    rk4 = integrate_master_equation(h, rho0, p.gamma, times, dt).states
    closed = [_embedded_closed(closed_form, p, t, delta_mix, basis) for t in times]
    checks.append(Check("e: closed form vs spectral propagator",
                        max(max_abs(c - s) for c, s in zip(closed, spectral)), 1e-9))
    checks.append(Check("e: RK4 vs spectral propagator",
                        max(max_abs(r - s) for r, s in zip(rk4, spectral)), 1e-6))

    ent_dev = 0.0
    mono_dev = 0.0
    ratio_dev = 0.0
    for t, rho in zip(times, spectral):
        c_a, c_b, c_ab = pairwise_concurrences(rho, p, basis)
        c_field = concurrence(extract_mode_qubits(field_state(rho, basis)))
        ent_dev = max(ent_dev,
                      abs(c_ab - cf.concurrence_ab_closed(p, t, delta_mix)),
                      abs(c_field - cf.concurrence_b_closed(p, t, delta_mix)))
        mono_dev = max(mono_dev, abs(c_a**2 + c_b**2 - c_ab**2))
        if c_b > 1e-3:
            ratio_dev = max(ratio_dev, abs(c_a / c_b - abs(p.g_a / p.g_b)))
    checks.append(Check("f: closed-form concurrences vs Wootters", ent_dev, 1e-8))
    checks.append(Check("g: C_a^2 + C_b^2 = C_AB^2", mono_dev, 1e-8))
    checks.append(Check("g: C_a / C_b = g_a / g_b", ratio_dev, 1e-6))

    name = "h: stationary limits"
    if p.gamma <= 0:
        checks.append(Check(name, 0.0, 1e-4, skipped="no stationary state for gamma = 0"))
    else:
        c_ab_inf, c_b_inf, p_g_inf = cf.stationary_values(p, delta_mix)
        t_inf = cf.steady_time(p)
        rho = prop.propagate(rho0, p.gamma, t_inf)
        _, _, c_ab = pairwise_concurrences(rho, p, basis)
        c_field = concurrence(extract_mode_qubits(field_state(rho, basis)))
        dev = max(
            abs(c_ab - c_ab_inf),
            abs(c_field - c_b_inf),
            abs(cf.concurrence_ab_closed(p, t_inf, delta_mix) - c_ab_inf),
            abs(cf.concurrence_b_closed(p, t_inf, delta_mix) - c_b_inf),
            abs(cf.ground_probability(p, t_inf, delta_mix) - p_g_inf),
        )
        checks.append(Check(name, dev, 1e-4))
    return checks


def flipped_coherence(closed_form=cf.rho_closed):
    """A closed form whose atom-field coherence has the wrong sign of i sin."""
    def wrapped(p, t, delta_mix=0.0):
        state = closed_form(p, t, delta_mix)
        m = state.matrix.copy()
        m[0, 3], m[3, 0] = m[3, 0], m[0, 3]
        return cf.EffectiveState(m, state.params, state.t)
    return wrapped
