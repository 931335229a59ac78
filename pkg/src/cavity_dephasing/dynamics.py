"""Propagation under the phase-decoherence master equation

    d rho/dt = -i [H, rho] - (gamma/2) [H, [H, rho]]

by a fixed-step RK4 integrator and by exact dephasing in the eigenbasis of
H, together with the ``M^k`` operators of the series solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import apply_function, check_hermitian, dag, hermitian_eig
from .model import (
    FockAtomBasis,
    ModelParams,
    build_constants_of_motion,
    interaction_hamiltonian,
    sigma_z,
)

DEFAULT_DT = 1e-4
TRACE_DRIFT_LIMIT = 1e-6
SERIES_TERMS = 30
SERIES_TAIL_LIMIT = 1e-12
MAX_K = SERIES_TERMS


class IntegrationError(RuntimeError):
    pass


class SeriesTruncationError(ValueError):
    pass


@dataclass
class Trajectory:
    """Time samples of density matrices (``states``) or of a scalar."""

    times: np.ndarray
    states: list
    method: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times, self.states))

    def check(self, tol: float = 1e-8) -> None:
        """Verify unit trace and positivity of every stored density matrix."""
        for t, rho in self:
            if np.ndim(rho) != 2:
                continue
            tr = np.trace(rho).real
            if abs(tr - 1.0) > tol:
                raise ValueError(f"trace {tr:.12g} at t={t:g}")
            lowest = hermitian_eig(0.5 * (rho + dag(rho)))[0][0]
            if lowest < -tol:
                raise ValueError(f"negative eigenvalue {lowest:.3e} at t={t:g}")


def master_rhs(h: np.ndarray, rho: np.ndarray, gamma: float) -> np.ndarray:
    """Right-hand side of the master equation."""
    hr = h @ rho
    rh = rho @ h
    comm = hr - rh
    double = h @ comm - comm @ h
    return -1j * comm - 0.5 * gamma * double


def rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def liouvillian(h: np.ndarray, gamma: float) -> np.ndarray:
    """Superoperator of the master equation acting on row-major ``rho.ravel()``.

    The right-hand side is G rho + rho G^dagger + gamma H rho H with
    G = -iH - (gamma/2) H^2.
    """
    n = h.shape[0]
    eye = np.eye(n)
    g = -1j * h - 0.5 * gamma * (h @ h)
    return np.kron(g, eye) + np.kron(eye, g.conj()) + gamma * np.kron(h, h.T)


def rk4_step_matrix(sup: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for the linear system y' = sup @ y.

    For a linear right-hand side the four stages collapse to
    I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24, identical to ``rk4_step``.
    """
    hl = h * sup
    eye = np.eye(sup.shape[0])
    return eye + hl @ (eye + hl @ (eye / 2 + hl @ (eye / 6 + hl / 24)))


def integrate_master_equation(h, rho0, gamma, t_grid, dt=DEFAULT_DT) -> Trajectory:
    """Classical RK4 integration sampled on ``t_grid`` (which starts at 0).

    The step between consecutive grid points is ``dt`` shrunk so that an
    integer number of steps lands exactly on the next grid point. The state
    is re-symmetrized after each step.
    """
    h = np.asarray(h, dtype=complex)
    check_hermitian(h)
    if dt <= 0:
        raise ValueError("dt must be positive")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must start at 0 and increase strictly")

    n = h.shape[0]
    sup = liouvillian(h, gamma)
    steppers = {}

    rho = np.array(rho0, dtype=complex)
    trace0 = np.trace(rho).real
    states = [rho.copy()]
    for t_prev, t_next in zip(t_grid[:-1], t_grid[1:]):
        n_steps = max(1, int(round((t_next - t_prev) / dt)))
        step = (t_next - t_prev) / n_steps
        if step not in steppers:
            steppers[step] = rk4_step_matrix(sup, step)
        stepper = steppers[step]
        for _ in range(n_steps):
            rho = (stepper @ rho.ravel()).reshape(n, n)
            rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - trace0)
        if not np.isfinite(drift) or drift > TRACE_DRIFT_LIMIT:
            raise IntegrationError(
                f"trace drift {drift:.3e} at t={t_next:g}; reduce the step dt={dt:g}"
            )
        states.append(rho.copy())
    return Trajectory(t_grid, states, method="rk4", meta={"dt": dt, "gamma": gamma})


class SpectralPropagator:
    """Exact dephasing propagator for a fixed Hamiltonian.

    In the eigenbasis of H each coherence picks up
    ``exp(-i w t - gamma t w^2 / 2)`` with ``w = E_m - E_n``.
    """

    def __init__(self, h, degeneracy_tol: float = 1e-12):
        self.h = np.asarray(h, dtype=complex)
        self.energies, self.vectors = hermitian_eig(self.h)
        w = self.energies[:, None] - self.energies[None, :]
        scale = max(1.0, float(np.max(np.abs(self.energies))))
        w[np.abs(w) <= degeneracy_tol * scale] = 0.0
        self.gaps = w

    def to_eigenbasis(self, rho):
        return dag(self.vectors) @ rho @ self.vectors

    def from_eigenbasis(self, rho):
        return self.vectors @ rho @ dag(self.vectors)

    def propagate(self, rho0, gamma: float, t: float) -> np.ndarray:
        rho0 = np.asarray(rho0, dtype=complex)
        if t == 0:
            return rho0.copy()
        w = self.gaps
        factor = np.exp(-1j * w * t - 0.5 * gamma * t * w**2)
        return self.from_eigenbasis(factor * self.to_eigenbasis(rho0))

    def trajectory(self, rho0, gamma: float, t_grid) -> Trajectory:
        states = [self.propagate(rho0, gamma, t) for t in t_grid]
        return Trajectory(t_grid, states, method="spectral", meta={"gamma": gamma})


def spectral_propagate(h, rho0, gamma: float, t: float) -> np.ndarray:
    return SpectralPropagator(h).propagate(rho0, gamma, t)


def _check_k(k: int) -> None:
    if not 0 <= k <= MAX_K:
        raise ValueError(f"k must lie in 0..{MAX_K}, got {k}")


def m_operator_spectral(h, k: int, t: float, gamma: float) -> np.ndarray:
    """H^k exp(-iHt) exp(-gamma t H^2 / 2) through the eigenbasis of H."""
    _check_k(k)
    return apply_function(
        h, lambda e: e**k * np.exp(-1j * e * t) * np.exp(-0.5 * gamma * t * e**2)
    )


def _sector_function(k1, basis: FockAtomBasis, func) -> np.ndarray:
    """Matrix function ``func(N, K1)`` of the commuting pair (N, K1).

    K1 is block diagonal in the excitation sectors, so it is diagonalized
    sector by sector with N fixed on each block.
    """
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for n, sl in basis.sectors().items():
        evals, vecs = hermitian_eig(k1[sl, sl])
        out[sl, sl] = (vecs * func(n, evals)) @ dag(vecs)
    return out


def m_operator_algebraic(p: ModelParams, basis: FockAtomBasis, k: int, t: float, gamma: float):
    """``M^k`` assembled from functions of the constants of motion.

    With f_pm = omega (K1 + K2 - 1/2) +- Omega(K1)/2 and
    Omega(K1) = sqrt(delta^2 + 4 g^2 K1),

        M^k = (F_+ + F_-)/2 + X (F_+ - F_-)/2,
        F_pm = f_pm^k exp(-i f_pm t) exp(-gamma t f_pm^2 / 2),
        X = (delta sigma_z + 2 H_int) / Omega(K1).

    ``1/Omega(K1)`` is a pseudo-inverse where Omega vanishes (delta = 0 on
    ker K1), in which case F_+ = F_- there anyway.
    """
    _check_k(k)
    k1, _ = build_constants_of_motion(p, basis)
    delta, g2 = p.delta, p.g_a**2 + p.g_b**2

    def rabi(kappa):
        # K1 has integer spectrum; snapping keeps sqrt from amplifying
        # round-off on ker K1 (sqrt(1e-17) ~ 3e-9) when delta = 0.
        snapped = np.rint(kappa)
        kappa = np.where(np.abs(kappa - snapped) <= 1e-8, snapped, kappa)
        return np.sqrt(delta**2 + 4.0 * g2 * np.clip(kappa, 0.0, None))

    def branch(sign):
        def func(n, kappa):
            f = p.omega * (n - 0.5) + sign * 0.5 * rabi(kappa)
            return f**k * np.exp(-1j * f * t) * np.exp(-0.5 * gamma * t * f**2)
        return func

    def inv_rabi(n, kappa):
        r = rabi(kappa)
        out = np.zeros_like(r)
        nz = r > 1e-12
        out[nz] = 1.0 / r[nz]
        return out

    f_plus = _sector_function(k1, basis, branch(+1.0))
    f_minus = _sector_function(k1, basis, branch(-1.0))
    x = (delta * sigma_z(basis) + 2.0 * interaction_hamiltonian(p, basis)) @ _sector_function(
        k1, basis, inv_rabi
    )
    return 0.5 * (f_plus + f_minus) + 0.5 * x @ (f_plus - f_minus)


def series_tail_bound(h, gamma: float, t: float, n_terms: int = SERIES_TERMS) -> float:
    """Upper bound on the weight dropped after ``n_terms`` series terms.

    Each term carries Poisson weight x^k e^{-x} / k! with x = gamma t E^2;
    the tail beyond ``K`` is bounded by x^(K+1) / (K+1)! at the largest |E|.
    """
    e_max = float(np.max(np.abs(hermitian_eig(h)[0])))
    x = gamma * t * e_max**2
    if x == 0.0:
        return 0.0
    return math.exp((n_terms + 1) * math.log(x) - math.lgamma(n_terms + 2))


def series_propagate(h, rho0, gamma: float, t: float, n_terms: int = SERIES_TERMS):
    """Truncated sum over k of (gamma t)^k / k! M^k rho0 M^k^dagger.

    Refuses when the a-priori tail bound exceeds 1e-12.
    """
    bound = series_tail_bound(h, gamma, t, n_terms)
    if bound > SERIES_TAIL_LIMIT:
        raise SeriesTruncationError(
            f"series tail bound {bound:.3e} exceeds {SERIES_TAIL_LIMIT:.0e}; "
            "reduce gamma * t * ||H||^2"
        )
    rho0 = np.asarray(rho0, dtype=complex)
    out = np.zeros_like(rho0)
    for k in range(n_terms + 1):
        m = m_operator_spectral(h, k, t, gamma)
        out += (gamma * t) ** k / math.factorial(k) * (m @ rho0 @ dag(m))
    return out
