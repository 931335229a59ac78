"""Two-qubit concurrence and the qubit pairs extracted from the model state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closedform import EFFECTIVE_LABELS, effective_basis
from .linalg import check_hermitian, dag, hermitian_eig, partial_trace
from .model import FockAtomBasis, ModelParams

SUBSPACE_TOL = 1e-8
STATE_TOL = 1e-10

SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

PHOTON_QUBIT_LABELS = ("|00>", "|01>", "|10>", "|11>")
MODE_ATOM_LABELS = ("|0,g>", "|0,e>", "|1,g>", "|1,e>")


class StateValidationError(ValueError):
    pass


class SubspaceLeakError(ValueError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class TwoQubitState:
    """4x4 density matrix in a labelled two-qubit product basis.

    ``residual`` is the population discarded when the state was cut out of a
    larger space (zero if it was given directly).
    """

    matrix: np.ndarray
    labels: tuple = ("|00>", "|01>", "|10>", "|11>")
    residual: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise StateValidationError(f"expected a 4x4 matrix, got {m.shape}")
        try:
            check_hermitian(m, STATE_TOL)
        except ValueError as exc:
            raise StateValidationError(str(exc)) from exc
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise StateValidationError(f"trace {tr:.12g} is not 1")
        object.__setattr__(self, "matrix", 0.5 * (m + dag(m)))


def spin_flip(rho: np.ndarray) -> np.ndarray:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y), conjugation in the stored basis."""
    return SIGMA_YY @ rho.conj() @ SIGMA_YY


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of rho * spin_flip(rho), descending.

    With rho = W W^dagger (W = eigenvectors scaled by sqrt of the
    populations) the lambdas are the singular values of the symmetric matrix
    tau = W^T (sigma_y x sigma_y) W, since tau tau^dagger has the spectrum of
    rho rho~. They are read off as the non-negative eigenvalues of the
    Hermitian dilation [[0, tau], [tau^dagger, 0]], which keeps small
    lambdas accurate to round-off instead of to its square root.
    """
    if isinstance(rho, TwoQubitState):
        rho = rho.matrix
    evals, vecs = hermitian_eig(rho)
    if evals[0] < -STATE_TOL:
        raise StateValidationError(f"state has negative eigenvalue {evals[0]:.3e}")
    w = vecs * np.sqrt(np.clip(evals, 0.0, None))
    tau = w.T @ SIGMA_YY @ w
    dilation = np.block([[np.zeros((4, 4)), tau], [dag(tau), np.zeros((4, 4))]])
    sigma = hermitian_eig(0.5 * (dilation + dag(dilation)))[0][4:]
    return np.clip(sigma, 0.0, None)[::-1]


def concurrence(rho) -> float:
    """Wootters concurrence max(l1 - l2 - l3 - l4, 0), clamped to [0, 1]."""
    if not isinstance(rho, TwoQubitState):
        rho = TwoQubitState(np.asarray(rho, dtype=complex))
    lam = wootters_lambdas(rho)
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def concurrence_pure(psi) -> float:
    """2|ad - bc| for amplitudes (a, b, c, d) on |00>, |01>, |10>, |11>."""
    a, b, c, d = np.asarray(psi, dtype=complex) / np.linalg.norm(psi)
    return float(2.0 * abs(a * d - b * c))


def _restrict(rho: np.ndarray, idx, labels, what: str) -> TwoQubitState:
    total = np.trace(rho).real
    sub = rho[np.ix_(idx, idx)]
    inside = np.trace(sub).real
    residual = float(total - inside)
    if residual > SUBSPACE_TOL:
        raise SubspaceLeakError(
            f"state leaves the effective two-qubit subspace ({what}): "
            f"residual population {residual:.3e}",
            residual,
        )
    return TwoQubitState(sub / inside, labels, residual)


def extract_two_qubit_AB(rho_full, p: ModelParams, basis: FockAtomBasis) -> TwoQubitState:
    """Atom versus field, in the basis |00>|e>, |00>|g>, |phi>|e>, |phi>|g>."""
    w = effective_basis(p, basis)
    rho_s = dag(w) @ rho_full @ w
    total = np.trace(rho_full).real
    inside = np.trace(rho_s).real
    residual = float(total - inside)
    if residual > SUBSPACE_TOL:
        raise SubspaceLeakError(
            f"state leaves the effective two-qubit subspace: residual population {residual:.3e}",
            residual,
        )
    return TwoQubitState(rho_s / inside, EFFECTIVE_LABELS, residual)


def field_state(rho_full, basis: FockAtomBasis) -> np.ndarray:
    """Two-mode state after tracing out the atom, on the (n_max+1)^2 product space."""
    return partial_trace(basis.to_product(rho_full), basis.product_dims, keep=[0, 1])


def extract_mode_qubits(rho_fields) -> TwoQubitState:
    """Restrict a two-mode state to photon numbers {0, 1} in each mode."""
    rho_fields = np.asarray(rho_fields, dtype=complex)
    d = int(round(np.sqrt(rho_fields.shape[0])))
    if d * d != rho_fields.shape[0] or d < 2:
        raise ValueError(f"not a two-mode state with equal cutoffs: {rho_fields.shape}")
    return _restrict(rho_fields, [0, 1, d, d + 1], PHOTON_QUBIT_LABELS, "photon qubits")


def mode_atom_state(rho_full, basis: FockAtomBasis, mode: str) -> TwoQubitState:
    """Atom together with one cavity mode, the other mode traced out."""
    keep = {"a": [0, 2], "b": [1, 2]}[mode]
    reduced = partial_trace(basis.to_product(rho_full), basis.product_dims, keep=keep)
    return _restrict(reduced, [0, 1, 2, 3], MODE_ATOM_LABELS, f"mode {mode} qubit")


def pairwise_concurrences(rho_full, p: ModelParams, basis: FockAtomBasis):
    """Return ``(C_a, C_b, C_AB)``."""
    c_a = concurrence(mode_atom_state(rho_full, basis, "a"))
    c_b = concurrence(mode_atom_state(rho_full, basis, "b"))
    c_ab = concurrence(extract_two_qubit_AB(rho_full, p, basis))
    return c_a, c_b, c_ab
