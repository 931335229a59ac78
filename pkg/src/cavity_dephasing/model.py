"""Two-level atom coupled to two degenerate cavity modes.

Operators live on a basis truncated by total excitation number
``N = n_a + n_b + [atom = e] <= n_max``. Every operator built here conserves
``N``, so it is constructed on a per-mode product space with photon cutoff
``n_max`` and then compressed onto the truncated basis; that compression is
exact for ``N``-conserving operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import check_hermitian, dag, hermitian_eig, kron, pinv_sqrt, psd_sqrt

GROUND, EXCITED = 0, 1
ATOM_LABELS = {GROUND: "g", EXCITED: "e"}


@dataclass(frozen=True)
class ModelParams:
    """Physical constants; frequencies and couplings in rad/time.

    Only the degenerate case ``omega_a == omega_b`` is supported.
    """

    omega_a: float = 1.0
    omega_b: float = 1.0
    omega0: float = 1.0
    g_a: float = 1.0
    g_b: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.omega_a != self.omega_b:
            raise ValueError(
                f"cavity modes must be degenerate: omega_a={self.omega_a} != omega_b={self.omega_b}"
            )
        if self.g_a**2 + self.g_b**2 <= 0:
            raise ValueError("at least one coupling must be non-zero")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    @classmethod
    def from_detuning(cls, g_a=1.0, g_b=1.0, delta=0.0, gamma=0.0, omega=1.0):
        return cls(omega_a=omega, omega_b=omega, omega0=omega + delta, g_a=g_a, g_b=g_b, gamma=gamma)

    @property
    def omega(self) -> float:
        return self.omega_a

    @property
    def g(self) -> float:
        return math.sqrt(self.g_a**2 + self.g_b**2)

    @property
    def delta(self) -> float:
        return self.omega0 - self.omega_a

    @property
    def big_omega(self) -> float:
        """Generalized Rabi frequency sqrt(delta^2 + 4 g^2)."""
        return math.sqrt(self.delta**2 + 4.0 * (self.g_a**2 + self.g_b**2))

    def replace(self, **changes) -> "ModelParams":
        values = dict(
            omega_a=self.omega_a, omega_b=self.omega_b, omega0=self.omega0,
            g_a=self.g_a, g_b=self.g_b, gamma=self.gamma,
        )
        values.update(changes)
        return ModelParams(**values)


@dataclass(frozen=True)
class FockAtomBasis:
    """States ``(n_a, n_b, atom)`` with total excitation at most ``n_max``.

    Ordered by total excitation, then ``n_a`` descending, then ``g`` before
    ``e``. ``atom`` is ``GROUND`` (0) or ``EXCITED`` (1).
    """

    n_max: int = 2
    states: tuple = field(init=False)

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        states = []
        for n in range(self.n_max + 1):
            for n_a in range(n, -1, -1):
                for atom in (GROUND, EXCITED):
                    n_b = n - n_a - atom
                    if n_b >= 0:
                        states.append((n_a, n_b, atom))
        object.__setattr__(self, "states", tuple(states))

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, n_a: int, n_b: int, atom) -> int:
        if isinstance(atom, str):
            atom = EXCITED if atom == "e" else GROUND
        return self.states.index((n_a, n_b, atom))

    def label(self, i: int) -> str:
        n_a, n_b, atom = self.states[i]
        return f"|{n_a}{n_b},{ATOM_LABELS[atom]}>"

    def ket(self, n_a: int, n_b: int, atom) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(n_a, n_b, atom)] = 1.0
        return v

    @cached_property
    def excitations(self) -> np.ndarray:
        return np.array([n_a + n_b + atom for n_a, n_b, atom in self.states])

    def sectors(self):
        """``{N: slice}`` of the contiguous index range of each excitation sector."""
        out = {}
        for n in range(self.n_max + 1):
            idx = np.flatnonzero(self.excitations == n)
            out[n] = slice(int(idx[0]), int(idx[-1]) + 1)
        return out

    # Product space: photon cutoff n_max per mode, atom last; index
    # n_a * (n_max+1) * 2 + n_b * 2 + atom.
    @property
    def product_dims(self):
        return [self.n_max + 1, self.n_max + 1, 2]

    @cached_property
    def embedding(self) -> np.ndarray:
        """Isometry from the truncated basis into the product space."""
        d = self.n_max + 1
        emb = np.zeros((d * d * 2, self.dim), dtype=complex)
        for i, (n_a, n_b, atom) in enumerate(self.states):
            emb[(n_a * d + n_b) * 2 + atom, i] = 1.0
        return emb

    def to_product(self, op: np.ndarray) -> np.ndarray:
        return self.embedding @ op @ dag(self.embedding)

    def from_product(self, op: np.ndarray) -> np.ndarray:
        return dag(self.embedding) @ op @ self.embedding


def _destroy(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex)


@dataclass(frozen=True)
class _ProductOps:
    a: np.ndarray
    b: np.ndarray
    sigma_plus: np.ndarray  # |e><g|
    proj_e: np.ndarray
    proj_g: np.ndarray


def _product_ops(basis: FockAtomBasis) -> _ProductOps:
    d = basis.n_max + 1
    eye_f = np.eye(d)
    eye_a = np.eye(2)
    sp = np.zeros((2, 2))
    sp[EXCITED, GROUND] = 1.0
    pe = np.diag([0.0, 1.0])
    pg = np.diag([1.0, 0.0])
    field_eye = kron(eye_f, eye_f)
    return _ProductOps(
        a=kron(kron(_destroy(d), eye_f), eye_a),
        b=kron(kron(eye_f, _destroy(d)), eye_a),
        sigma_plus=kron(field_eye, sp),
        proj_e=kron(field_eye, pe),
        proj_g=kron(field_eye, pg),
    )


def number_operator(basis: FockAtomBasis) -> np.ndarray:
    """Total excitation number N, diagonal in the truncated basis."""
    return np.diag(basis.excitations.astype(complex))


def sigma_z(basis: FockAtomBasis) -> np.ndarray:
    ops = _product_ops(basis)
    return basis.from_product(ops.proj_e - ops.proj_g)


def atom_projector(basis: FockAtomBasis, atom) -> np.ndarray:
    if isinstance(atom, str):
        atom = EXCITED if atom == "e" else GROUND
    return np.diag([1.0 + 0j if s[2] == atom else 0.0 for s in basis.states])


def interaction_hamiltonian(p: ModelParams, basis: FockAtomBasis) -> np.ndarray:
    """g_a (a s+ + a^dag s-) + g_b (b s+ + b^dag s-)."""
    ops = _product_ops(basis)
    sm = dag(ops.sigma_plus)
    h = p.g_a * (ops.a @ ops.sigma_plus + dag(ops.a) @ sm)
    h = h + p.g_b * (ops.b @ ops.sigma_plus + dag(ops.b) @ sm)
    return basis.from_product(h)


def build_hamiltonian(p: ModelParams, basis: FockAtomBasis) -> np.ndarray:
    ops = _product_ops(basis)
    h = p.omega_a * dag(ops.a) @ ops.a + p.omega_b * dag(ops.b) @ ops.b
    h = h + 0.5 * p.omega0 * (ops.proj_e - ops.proj_g)
    return basis.from_product(h) + interaction_hamiltonian(p, basis)


def bright_mode(p: ModelParams, basis: FockAtomBasis) -> np.ndarray:
    """Annihilator (g_a a + g_b b)/g on the product space."""
    ops = _product_ops(basis)
    return (p.g_a * ops.a + p.g_b * ops.b) / p.g


def build_constants_of_motion(p: ModelParams, basis: FockAtomBasis):
    """Return ``(K1, K2)``: bright-mode plus atomic excitation, dark-mode excitation."""
    ops = _product_ops(basis)
    g2 = p.g_a**2 + p.g_b**2
    na = dag(ops.a) @ ops.a
    nb = dag(ops.b) @ ops.b
    hop = dag(ops.a) @ ops.b + ops.a @ dag(ops.b)
    eye = np.eye(na.shape[0])
    k1 = (p.g_a**2 * na + p.g_b**2 * nb) / g2 + (p.g_a * p.g_b / g2) * hop
    k1 = k1 + 0.5 * (eye + ops.proj_e - ops.proj_g)
    k2 = (p.g_a**2 * nb + p.g_b**2 * na) / g2 - (p.g_a * p.g_b / g2) * hop
    return basis.from_product(k1), basis.from_product(k2)


def build_su2_generators(p: ModelParams, basis: FockAtomBasis):
    """Return ``(S_plus, S_minus, S_0)``.

    ``1/sqrt(K1)`` is the pseudo-inverse of ``sqrt(K1)``, so ``S_plus`` and
    ``S_minus`` vanish on the kernel of ``K1``.
    """
    ops = _product_ops(basis)
    k1, _ = build_constants_of_motion(p, basis)
    inv_root = pinv_sqrt(k1)
    raise_op = basis.from_product(bright_mode(p, basis) @ ops.sigma_plus)
    s_plus = raise_op @ inv_root
    s_minus = dag(s_plus)
    s_0 = 0.5 * sigma_z(basis)
    return s_plus, s_minus, s_0


def kernel_complement_projector(k1: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    """Projector onto the orthogonal complement of ker K1."""
    evals, vecs = hermitian_eig(k1)
    keep = vecs[:, evals > cutoff]
    return keep @ dag(keep)


def algebraic_hamiltonian(p: ModelParams, basis: FockAtomBasis) -> np.ndarray:
    """omega (K1 + K2 - 1/2) + delta S_0 + g sqrt(K1) (S_plus + S_minus)."""
    k1, k2 = build_constants_of_motion(p, basis)
    s_plus, s_minus, s_0 = build_su2_generators(p, basis)
    eye = np.eye(basis.dim)
    return (
        p.omega * (k1 + k2 - 0.5 * eye)
        + p.delta * s_0
        + p.g * psd_sqrt(k1) @ (s_plus + s_minus)
    )


def initial_state(kind: str, basis: FockAtomBasis, delta_mix: float = 0.0) -> np.ndarray:
    """Cavity vacuum with the atom excited or in a diagonal mixture.

    ``kind`` is ``"excited_vacuum"`` or ``"thermal_vacuum"``; the latter
    puts weight ``delta_mix`` on ``|g>`` and ``1 - delta_mix`` on ``|e>``.
    """
    if kind == "excited_vacuum":
        delta_mix = 0.0
    elif kind != "thermal_vacuum":
        raise ValueError(f"unknown initial state kind {kind!r}")
    if not 0.0 <= delta_mix <= 1.0:
        raise ValueError(f"delta_mix must lie in [0, 1], got {delta_mix}")
    rho = np.zeros((basis.dim, basis.dim), dtype=complex)
    rho[basis.index(0, 0, GROUND), basis.index(0, 0, GROUND)] = delta_mix
    rho[basis.index(0, 0, EXCITED), basis.index(0, 0, EXCITED)] = 1.0 - delta_mix
    return rho


class InvalidStateError(ValueError):
    pass


def validate_density_matrix(rho: np.ndarray, tol: float = 1e-8) -> None:
    """Raise :class:`InvalidStateError` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho)
    try:
        check_hermitian(rho, tol)
    except ValueError as exc:
        raise InvalidStateError(str(exc)) from exc
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise InvalidStateError(f"trace {tr:.12g} differs from 1 by more than {tol:.1e}")
    lowest = hermitian_eig(0.5 * (rho + dag(rho)))[0][0]
    if lowest < -tol:
        raise InvalidStateError(f"negative eigenvalue {lowest:.3e}")
