"""Dense complex matrix kernel.

Hermitian eigensolver (cyclic complex Jacobi), PSD square root, Kronecker
product and partial trace. Matrices are plain ``numpy`` complex arrays.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
OFF_DIAGONAL_TOL = 1e-14
MAX_SWEEPS = 100
PSD_CLAMP = 1e-10


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class NotPSDError(ValueError):
    def __init__(self, message, eigenvalue):
        super().__init__(message)
        self.eigenvalue = eigenvalue


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def hermiticity_violation(m: np.ndarray):
    """Return ``(value, (i, j))`` for the worst entry of ``m - m^dagger``."""
    diff = np.abs(m - dag(m))
    idx = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[idx]), (int(idx[0]), int(idx[1]))


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
    worst, (i, j) = hermiticity_violation(m)
    if worst > tol:
        raise NotHermitianError(
            f"matrix is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {worst:.3e} > {tol:.1e}"
        )


def _off_norm(a) -> float:
    n = len(a)
    total = 0.0
    for i in range(n):
        row = a[i]
        for j in range(i + 1, n):
            z = row[j]
            total += z.real * z.real + z.imag * z.imag
    return math.sqrt(2.0 * total)


def hermitian_eig(m, tol: float = OFF_DIAGONAL_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Hermitian matrix (checked to within 1e-12).
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm, relative
        to ``max(1, ||m||_F)``.
    max_sweeps : int
        Sweep cap; exceeding it raises :class:`ConvergenceError`.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : ndarray, unitary; column ``k`` belongs to ``eigenvalues[k]``
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    arr = np.array(m, dtype=complex)
    check_hermitian(arr)
    arr = 0.5 * (arr + dag(arr))
    n = arr.shape[0]
    threshold = tol * max(1.0, float(np.linalg.norm(arr)))
    # Small dimensions: scalar complex arithmetic on nested lists is much
    # cheaper than numpy calls per rotation.
    a = arr.tolist()
    v = np.eye(n, dtype=complex).tolist()

    off = _off_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge after {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e})",
                off,
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p][q]
                mod = abs(b)
                if mod == 0.0:
                    continue
                phase_c = (b / mod).conjugate()
                app = a[p][p].real
                aqq = a[q][q].real
                theta = (aqq - app) / (2.0 * mod)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                sc = s * phase_c
                cc = c * phase_c
                # A <- U^dagger A U, U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]];
                # columns are rotated and mirrored into rows (A stays Hermitian).
                for k in range(n):
                    if k == p or k == q:
                        continue
                    row = a[k]
                    akp = row[p]
                    akq = row[q]
                    new_p = c * akp - sc * akq
                    new_q = s * akp + cc * akq
                    row[p] = new_p
                    row[q] = new_q
                    a[p][k] = new_p.conjugate()
                    a[q][k] = new_q.conjugate()
                a[p][p] = complex(app - t * mod)
                a[q][q] = complex(aqq + t * mod)
                a[p][q] = 0j
                a[q][p] = 0j
                for row in v:
                    vkp = row[p]
                    vkq = row[q]
                    row[p] = c * vkp - sc * vkq
                    row[q] = s * vkp + cc * vkq
        sweeps += 1
        off = _off_norm(a)

    evals = np.array([a[i][i].real for i in range(n)])
    vecs = np.array(v, dtype=complex).reshape(n, n)
    order = np.argsort(evals, kind="stable")
    return evals[order], vecs[:, order]


def apply_function(m, func) -> np.ndarray:
    """Matrix function ``func(m)`` of a Hermitian matrix via its eigenbasis."""
    evals, vecs = hermitian_eig(m)
    return (vecs * func(evals)) @ dag(vecs)


def psd_sqrt(m) -> np.ndarray:
    """Square root of a positive-semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as round-off and clamped to
    zero; anything more negative raises :class:`NotPSDError`.
    """
    evals, vecs = hermitian_eig(m)
    if evals[0] < -PSD_CLAMP:
        raise NotPSDError(
            f"matrix is not positive semidefinite: eigenvalue {evals[0]:.3e}", evals[0]
        )
    roots = np.sqrt(np.clip(evals, 0.0, None))
    return (vecs * roots) @ dag(vecs)


def pinv_sqrt(m, cutoff: float = 1e-12) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of ``sqrt(m)`` for PSD ``m``."""
    evals, vecs = hermitian_eig(m)
    inv = np.zeros_like(evals)
    keep = evals > cutoff
    inv[keep] = 1.0 / np.sqrt(evals[keep])
    return (vecs * inv) @ dag(vecs)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced matrix on the subsystems listed in ``keep``.

    ``dims`` gives the subsystem dimensions in tensor order; the kept
    subsystems appear in the result in ascending index order.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive: {dims}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(
            f"dimension mismatch: dims {dims} give {total}, matrix is {rho.shape}"
        )
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep must be a non-empty subset of 0..{len(dims) - 1}")

    n = len(dims)
    t = rho.reshape(dims + dims)
    for idx in reversed(range(n)):
        if idx in keep:
            continue
        current = t.ndim // 2
        t = np.trace(t, axis1=idx, axis2=idx + current)
    kept = int(np.prod([dims[k] for k in keep]))
    return t.reshape(kept, kept)
