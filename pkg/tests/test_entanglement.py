import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavity_dephasing import closedform as cf
from cavity_dephasing.dynamics import SpectralPropagator
from cavity_dephasing.entanglement import (
    StateValidationError,
    SubspaceLeakError,
    TwoQubitState,
    concurrence,
    concurrence_pure,
    extract_mode_qubits,
    extract_two_qubit_AB,
    field_state,
    mode_atom_state,
    pairwise_concurrences,
    spin_flip,
    wootters_lambdas,
)
from cavity_dephasing.linalg import dag
from cavity_dephasing.model import GROUND, FockAtomBasis, ModelParams, build_hamiltonian, initial_state

B2 = FockAtomBasis(2)

# p |Phi+><Phi+| + (1 - p) I/4, from the characteristic polynomial of
# R = rho (sy x sy) rho* (sy x sy) (Faddeev-LeVerrier coefficients, roots).
WERNER = {0.5: 0.25, 0.6: 0.4, 0.9: 0.85}

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def werner(p):
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return p * np.outer(phi, phi) + (1 - p) * np.eye(4) / 4


def faddeev_leverrier_concurrence(rho):
    r = rho @ SIGMA_YY @ rho.conj() @ SIGMA_YY
    coeffs, m = [1.0 + 0j], np.zeros_like(r)
    for k in range(1, 5):
        m = r @ m + coeffs[-1] * np.eye(4)
        coeffs.append(-np.trace(r @ m) / k)
    lam = np.sqrt(np.sort(np.abs(np.roots(coeffs).real))[::-1])
    return max(0.0, lam[0] - lam[1:].sum())


def random_unitary(rng, n=2):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, rank=4):
    x = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = x @ dag(x)
    return rho / np.trace(rho)


@pytest.mark.parametrize("p", sorted(WERNER))
def test_werner_against_char_poly_oracle(p):
    # the oracle meets repeated roots, so it is only good to ~1e-7
    assert faddeev_leverrier_concurrence(werner(p)) == pytest.approx(WERNER[p], abs=1e-6)
    assert concurrence(werner(p)) == pytest.approx(WERNER[p], abs=1e-12)


def test_bell_and_product():
    psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
    assert concurrence(np.outer(psi, psi)) == pytest.approx(1.0, abs=1e-12)
    a, b = np.array([0.6, 0.8j]), np.array([1, 1]) / np.sqrt(2)
    prod = np.kron(a, b)
    assert concurrence(np.outer(prod, prod.conj())) == pytest.approx(0.0, abs=1e-12)
    assert concurrence(np.eye(4) / 4) == 0.0


def test_lambdas_sorted_non_negative():
    rng = np.random.default_rng(0)
    for _ in range(20):
        lam = wootters_lambdas(random_state(rng, int(rng.integers(1, 5))))
        assert np.all(lam >= 0) and np.all(np.diff(lam) <= 0)


def test_lambdas_match_non_hermitian_route():
    rng = np.random.default_rng(1)
    for _ in range(20):
        rho = random_state(rng)
        ev = np.linalg.eigvals(rho @ spin_flip(rho))
        expected = np.sqrt(np.sort(np.abs(ev.real)))[::-1]
        np.testing.assert_allclose(wootters_lambdas(rho), expected, atol=1e-7)


def test_spin_flip_of_bell_state_is_itself():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(psi, psi)
    np.testing.assert_allclose(spin_flip(rho), rho, atol=1e-15)


@pytest.mark.parametrize("matrix, msg", [
    (np.eye(3) / 3, "4x4"),
    (np.eye(4) / 2, "trace"),
    (np.diag([1.0, 0, 0, 0]) + np.diag([0.1, 0, 0], 1), "Hermitian"),
])
def test_state_validation(matrix, msg):
    with pytest.raises(StateValidationError, match=msg):
        concurrence(matrix)


def test_negative_state_rejected():
    with pytest.raises(StateValidationError, match="negative"):
        concurrence(np.diag([1.2, -0.2, 0, 0]))


def test_two_qubit_state_defaults():
    s = TwoQubitState(np.eye(4) / 4)
    assert s.residual == 0.0 and s.labels[0] == "|00>"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_local_unitary_invariance(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, rank)
    u = np.kron(random_unitary(rng), random_unitary(rng))
    assert abs(concurrence(u @ rho @ dag(u)) - concurrence(rho)) <= 1e-10


@settings(max_examples=80, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_pure_state_formula(amps):
    psi = np.array(amps) / np.linalg.norm(amps)
    assert abs(concurrence(np.outer(psi, psi.conj())) - concurrence_pure(psi)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_concurrence_in_unit_interval(seed):
    rho = random_state(np.random.default_rng(seed), 2)
    assert 0.0 <= concurrence(rho) <= 1.0


def test_extract_ab_initial_and_labels():
    p = ModelParams(g_a=1.0, g_b=2.0)
    s = extract_two_qubit_AB(initial_state("excited_vacuum", B2), p, B2)
    np.testing.assert_array_equal(s.matrix, np.diag([1.0, 0, 0, 0]))
    assert s.labels == cf.EFFECTIVE_LABELS and s.residual == 0.0


def test_extract_ab_spectral_state():
    p = ModelParams(gamma=0.05)
    rho = SpectralPropagator(build_hamiltonian(p, B2)).propagate(initial_state("excited_vacuum", B2), p.gamma, 1.0)
    assert concurrence(extract_two_qubit_AB(rho, p, B2)) == pytest.approx(0.2522278096270181, abs=1e-8)


def test_extract_ab_residual_small_along_trajectory():
    p = ModelParams.from_detuning(g_a=0.7, g_b=1.3, delta=1.0, gamma=0.1)
    prop = SpectralPropagator(build_hamiltonian(p, B2))
    rho0 = initial_state("excited_vacuum", B2)
    for t in np.linspace(0, 10, 21):
        assert extract_two_qubit_AB(prop.propagate(rho0, p.gamma, t), p, B2).residual <= 1e-10


def test_extract_ab_leak():
    p = ModelParams()
    rho = np.zeros((9, 9), dtype=complex)
    i = B2.index(2, 0, GROUND)
    rho[i, i] = 1.0
    with pytest.raises(SubspaceLeakError, match="leaves the effective two-qubit subspace") as info:
        extract_two_qubit_AB(rho, p, B2)
    assert info.value.residual == pytest.approx(1.0)


def test_mode_qubits_examples():
    vac = np.zeros((9, 9))
    vac[0, 0] = 1
    np.testing.assert_array_equal(extract_mode_qubits(vac).matrix, np.diag([1.0, 0, 0, 0]))
    phi = cf.phi_state(ModelParams(), B2)
    rho_f = field_state(np.outer(phi, phi.conj()), B2)
    assert concurrence(extract_mode_qubits(rho_f)) == pytest.approx(1.0, abs=1e-12)


def test_mode_qubits_eq21_value():
    p = ModelParams(gamma=0.1)
    rho = SpectralPropagator(build_hamiltonian(p, B2)).propagate(initial_state("excited_vacuum", B2), p.gamma, 1.0)
    assert concurrence(extract_mode_qubits(field_state(rho, B2))) == pytest.approx(0.818858887920901, abs=1e-8)


def test_mode_qubits_errors():
    two = np.zeros((9, 9))
    two[2, 2] = 1.0  # |02>
    with pytest.raises(SubspaceLeakError, match="photon qubits"):
        extract_mode_qubits(two)
    with pytest.raises(ValueError, match="two-mode"):
        extract_mode_qubits(np.eye(6) / 6)


def test_mode_atom_state_labels():
    rho = initial_state("excited_vacuum", B2)
    s = mode_atom_state(rho, B2, "a")
    np.testing.assert_array_equal(s.matrix, np.diag([0, 1.0, 0, 0]))
    assert s.labels[1] == "|0,e>"


def test_pairwise_examples():
    rho0 = initial_state("excited_vacuum", B2)
    p = ModelParams(gamma=0.05)
    assert pairwise_concurrences(rho0, p, B2) == (0.0, 0.0, 0.0)
    rho = SpectralPropagator(build_hamiltonian(p, B2)).propagate(rho0, p.gamma, 0.4)
    c_a, c_b, c_ab = pairwise_concurrences(rho, p, B2)
    assert c_a == pytest.approx(c_ab / np.sqrt(2), abs=1e-10)
    assert c_b == pytest.approx(c_ab / np.sqrt(2), abs=1e-10)


def test_ratio_for_unequal_couplings():
    rng = np.random.default_rng(7)
    rho0 = initial_state("excited_vacuum", B2)
    for _ in range(8):
        p = ModelParams.from_detuning(g_a=1.0, g_b=2.0, delta=rng.uniform(-5, 5), gamma=rng.uniform(0, 0.2))
        prop = SpectralPropagator(build_hamiltonian(p, B2))
        c_a, c_b, _ = pairwise_concurrences(prop.propagate(rho0, p.gamma, rng.uniform(0.1, 10)), p, B2)
        if c_b > 1e-3:
            assert c_a / c_b == pytest.approx(0.5, abs=1e-6)


def test_monogamy_random_draws():
    rng = np.random.default_rng(8)
    for _ in range(10):
        p = ModelParams.from_detuning(g_a=rng.uniform(0.1, 3), g_b=rng.uniform(0.1, 3),
                                      delta=rng.uniform(-5, 5), gamma=rng.uniform(0, 0.2))
        prop = SpectralPropagator(build_hamiltonian(p, B2))
        rho0 = initial_state("thermal_vacuum", B2, rng.uniform(0, 1))
        for t in np.linspace(0, 10, 11):
            c_a, c_b, c_ab = pairwise_concurrences(prop.propagate(rho0, p.gamma, t), p, B2)
            assert abs(c_a**2 + c_b**2 - c_ab**2) <= 1e-8
