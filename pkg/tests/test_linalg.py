import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, random_state, random_unitary
from spinpair.linalg import (BasisMismatchError, ChiMatrix, DensityMatrix,
                             StateVector, expm_unitary, gate_fidelity,
                             kron, phase_min_distance, process_fidelity,
                             project_psd, state_fidelity)


def test_state_vector_normalization_enforced():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0, 0.0, 0.0]))
    s = StateVector(np.array([1, 1, 0, 0]) / np.sqrt(2))
    assert s.basis == "spin"


def test_density_matrix_invariants_enforced():
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6, 0.0, 0.0]))   # trace != 1
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1.0, 0.1], [0.0, 0.0]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5, 0.0, 0.0]))  # negative eigenvalue


def test_expm_unitary_is_unitary_and_matches_scalar_case(rng):
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + h.conj().T
    u = expm_unitary(h, 0.37)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    # diagonal generator: phases directly
    d = np.diag([1.0, -2.0, 0.5, 0.0])
    u = expm_unitary(d, 2.0)
    assert np.allclose(np.diag(u), np.exp(-1j * np.diag(d) * 2.0), atol=1e-14)


def test_expm_unitary_rejects_non_hermitian():
    with pytest.raises(ValueError):
        expm_unitary(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_gate_fidelity_bounds_and_known_values(rng):
    u = random_unitary(rng)
    assert gate_fidelity(u, u) == pytest.approx(1.0, abs=1e-12)
    # orthogonal-in-trace pair
    a = np.diag([1, 1, 1, 1]).astype(complex)
    b = np.diag([1, 1, -1, -1]).astype(complex)
    assert gate_fidelity(a, b) == pytest.approx(0.0, abs=1e-12)
    v = random_unitary(rng)
    f = gate_fidelity(u, v)
    assert 0.0 <= f <= 1.0 + 1e-12


@given(phi=st.floats(0, 2 * np.pi))
@settings(max_examples=25, deadline=None)
def test_gate_fidelity_global_phase_invariant(phi):
    rng = np.random.default_rng(7)
    u = random_unitary(rng)
    v = random_unitary(rng)
    assert gate_fidelity(u, np.exp(1j * phi) * v) == pytest.approx(
        gate_fidelity(u, v), abs=1e-10)


def test_state_fidelity_pure_states(rng):
    a = random_state(rng)
    rho = DensityMatrix(np.outer(a, a.conj()))
    assert state_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)
    b = random_state(rng)
    overlap = abs(np.vdot(a, b)) ** 2
    sigma = DensityMatrix(np.outer(b, b.conj()))
    assert state_fidelity(rho, sigma) == pytest.approx(overlap, abs=1e-7)


def test_state_fidelity_mixed_monotone(rng):
    rho = DensityMatrix(random_density(rng))
    eye = DensityMatrix(np.eye(4) / 4)
    f = state_fidelity(rho, eye)
    assert 0.0 < f <= 1.0 + 1e-9


def test_project_psd_fixes_negative_eigenvalues():
    m = np.diag([0.7, 0.5, -0.1, -0.1])
    p = project_psd(m)
    w = np.linalg.eigvalsh(p)
    assert w.min() >= -1e-14
    assert np.trace(p).real == pytest.approx(1.0, abs=1e-12)
    # already-valid input is unchanged
    good = np.diag([0.4, 0.3, 0.2, 0.1])
    assert np.allclose(project_psd(good), good, atol=1e-12)


def test_phase_min_distance_properties(rng):
    u = random_unitary(rng)
    assert phase_min_distance(u, u) == pytest.approx(0.0, abs=1e-12)
    assert phase_min_distance(u, np.exp(0.3j) * u) == pytest.approx(
        0.0, abs=1e-12)
    v = random_unitary(rng)
    d = phase_min_distance(u, v)
    assert d == pytest.approx(phase_min_distance(v, u), abs=1e-10)
    assert 0.0 <= d <= 2.0


def test_kron_matches_numpy(rng):
    a = rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4))
    assert np.allclose(kron(a, b), np.kron(a, b))


def test_process_fidelity_requires_matching_basis():
    eye = np.zeros((16, 16))
    eye[0, 0] = 1.0
    a = ChiMatrix(eye, op_basis="pauli")
    b = ChiMatrix(eye, op_basis="other")
    with pytest.raises(BasisMismatchError):
        process_fidelity(a, b)
    assert process_fidelity(a, a) == pytest.approx(1.0, abs=1e-12)
