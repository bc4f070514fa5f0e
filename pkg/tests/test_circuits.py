"""Circuit composition and the two-qubit Grover search."""

import numpy as np
import pytest

from spinpair.circuits import (Circuit, MissingPulseError, grover_circuit,
                               oracle_gate, run_circuit, success_rate)
from spinpair.grape import standard_gate
from spinpair.ion import YB171, change_basis, eigensystem
from spinpair.linalg import DensityMatrix, StateVector
from spinpair.tomography import noise_model_triggered


def test_empty_circuit_is_identity():
    rho = run_circuit(Circuit(ops=[]))
    want = np.zeros((4, 4))
    want[0, 0] = 1.0
    assert np.allclose(rho.entries, want, atol=1e-12)
    assert rho.basis == "spin"


def test_double_hadamard_restores_input():
    h1 = standard_gate("hadamard1")
    psi0 = StateVector(np.array([0, 0, 1, 0], dtype=complex), basis="spin")
    rho = run_circuit(Circuit(ops=[h1, h1], initial_state=psi0))
    assert rho.entries[2, 2].real == pytest.approx(1.0, abs=1e-12)


def test_oracle_gate_matrices():
    assert np.allclose(oracle_gate(2).matrix, standard_gate("cphase").matrix)
    for marked in (1, 2, 3, 4):
        d = np.diag(oracle_gate(marked).matrix)
        assert d[marked - 1] == -1
        assert np.sum(d) == 2
    with pytest.raises(ValueError):
        oracle_gate(0)


def test_ideal_grover_is_exact_for_all_marked_states():
    for marked in (1, 2, 3, 4):
        final = run_circuit(grover_circuit(marked), mode="ideal")
        assert success_rate(final, marked) == pytest.approx(1.0, abs=1e-9)


def test_success_rate_trivials():
    mixed = DensityMatrix(np.eye(4, dtype=complex) / 4, basis="spin")
    for marked in (1, 2, 3, 4):
        assert success_rate(mixed, marked) == pytest.approx(0.25, abs=1e-12)
    number = DensityMatrix(np.eye(4, dtype=complex) / 4, basis="number")
    with pytest.raises(ValueError):
        success_rate(number, 1)
    with pytest.raises(ValueError):
        success_rate(mixed, 5)


def test_mode_validation():
    c = grover_circuit(1)
    with pytest.raises(ValueError):
        run_circuit(c, mode="approximate")
    with pytest.raises(MissingPulseError):
        run_circuit(c, mode="pulsed", pulses={})
    with pytest.raises(ValueError):
        run_circuit(c, mode="pulsed+noise", pulses={})


def test_initial_state_must_be_spin_basis():
    psi = StateVector(np.array([1, 0, 0, 0], dtype=complex), basis="number")
    with pytest.raises(ValueError):
        Circuit(ops=[], initial_state=psi)
    with pytest.raises(TypeError):
        Circuit(ops=[np.eye(4)])


def test_pulsed_matches_ideal_through_change_basis(all_gate_pulses):
    # a single pulsed Hadamard, mapped to the number basis by hand, must
    # agree with the spin-basis output of run_circuit
    h1 = standard_gate("hadamard1")
    c = Circuit(ops=[h1])
    pulses = {k: v.sequence for k, v in all_gate_pulses.items()}
    rho_spin = run_circuit(c, mode="pulsed", pulses=pulses)
    r = eigensystem(YB171).eigenvectors
    rho_number = change_basis(rho_spin, r, "spin_to_number")
    back = change_basis(rho_number, r, "number_to_spin")
    assert np.allclose(back.entries, rho_spin.entries, atol=1e-12)
    ideal = run_circuit(c, mode="ideal")
    assert np.allclose(rho_spin.entries, ideal.entries, atol=5e-2)


def test_pulsed_grover_beats_99_percent(all_gate_pulses):
    pulses = {k: v.sequence for k, v in all_gate_pulses.items()}
    # oracle2 is exactly the controlled-phase gate, so the marked = 2
    # search can reuse the cphase pulse verbatim
    pulses["oracle2"] = pulses["cphase"]
    final = run_circuit(grover_circuit(2), mode="pulsed", pulses=pulses)
    assert success_rate(final, 2) >= 0.99


def test_pulsed_noise_mode_runs(all_gate_pulses):
    pulses = {k: v.sequence for k, v in all_gate_pulses.items()}
    pulses["oracle2"] = pulses["cphase"]
    noise = noise_model_triggered(n_samples=8, rng_seed=3)
    final = run_circuit(grover_circuit(2), mode="pulsed+noise",
                        pulses=pulses, noise=noise)
    assert final.basis == "spin"
    assert np.trace(final.entries).real == pytest.approx(1.0, abs=1e-9)
    assert success_rate(final, 2) >= 0.95
