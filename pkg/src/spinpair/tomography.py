"""Simulated measurement, state/process tomography, and the magnetic-noise model.

The only direct observable is the population of level |3> (measured in
hardware through the fluorescence complement P3 = 1 - (P1+P2+P4)).  State
tomography routes populations and coherences into the measurable level
with pi and pi/2 pulses on the (3,1), (3,2), (3,4) subspaces, then inverts
the linear map; pairs not involving |3> use a composed route (a pi pulse
into |3> followed by a pi/2 analysis pulse).

Magnetic noise is modeled as quasi-static: each experimental shot draws
a constant random shift of the |1>, |2>, |4> energies (Gaussian, std
sigma_k), matching slow drift physics and the Ramsey T2* phenomenology.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .control import PulseSequence, propagate, segment_unitaries
from .ion import IonParams, YB171, change_basis, mapping_operator, mixing_angle
from .linalg import ChiMatrix, DensityMatrix, expm_unitary, kron, project_psd

SQRT2 = np.sqrt(2.0)

# Two-qubit Pauli operator basis {I,X,Y,Z} x {I,X,Y,Z}, spin basis
_P1 = [np.eye(2, dtype=complex),
       np.array([[0, 1], [1, 0]], dtype=complex),
       np.array([[0, -1j], [1j, 0]], dtype=complex),
       np.array([[1, 0], [0, -1]], dtype=complex)]
PAULI2 = [kron(a, b) for a in _P1 for b in _P1]
PAULI2_LABELS = [a + b for a in "IXYZ" for b in "IXYZ"]


@dataclass(frozen=True)
class NoiseModel:
    """Quasi-static Gaussian shifts of the |1>, |2>, |4> levels (rad/s)."""

    sigma1: float
    sigma2: float
    sigma4: float
    n_samples: int = 200
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.sigma1, self.sigma2, self.sigma4) < 0:
            raise ValueError("sigma must be non-negative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")

    @classmethod
    def from_coherence_times(cls, t2_13: float, t2_23: float, t2_43: float,
                             n_samples: int = 200,
                             rng_seed: int = 0) -> "NoiseModel":
        return cls(sigma1=calibrate_sigma(t2_13),
                   sigma2=calibrate_sigma(t2_23),
                   sigma4=calibrate_sigma(t2_43),
                   n_samples=n_samples, rng_seed=rng_seed)


def calibrate_sigma(t2star: float) -> float:
    """sigma such that the quasi-static Ramsey envelope exp(-sigma^2 t^2/2)
    reaches 1/e at t = T2*: sigma = sqrt(2)/T2*."""
    if t2star <= 0:
        raise ValueError("T2* must be positive")
    return SQRT2 / t2star


# Ramsey coherence times from the hardware characterization, without and
# with ac-line triggering (seconds); transitions (1-3), (2-3), (4-3).
T2STAR_FREE = {"13": 500e-6, "23": 20e-3, "43": 500e-6}
T2STAR_TRIGGERED = {"13": 7e-3, "23": 20e-3, "43": 7e-3}


def noise_model_free(n_samples: int = 200, rng_seed: int = 0) -> NoiseModel:
    t = T2STAR_FREE
    return NoiseModel.from_coherence_times(t["13"], t["23"], t["43"],
                                           n_samples, rng_seed)


def noise_model_triggered(n_samples: int = 200,
                          rng_seed: int = 0) -> NoiseModel:
    t = T2STAR_TRIGGERED
    return NoiseModel.from_coherence_times(t["13"], t["23"], t["43"],
                                           n_samples, rng_seed)


def measure_p3(state: DensityMatrix, shots: int = 0, rng=None) -> float:
    """Population on |3> (number basis); shots = 0 returns the exact value."""
    if state.basis != "number":
        raise ValueError("measure_p3 expects a number-basis state")
    p3 = float(np.clip(state.entries[2, 2].real, 0.0, 1.0))
    if shots == 0:
        return p3
    if shots < 0:
        raise ValueError("shots must be >= 0")
    if rng is None:
        rng = np.random.default_rng()
    # hardware counts the bright complement P1+P2+P4
    bright = rng.binomial(shots, 1.0 - p3)
    return 1.0 - bright / shots


def _subspace_pulse(i: int, j: int, theta: float, phase: float) -> np.ndarray:
    """exp(-i theta/2 (cos(phase) X_ij + sin(phase) Y_ij)) on levels i, j."""
    h = np.zeros((4, 4), dtype=complex)
    h[i, j] = np.exp(-1j * phase)
    h = h + h.conj().T
    return expm_unitary(h, theta / 2)


def qst_settings() -> list:
    """Pre-measurement rotations for full 4-level state tomography.

    16 settings: identity, pi pulses routing each level to |3>, pi/2
    analysis pulses (phases 0 and pi/2) on the (3,k) pairs, and composed
    routes for the (1,2), (1,4), (2,4) pairs.
    """
    eye = np.eye(4, dtype=complex)
    settings = [eye]
    for k in (0, 1, 3):
        settings.append(_subspace_pulse(2, k, np.pi, 0.0))
    for k in (0, 1, 3):
        for ph in (0.0, np.pi / 2):
            settings.append(_subspace_pulse(2, k, np.pi / 2, ph))
    for (j, k) in ((0, 1), (0, 3), (1, 3)):
        for ph in (0.0, np.pi / 2):
            settings.append(_subspace_pulse(2, k, np.pi / 2, ph)
                            @ _subspace_pulse(2, j, np.pi, 0.0))
    return settings


def _hermitian_basis(d: int = 4) -> list:
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j
            e[j, i] = 1j
            basis.append(e)
    return basis


_QST_BASIS = _hermitian_basis()
_QST_SETTINGS = qst_settings()
_QST_DESIGN = None


def _qst_design() -> np.ndarray:
    global _QST_DESIGN
    if _QST_DESIGN is None:
        rows = []
        for v in _QST_SETTINGS:
            eff = v.conj().T @ np.diag([0, 0, 1, 0]).astype(complex) @ v
            rows.append([np.trace(eff @ b).real for b in _QST_BASIS])
        a = np.array(rows)
        if np.linalg.cond(a) > 1e6:
            raise RuntimeError("tomography schedule is ill-conditioned")
        _QST_DESIGN = a
    return _QST_DESIGN


def qst(prepare, shots: int = 0, rng=None,
        setting_noise=None) -> DensityMatrix:
    """Reconstruct a number-basis density matrix by linear inversion.

    ``prepare`` is invoked once per measurement setting and must return a
    number-basis DensityMatrix (fresh noise sampling per invocation is
    fine).  ``setting_noise`` optionally applies a quasi-static phase kick
    to the tomography pulses themselves: a tuple (noise_model, pulse_time).
    """
    if rng is None:
        rng = np.random.default_rng()
    probs = []
    for v in _QST_SETTINGS:
        rho = prepare()
        if rho.basis != "number":
            raise ValueError("prepare must yield a number-basis state")
        if setting_noise is not None:
            model, t_pulse = setting_noise
            d = _sample_shifts(model, 1, rng)[0]
            kick = np.diag(np.exp(-1j * np.array([d[0], d[1], 0, d[2]])
                                  * t_pulse))
            v = v @ kick
        rotated = DensityMatrix(v @ rho.entries @ v.conj().T, basis="number")
        probs.append(measure_p3(rotated, shots=shots, rng=rng))
    x, *_ = np.linalg.lstsq(_qst_design(), np.array(probs), rcond=None)
    m = sum(c * b for c, b in zip(x, _QST_BASIS))
    return DensityMatrix(project_psd(m), basis="number")


# --- process tomography ------------------------------------------------------

_SINGLE_QUBIT_INPUTS = [
    np.array([1, 0], dtype=complex),                  # |up>
    np.array([0, 1], dtype=complex),                  # |down>
    np.array([1, 1], dtype=complex) / SQRT2,          # |+>
    np.array([1, 1j], dtype=complex) / SQRT2,         # |+i>
]


def qpt_input_states() -> list:
    """16 spin-basis product input states for process tomography."""
    return [np.kron(a, b) for a in _SINGLE_QUBIT_INPUTS
            for b in _SINGLE_QUBIT_INPUTS]


_QPT_DESIGN = None


def _qpt_design() -> np.ndarray:
    # rows indexed by (input j, output entry a,b); columns by (m, n):
    # sum_mn chi_mn (P_m rho_j P_n)_{ab} = rho'_j{ab}
    global _QPT_DESIGN
    if _QPT_DESIGN is None:
        inputs = qpt_input_states()
        c = np.zeros((16 * 16, 16 * 16), dtype=complex)
        for jdx, psi in enumerate(inputs):
            rho = np.outer(psi, psi.conj())
            for m in range(16):
                pm_rho = PAULI2[m] @ rho
                for n in range(16):
                    block = pm_rho @ PAULI2[n]
                    c[jdx * 16:(jdx + 1) * 16, m * 16 + n] = block.ravel()
        _QPT_DESIGN = c
    return _QPT_DESIGN


def qpt(process, ion: IonParams = YB171, shots: int = 0, rng=None,
        setting_noise=None) -> ChiMatrix:
    """Standard 16-input-state process tomography; chi in the spin basis.

    ``process`` maps a number-basis DensityMatrix to a number-basis
    DensityMatrix.  Inputs are prepared in the spin basis and conjugated to
    the number basis for simulation; each output is reconstructed with
    ``qst`` and mapped back to the spin basis before the chi inversion.
    A non-trace-preserving process triggers a warning.
    """
    if rng is None:
        rng = np.random.default_rng()
    _, theta0 = mixing_angle(ion)
    r = mapping_operator(theta0)
    outputs = []
    for psi in qpt_input_states():
        rho_s = DensityMatrix(np.outer(psi, psi.conj()), basis="spin")
        rho_n = change_basis(rho_s, r, "spin_to_number")

        def prepare(rho_n=rho_n):
            out = process(rho_n)
            tr = float(np.trace(out.entries).real)
            if abs(tr - 1.0) > 1e-6:
                warnings.warn(f"process is not trace preserving (Tr={tr})")
            return out

        out_n = qst(prepare, shots=shots, rng=rng,
                    setting_noise=setting_noise)
        outputs.append(change_basis(out_n, r, "number_to_spin").entries)
    rhs = np.concatenate([o.ravel() for o in outputs])
    chi_vec, *_ = np.linalg.lstsq(_qpt_design(), rhs, rcond=None)
    chi = chi_vec.reshape(16, 16)
    chi = project_psd(chi, unit_trace=True)
    return ChiMatrix(chi, op_basis="pauli", normalized=True)


def chi_of_unitary(u: np.ndarray) -> ChiMatrix:
    """Analytic trace-normalized chi matrix of a 4x4 spin-basis unitary."""
    coeffs = np.array([np.trace(p.conj().T @ u) / 4.0 for p in PAULI2])
    coeffs = coeffs / np.linalg.norm(coeffs)
    return ChiMatrix(np.outer(coeffs, coeffs.conj()), op_basis="pauli",
                     normalized=True)


# --- quasi-static noise channel ----------------------------------------------

def _sample_shifts(noise: NoiseModel, n: int, rng) -> np.ndarray:
    return rng.normal(size=(n, 3)) * np.array(
        [noise.sigma1, noise.sigma2, noise.sigma4])


@dataclass
class NoisyChannel:
    """Monte-Carlo mixture of unitaries from quasi-static level shifts."""

    unitaries: list

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.basis != "number":
            raise ValueError("channel acts on number-basis states")
        out = np.zeros_like(rho.entries)
        for u in self.unitaries:
            out += u @ rho.entries @ u.conj().T
        return DensityMatrix(out / len(self.unitaries), basis="number")


def apply_noise(seq: PulseSequence, noise: NoiseModel) -> NoisyChannel:
    """Sample-averaged channel of the sequence under quasi-static shifts.

    Each sample adds a constant diagonal d1|1><1| + d2|2><2| + d4|4><4| to
    every segment Hamiltonian; the returned channel averages the resulting
    unitary conjugations.  Deterministic for a fixed noise rng_seed.
    """
    rng = np.random.default_rng(noise.rng_seed)
    if (noise.sigma1, noise.sigma2, noise.sigma4) == (0.0, 0.0, 0.0):
        return NoisyChannel([propagate(seq)])
    shifts = _sample_shifts(noise, noise.n_samples, rng)
    us = []
    for d1, d2, d4 in shifts:
        extra = np.array([d1, d2, 0.0, d4])
        u = np.eye(4, dtype=complex)
        for uk in segment_unitaries(seq, extra_diag=extra):
            u = uk @ u
        us.append(u)
    return NoisyChannel(us)
