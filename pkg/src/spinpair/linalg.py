"""Dense complex linear algebra primitives and fidelity metrics.

All Hamiltonians are carried in angular-frequency units (rad/s) with
hbar = 1.  Matrix exponentials of Hamiltonians go through a Hermitian
eigendecomposition, so the returned propagators are unitary up to
eigensolver error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERM_ATOL = 1e-10
TRACE_ATOL = 1e-12
EIG_ATOL = 1e-10


class BasisMismatchError(ValueError):
    """Operands carry incompatible basis tags or operator bases."""


@dataclass
class StateVector:
    """A pure state with a basis tag ("number", "spin" or "composite")."""

    amplitudes: np.ndarray
    basis: str = "spin"

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        if not np.all(np.isfinite(self.amplitudes.view(float))):
            raise ValueError("non-finite amplitude")
        norm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"state not normalized: |psi|^2 = {norm2}")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()),
                             basis=self.basis)


@dataclass
class DensityMatrix:
    """A density matrix with a basis tag; invariants checked on construction."""

    entries: np.ndarray
    basis: str = "spin"

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        self.validate()

    def validate(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"not square: shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density matrix not Hermitian")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"trace {tr} != 1")
        w = np.linalg.eigvalsh(m)
        if w.min() < -1e-10:
            raise ValueError(f"negative eigenvalue {w.min()}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def populations(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()


@dataclass
class ChiMatrix:
    """Process matrix in the two-qubit Pauli operator basis (spin basis).

    ``entries`` is 16x16; when ``normalized`` the trace is 1 so that
    ``process_fidelity`` reduces to Tr(chi_a chi_b) for unitary targets.
    """

    entries: np.ndarray
    op_basis: str = "pauli"
    normalized: bool = True

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (16, 16):
            raise ValueError(f"chi matrix must be 16x16, got {self.entries.shape}")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor as the slow index."""
    return np.kron(np.asarray(a), np.asarray(b))


def assert_hermitian(h: np.ndarray, atol: float = HERM_ATOL):
    dev = np.max(np.abs(h - h.conj().T))
    scale = max(1.0, float(np.max(np.abs(h))))
    if dev > atol * scale:
        raise ValueError(f"matrix not Hermitian (deviation {dev:.3e})")


def expm_unitary(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    assert_hermitian(h)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def expm_unitary_batch(hs: np.ndarray, t: float) -> np.ndarray:
    """Batched exp(-i h t) over the leading axis of ``hs``."""
    w, v = np.linalg.eigh(hs)
    phases = np.exp(-1j * w * t)
    return np.einsum("...ij,...j,...kj->...ik", v, phases, v.conj())


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|Tr(u^dag v)|^2 / dim^2; invariant under global phase of either arg."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    d = u.shape[0]
    return float(np.abs(np.trace(u.conj().T @ v)) ** 2) / d**2


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def state_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    if rho.basis != sigma.basis:
        raise BasisMismatchError(f"basis {rho.basis!r} vs {sigma.basis!r}")
    if rho.dim != sigma.dim:
        raise ValueError("dimension mismatch")
    sr = _psd_sqrt(rho.entries)
    inner = _psd_sqrt(sr @ sigma.entries @ sr)
    f = float(np.trace(inner).real ** 2)
    return min(max(f, 0.0), 1.0)


def process_fidelity(chi_a: ChiMatrix, chi_b: ChiMatrix) -> float:
    """Tr(chi_a chi_b) for trace-normalized chi of a unitary target."""
    if chi_a.op_basis != chi_b.op_basis:
        raise BasisMismatchError(
            f"operator basis {chi_a.op_basis!r} vs {chi_b.op_basis!r}")
    f = float(np.trace(chi_a.entries @ chi_b.entries).real)
    return min(max(f, 0.0), 1.0)


def project_psd(m: np.ndarray, unit_trace: bool = True) -> np.ndarray:
    """Nearest-PSD projection: Hermitize, clip eigenvalues, renormalize trace."""
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    if unit_trace:
        tr = np.trace(out).real
        if tr <= 0:
            raise ValueError("projection collapsed to zero trace")
        out = out / tr
    return out


def phase_min_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Global-phase-minimized normalized Frobenius distance between operators.

    min_phi ||a - e^{i phi} b||_F / sqrt(dim); zero iff a = e^{i phi} b.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    overlap = np.trace(b.conj().T @ a)
    phi = np.angle(overlap) if overlap != 0 else 0.0
    d = a.shape[0]
    return float(np.linalg.norm(a - np.exp(1j * phi) * b) / np.sqrt(d))
