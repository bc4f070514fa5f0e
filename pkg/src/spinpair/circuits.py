"""Circuit-level composition and the two-qubit Grover search.

Circuits are lists of gates acting on the two spin qubits.  They can be
evaluated with ideal matrices, with synthesized pulse sequences simulated
in the number basis, or with pulses plus quasi-static dephasing noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .control import PulseSequence, propagate
from .grape import GateTarget, standard_gate
from .ion import IonParams, YB171, eigensystem
from .linalg import DensityMatrix, StateVector
from .tomography import NoiseModel, apply_noise

SPIN_LABELS = ("uu", "ud", "du", "dd")

_MODES = ("ideal", "pulsed", "pulsed+noise")


class MissingPulseError(KeyError):
    """A pulsed-mode run lacks a pulse sequence for some circuit op."""


@dataclass
class Circuit:
    """Ordered gate list applied to an initial spin-basis state.

    ``ops`` entries are either GateTarget (ideal 4x4 spin-basis unitaries,
    resolvable to pulses by name) or PulseSequence objects used verbatim
    in pulsed modes.
    """

    ops: list
    initial_state: StateVector = field(
        default_factory=lambda: StateVector(
            np.array([1, 0, 0, 0], dtype=complex), basis="spin"))

    def __post_init__(self):
        for op in self.ops:
            if isinstance(op, GateTarget):
                continue
            if isinstance(op, PulseSequence):
                continue
            raise TypeError(f"circuit op {op!r} is neither a GateTarget "
                            "nor a PulseSequence")
        if self.initial_state.basis != "spin":
            raise ValueError("initial_state must be in the spin basis")


def _resolve_pulse(op, pulses) -> PulseSequence:
    if isinstance(op, PulseSequence):
        return op
    if pulses is not None and op.name in pulses:
        return pulses[op.name]
    raise MissingPulseError(f"no pulse sequence for gate {op.name!r}")


def run_circuit(c: Circuit, mode: str = "ideal", pulses: dict | None = None,
                noise: NoiseModel | None = None,
                ion: IonParams = YB171) -> DensityMatrix:
    """Apply the circuit and return the final spin-basis density matrix.

    mode "ideal" multiplies the GateTarget matrices; "pulsed" simulates
    each op's pulse sequence in the number basis and maps the result back
    to the spin basis through R; "pulsed+noise" additionally averages each
    pulse over quasi-static level shifts drawn from ``noise``.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {_MODES}")
    psi0 = c.initial_state.amplitudes

    if mode == "ideal":
        u = np.eye(4, dtype=complex)
        for op in c.ops:
            if not isinstance(op, GateTarget):
                raise TypeError("ideal mode requires GateTarget ops")
            u = op.matrix @ u
        psi = u @ psi0
        return DensityMatrix(np.outer(psi, psi.conj()), basis="spin")

    r = eigensystem(ion).eigenvectors
    rho_n = DensityMatrix(
        r.conj().T @ np.outer(psi0, psi0.conj()) @ r, basis="number")

    if mode == "pulsed":
        u = np.eye(4, dtype=complex)
        for op in c.ops:
            u = propagate(_resolve_pulse(op, pulses)) @ u
        rho = u @ rho_n.entries @ u.conj().T
        rho_n = DensityMatrix(rho, basis="number")
    else:
        if noise is None:
            raise ValueError("pulsed+noise mode requires a NoiseModel")
        for op in c.ops:
            channel = apply_noise(_resolve_pulse(op, pulses), noise)
            rho_n = channel(rho_n)

    return DensityMatrix(r @ rho_n.entries @ r.conj().T, basis="spin")


def oracle_gate(marked: int) -> GateTarget:
    """Phase oracle: -1 on the marked spin-basis state, +1 elsewhere.

    ``marked`` is 1-based in the order (uu, ud, du, dd); marked = 2
    reproduces the two-qubit controlled-phase diag(1, -1, 1, 1).
    """
    if marked not in (1, 2, 3, 4):
        raise ValueError("marked must be in 1..4")
    d = np.ones(4, dtype=complex)
    d[marked - 1] = -1
    return GateTarget(name=f"oracle{marked}", matrix=np.diag(d))


def grover_circuit(marked: int) -> Circuit:
    """One-iteration two-qubit Grover search for the marked spin state.

    Layout: H on both qubits, phase oracle, H on both, reflection about
    |uu> (C-00 = diag(1, -1, -1, -1)), H on both.  A two-qubit search is
    exact after a single iteration.
    """
    h1 = standard_gate("hadamard1")
    h2 = standard_gate("hadamard2")
    return Circuit(ops=[h1, h2, oracle_gate(marked), h1, h2,
                        standard_gate("c00"), h1, h2])


def success_rate(final: DensityMatrix, marked: int) -> float:
    """Population of the marked spin-basis state (1-based index)."""
    if final.basis != "spin":
        raise ValueError("success_rate expects a spin-basis state")
    if marked not in (1, 2, 3, 4):
        raise ValueError("marked must be in 1..4")
    return float(final.entries[marked - 1, marked - 1].real)
