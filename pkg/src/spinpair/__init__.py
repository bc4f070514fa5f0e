"""Electron/nuclear-spin two-qubit register toolkit for a single trapped ion."""

from .ion import IonParams, YB171
from .linalg import (ChiMatrix, DensityMatrix, StateVector, gate_fidelity,
                     process_fidelity, state_fidelity)

__all__ = [
    "IonParams", "YB171", "ChiMatrix", "DensityMatrix", "StateVector",
    "gate_fidelity", "process_fidelity", "state_fidelity",
]
