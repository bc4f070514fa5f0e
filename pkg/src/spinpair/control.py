"""Rotating-frame control Hamiltonian, lab-frame integration and the RWA map.

The control Hamiltonian couples |3> to |1>, |2>, |4> with complex
amplitudes c31, c32, c34 and carries real detunings d1, d2, d4.  Writing
the Hamiltonian as (sum of couplings) + (d_k/2)|k><k| + H.c., the
Hermitian conjugate doubles the diagonal terms, so the detuning of level
k enters as d_k |k><k|.  This matches the printed form of the rotating
frame Hamiltonian and is implemented verbatim.

Propagator order convention: latest segment leftmost,
U = U_N ... U_2 U_1.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .ion import (I1X, I1Y, I1Z, I2X, I2Y, I2Z, IonParams, eigensystem,
                  free_hamiltonian, mapping_operator)
from .linalg import expm_unitary, expm_unitary_batch

PULSE_SCHEMA_VERSION = 1

# Number-basis indices of levels |1..4|
L1, L2, L3, L4 = 0, 1, 2, 3


class RegimeWarning(UserWarning):
    """Control parameters leave the regime where the RWA map is accurate."""


@dataclass
class PulseSegment:
    """One piecewise-constant control interval (rotating frame)."""

    duration: float
    c31: complex = 0.0
    c32: complex = 0.0
    c34: complex = 0.0
    d1: float = 0.0
    d2: float = 0.0
    d4: float = 0.0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("segment duration must be positive")


@dataclass
class PulseSequence:
    """Ordered list of pulse segments."""

    segments: list

    @property
    def total_time(self) -> float:
        return sum(s.duration for s in self.segments)

    def to_json(self) -> str:
        payload = {
            "schema_version": PULSE_SCHEMA_VERSION,
            "segments": [
                {
                    "duration_s": s.duration,
                    "c31": [s.c31.real, s.c31.imag],
                    "c32": [s.c32.real, s.c32.imag],
                    "c34": [s.c34.real, s.c34.imag],
                    "d1": s.d1, "d2": s.d2, "d4": s.d4,
                }
                for s in self.segments
            ],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PulseSequence":
        payload = json.loads(text)
        version = payload.get("schema_version")
        if version != PULSE_SCHEMA_VERSION:
            raise ValueError(f"unknown pulse schema version {version}")
        segs = [
            PulseSegment(
                duration=d["duration_s"],
                c31=complex(*d["c31"]),
                c32=complex(*d["c32"]),
                c34=complex(*d["c34"]),
                d1=d["d1"], d2=d["d2"], d4=d["d4"],
            )
            for d in payload["segments"]
        ]
        return cls(segments=segs)


@dataclass
class MicrowaveTone:
    """One near-resonant microwave field with a slowly varying envelope."""

    bx: float = 0.0
    by: float = 0.0
    bz: float = 0.0
    omega: float = 0.0
    phi: float = 0.0


def control_hamiltonian(seg: PulseSegment, scale: float = 1.0) -> np.ndarray:
    """4x4 rotating-frame Hamiltonian of one segment (number basis, rad/s).

    ``scale`` multiplies the coupling amplitudes only (amplitude-error
    model); the detunings are unaffected.
    """
    h = np.zeros((4, 4), dtype=complex)
    h[L3, L1] = scale * seg.c31
    h[L3, L2] = scale * seg.c32
    h[L3, L4] = scale * seg.c34
    h[L1, L1] = seg.d1 / 2
    h[L2, L2] = seg.d2 / 2
    h[L4, L4] = seg.d4 / 2
    return h + h.conj().T


def segment_unitaries(seq: PulseSequence, scale: float = 1.0,
                      extra_diag: np.ndarray | None = None) -> list:
    """Per-segment propagators; ``extra_diag`` adds a static diagonal shift
    (length-4, rad/s) to every segment Hamiltonian (quasi-static noise)."""
    us = []
    for seg in seq.segments:
        h = control_hamiltonian(seg, scale=scale)
        if extra_diag is not None:
            h = h + np.diag(extra_diag.astype(complex))
        us.append(expm_unitary(h, seg.duration))
    return us


def propagate(seq: PulseSequence, scale: float = 1.0,
              extra_diag: np.ndarray | None = None) -> np.ndarray:
    """Total propagator of the sequence, latest segment leftmost."""
    u = np.eye(4, dtype=complex)
    for uk in segment_unitaries(seq, scale=scale, extra_diag=extra_diag):
        u = uk @ u
    return u


def rwa_coefficients(tones, p: IonParams, duration: float) -> PulseSegment:
    """Map three microwave tones to one rotating-frame pulse segment.

    tones[0] drives |3><->|1| (transverse field), tones[1] drives
    |3><->|2| (field along z), tones[2] drives |3><->|4| (transverse).
    Detunings are read off the tone frequencies relative to the level
    splittings.  Parameter-regime violations raise a RegimeWarning but do
    not reject the input.

    Amplitude convention: bx, by, bz are peak amplitudes of the linearly
    polarized lab field b cos(omega t + phi).  The rotating-wave
    approximation keeps the co-rotating half of the cosine, so the
    transverse couplings carry 1/4 = (1/2 spin-1/2 matrix element) x
    (1/2 RWA), while the longitudinal c32 carries 1/2 x the RWA half
    because its sin(theta0/2)cos(theta0/2) factor already supplies the
    spin-1/2 normalization.  Direct lab-frame integration confirms both.
    """
    if len(tones) != 3:
        raise ValueError("exactly three tones expected")
    es = eigensystem(p)
    e = es.energies
    th = es.theta0
    g1, g2 = p.gamma_n, p.gamma_e
    t1, t2, t3 = tones

    c31 = 0.25 * (t1.bx + 1j * t1.by) * (
        g1 * np.cos(th / 2) + g2 * np.sin(th / 2)) * np.exp(1j * t1.phi)
    c32 = -0.5 * t2.bz * np.sin(th / 2) * np.cos(th / 2) * (
        g2 - g1) * np.exp(1j * t2.phi)
    c34 = 0.25 * (t3.bx - 1j * t3.by) * (
        g1 * np.sin(th / 2) + g2 * np.cos(th / 2)) * np.exp(1j * t3.phi)

    # omega_1 = E1 - E3 - d1, omega_2 = E2 - E3 - d2, omega_3 = E4 - E3 - d4
    d1 = (e[0] - e[2]) - t1.omega if t1.omega else 0.0
    d2 = (e[1] - e[2]) - t2.omega if t2.omega else 0.0
    d4 = (e[3] - e[2]) - t3.omega if t3.omega else 0.0

    min_split = min(abs(e[0] - e[1]), abs(e[1] - e[3]))
    drives = [abs(g * b) for t in tones for g in (g1, g2)
              for b in (t.bx, t.by, t.bz)]
    if min_split > 0 and (max(drives + [abs(d1), abs(d2), abs(d4)])
                          > 0.1 * min_split):
        warnings.warn("drive strength or detuning not small compared to the "
                      "level splittings; RWA coefficients may be inaccurate",
                      RegimeWarning)
    return PulseSegment(duration=duration, c31=c31, c32=c32, c34=c34,
                        d1=d1, d2=d2, d4=d4)


def lab_frame_hamiltonian(tones, p: IonParams, t: float) -> np.ndarray:
    """Full lab-frame Hamiltonian (spin basis) at time t, no RWA."""
    h = free_hamiltonian(p)
    gx = p.gamma_n * I1X + p.gamma_e * I2X
    gy = p.gamma_n * I1Y + p.gamma_e * I2Y
    gz = p.gamma_n * I1Z + p.gamma_e * I2Z
    for tone in tones:
        c = np.cos(tone.omega * t + tone.phi)
        h = h - c * (tone.bx * gx + tone.by * gy + tone.bz * gz)
    return h


def propagate_lab_frame(tones, p: IonParams, duration: float,
                        dt: float) -> np.ndarray:
    """Direct lab-frame integration (no RWA); returns U in the number basis.

    Midpoint piecewise-constant stepping.  ``dt`` must resolve the fastest
    frequency: dt <= (2 pi / max(omega, splittings)) / 50.
    """
    es = eigensystem(p)
    freqs = [abs(t.omega) for t in tones]
    freqs += [abs(x) for x in np.subtract.outer(es.energies, es.energies).ravel()]
    fmax = max(freqs)
    if fmax > 0 and dt > (2 * np.pi / fmax) / 50:
        raise ValueError(f"dt = {dt:g} too coarse for max frequency "
                         f"{fmax / (2 * np.pi):g} Hz")
    n = max(1, int(np.ceil(duration / dt)))
    step = duration / n
    tmid = (np.arange(n) + 0.5) * step

    h0 = free_hamiltonian(p)
    gx = p.gamma_n * I1X + p.gamma_e * I2X
    gy = p.gamma_n * I1Y + p.gamma_e * I2Y
    gz = p.gamma_n * I1Z + p.gamma_e * I2Z
    hs = np.broadcast_to(h0, (n, 4, 4)).copy()
    for tone in tones:
        c = np.cos(tone.omega * tmid + tone.phi)
        g = tone.bx * gx + tone.by * gy + tone.bz * gz
        hs -= c[:, None, None] * g

    us = expm_unitary_batch(hs, step)
    u = np.eye(4, dtype=complex)
    for k in range(n):
        u = us[k] @ u
    r = mapping_operator(es.theta0)
    return r.conj().T @ u @ r


def rotating_frame_operator(t: float, p: IonParams,
                            delta_history=None) -> np.ndarray:
    """Frame operator R_r'(t) = exp(-i integral of H'_r'), number basis.

    H'_r' is diagonal with entries (d1 - E1, d2 - E2, -E3, d4 - E4); the
    detuning history is a list of (duration, d1, d2, d4) intervals covering
    [0, t].  With no history the detunings are zero.
    """
    e = eigensystem(p).energies
    phase = -e * t
    acc = np.zeros(4)
    if delta_history:
        elapsed = 0.0
        for (dur, d1, d2, d4) in delta_history:
            dur = min(dur, t - elapsed)
            if dur <= 0:
                break
            acc += np.array([d1, d2, 0.0, d4]) * dur
            elapsed += dur
    phase = phase + acc
    return np.diag(np.exp(-1j * phase))


def frame_transform(u_rot: np.ndarray, t: float, p: IonParams,
                    delta_history=None) -> np.ndarray:
    """Map a rotating-frame propagator over [0, t] to the lab frame.

    U_lab(t) = R_r'(t)^dag U_rot(t) since R_r'(0) = I.
    """
    r = rotating_frame_operator(t, p, delta_history)
    return r.conj().T @ u_rot
