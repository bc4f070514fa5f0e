import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinpair.control import (MicrowaveTone, PulseSegment, PulseSequence,
                              RegimeWarning, control_hamiltonian,
                              frame_transform, lab_frame_hamiltonian,
                              propagate, propagate_lab_frame,
                              rwa_coefficients, segment_unitaries)
from spinpair.ion import YB171, eigensystem
from spinpair.linalg import expm_unitary

TWO_PI = 2 * np.pi
SILENT = MicrowaveTone(0.0, 0.0, 0.0, 0.0, 0.0)


def test_control_hamiltonian_structure():
    seg = PulseSegment(duration=1e-5, c31=100.0)
    h = control_hamiltonian(seg)
    expect = np.zeros((4, 4), dtype=complex)
    expect[2, 0] = expect[0, 2] = 100.0
    assert np.allclose(h, expect)
    # diagonal detunings appear undoubled on the diagonal
    seg = PulseSegment(duration=1e-5, d1=50.0, d2=-30.0, d4=10.0)
    h = control_hamiltonian(seg)
    assert np.allclose(np.diag(h), [50.0, -30.0, 0.0, 10.0])


def test_control_hamiltonian_hermitian(rng):
    seg = PulseSegment(duration=1e-5,
                       c31=complex(*rng.normal(size=2)),
                       c32=complex(*rng.normal(size=2)),
                       c34=complex(*rng.normal(size=2)),
                       d1=rng.normal(), d2=rng.normal(), d4=rng.normal())
    h = control_hamiltonian(seg)
    assert np.max(np.abs(h - h.conj().T)) < 1e-14


def test_pi_pulse_transfers_level_3_to_1():
    omega = TWO_PI * 1e3
    seg = PulseSegment(duration=np.pi / (2 * omega), c31=omega)
    u = propagate(PulseSequence(segments=[seg]))
    psi = u @ np.array([0, 0, 1, 0], dtype=complex)
    assert abs(psi[0]) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_propagate_order_convention():
    # a pi pulse on (3,1) followed by one on (3,2) must move |3> -> |1>
    # only if the (3,1) pulse acts first (latest segment leftmost)
    omega = TWO_PI * 1e3
    p31 = PulseSegment(duration=np.pi / (2 * omega), c31=omega)
    p32 = PulseSegment(duration=np.pi / (2 * omega), c32=omega)
    u = propagate(PulseSequence(segments=[p31, p32]))
    psi = u @ np.array([0, 0, 1, 0], dtype=complex)
    assert abs(psi[0]) ** 2 == pytest.approx(1.0, abs=1e-12)


@given(split=st.floats(0.1, 0.9))
@settings(max_examples=20, deadline=None)
def test_segment_split_associativity(split):
    seg = PulseSegment(duration=2e-4, c31=700 + 300j, c32=-200j, c34=150.0,
                       d1=90.0, d2=-40.0, d4=25.0)
    whole = propagate(PulseSequence(segments=[seg]))
    a = PulseSegment(duration=seg.duration * split, c31=seg.c31, c32=seg.c32,
                     c34=seg.c34, d1=seg.d1, d2=seg.d2, d4=seg.d4)
    b = PulseSegment(duration=seg.duration * (1 - split), c31=seg.c31,
                     c32=seg.c32, c34=seg.c34, d1=seg.d1, d2=seg.d2,
                     d4=seg.d4)
    parts = propagate(PulseSequence(segments=[a, b]))
    assert np.max(np.abs(whole - parts)) < 1e-12


def test_json_roundtrip_bit_exact(rng):
    segs = [PulseSegment(duration=float(rng.uniform(1e-6, 1e-4)),
                         c31=complex(*rng.normal(size=2)),
                         c32=complex(*rng.normal(size=2)),
                         c34=complex(*rng.normal(size=2)),
                         d1=float(rng.normal()), d2=float(rng.normal()),
                         d4=float(rng.normal()))
            for _ in range(5)]
    seq = PulseSequence(segments=segs)
    text = seq.to_json()
    back = PulseSequence.from_json(text)
    for s0, s1 in zip(seq.segments, back.segments):
        assert s0 == s1
    assert back.to_json() == text


def test_from_json_rejects_unknown_schema():
    with pytest.raises(ValueError):
        PulseSequence.from_json('{"schema_version": 99, "segments": []}')


def test_segment_unitaries_extra_diag_shifts_phases():
    seg = PulseSegment(duration=1e-4)
    (u,) = segment_unitaries(PulseSequence(segments=[seg]),
                             extra_diag=np.array([100.0, 0.0, 0.0, 0.0]))
    assert np.angle(u[0, 0]) == pytest.approx(-100.0 * 1e-4)
    assert u[1, 1] == pytest.approx(1.0)


def test_rwa_coefficients_tone_selectivity():
    es = eigensystem(YB171)
    e = es.energies
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        seg = rwa_coefficients(
            [MicrowaveTone(1e-6, 0, 0, e[0] - e[2], 0.0), SILENT, SILENT],
            YB171, 1e-4)
    assert seg.c31 != 0 and seg.c32 == 0 and seg.c34 == 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        seg = rwa_coefficients(
            [SILENT, MicrowaveTone(0, 0, 1e-6, e[1] - e[2], 0.0), SILENT],
            YB171, 1e-4)
    assert seg.c31 == 0 and seg.c32 != 0 and seg.c34 == 0


def test_rwa_coefficient_values():
    es = eigensystem(YB171)
    th = es.theta0
    b = 1e-6
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        seg = rwa_coefficients(
            [MicrowaveTone(b, 0, 0, es.energies[0] - es.energies[2], 0.0),
             SILENT, SILENT], YB171, 1e-4)
    want = 0.25 * b * (YB171.gamma_n * np.cos(th / 2)
                       + YB171.gamma_e * np.sin(th / 2))
    assert seg.c31 == pytest.approx(want, rel=1e-12)
    assert seg.d1 == pytest.approx(0.0, abs=1e-6)


def test_rwa_coefficients_amplitude_linearity():
    es = eigensystem(YB171)
    e = es.energies
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        one = rwa_coefficients(
            [MicrowaveTone(1e-6, 0, 0, e[0] - e[2], 0.0), SILENT, SILENT],
            YB171, 1e-4).c31
        two = rwa_coefficients(
            [MicrowaveTone(2e-6, 0, 0, e[0] - e[2], 0.0), SILENT, SILENT],
            YB171, 1e-4).c31
        c34 = rwa_coefficients(
            [SILENT, SILENT,
             MicrowaveTone(1e-6, -2e-6, 0, e[3] - e[2], 0.1)],
            YB171, 1e-4).c34
    assert two == pytest.approx(2 * one, rel=1e-12)
    th = es.theta0
    want = (0.25 * (1e-6 - 1j * (-2e-6))
            * (YB171.gamma_n * np.sin(th / 2)
               + YB171.gamma_e * np.cos(th / 2)) * np.exp(0.1j))
    assert c34 == pytest.approx(want, rel=1e-12)


def test_rwa_regime_warning_on_strong_drive():
    es = eigensystem(YB171)
    with pytest.warns(RegimeWarning):
        rwa_coefficients(
            [MicrowaveTone(0.1, 0, 0, es.energies[0] - es.energies[2], 0.0),
             SILENT, SILENT], YB171, 1e-4)


def _scaled_ion():
    a_s = TWO_PI * 10e6
    scale = a_s / YB171.hyperfine_a
    return YB171.replace(hyperfine_a=a_s, b_field=YB171.b_field * scale)


def test_lab_frame_zero_tones_is_free_evolution():
    p = _scaled_ion()
    es = eigensystem(p)
    t = 1e-6
    u = propagate_lab_frame([SILENT], p, t, 1e-10)
    # in the number basis free evolution is diagonal phases
    want = np.diag(np.exp(-1j * es.energies * t))
    assert np.max(np.abs(u - want)) < 1e-8


def test_lab_frame_rejects_coarse_dt():
    p = _scaled_ion()
    with pytest.raises(ValueError):
        propagate_lab_frame([SILENT], p, 1e-5, 1e-6)


def test_lab_frame_hamiltonian_hermitian():
    p = _scaled_ion()
    tone = MicrowaveTone(1e-6, 2e-6, 3e-6, TWO_PI * 1e7, 0.3)
    h = lab_frame_hamiltonian([tone], p, 1.23e-7)
    assert np.max(np.abs(h - h.conj().T)) < 1e-6


def test_frame_transform_identity_at_t0():
    u = np.eye(4, dtype=complex)
    assert np.allclose(frame_transform(u, 0.0, YB171), u, atol=1e-14)


def test_frame_transform_constant_detuning_phases():
    p = _scaled_ion()
    e = eigensystem(p).energies
    t = 1e-6
    hist = [(t, 10.0, -5.0, 2.0)]
    r = frame_transform(np.eye(4, dtype=complex), t, p, hist)
    # R_r'(t)^dag carries diagonal phases exp(-i(E_k - delta_k) t)
    want = np.exp(-1j * (e - np.array([10.0, -5.0, 0.0, 2.0])) * t)
    assert np.allclose(np.diag(r), want, atol=1e-9)
