import numpy as np
import pytest

from spinpair.grape import ALL_GATES, GrapeConfig, standard_gate, synthesize


@pytest.fixture(scope="session")
def default_grape_config():
    return GrapeConfig()


@pytest.fixture(scope="session")
def all_gate_pulses(default_grape_config):
    """Synthesized pulses for the full ten-gate set (shared, ~2-3 min)."""
    results = {}
    for name in sorted(ALL_GATES + ("cphase",)):
        results[name] = synthesize(standard_gate(name), default_grape_config)
    return results


@pytest.fixture(scope="session")
def hadamard_300us():
    """A deliberately slow Hadamard pulse for noise-sensitivity studies."""
    cfg = GrapeConfig(total_time=300e-6)
    return synthesize(standard_gate("hadamard1"), cfg)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


def random_state(rng, dim=4):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(rng, dim=4):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, dim=4, rank=4):
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real
