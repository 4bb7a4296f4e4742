import numpy as np
import pytest

import qpathdist as qd


@pytest.fixture(scope="session")
def ctx64():
    return qd.build_fock(64, 1.0)


@pytest.fixture(scope="session")
def ctx128():
    return qd.build_fock(128, 1.0)


@pytest.fixture(scope="session")
def osc_ground64(ctx64):
    return qd.make_fiducial(ctx64, qd.FiducialSpec("oscillator_ground"))


@pytest.fixture(scope="session")
def osc_ground128(ctx128):
    return qd.make_fiducial(ctx128, qd.FiducialSpec("oscillator_ground"))


@pytest.fixture(scope="session")
def quartic_prep():
    """Gate-checked quartic scenario at hbar=1, dim 64."""
    return qd.prepare_fock_scenario(qd.quartic_model(), 1.0, 64)


def random_unit(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng, dim, scale=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (m + m.conj().T)
