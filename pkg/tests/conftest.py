import numpy as np
import pytest

from bundleqed import HilbertSpace, build_operators, preset


@pytest.fixture(scope="session")
def qd():
    return preset("qd")


@pytest.fixture(scope="session")
def qd_weak():
    return preset("qd_weak_losses")


@pytest.fixture(scope="session")
def sc():
    return preset("superconducting")


@pytest.fixture(scope="session")
def sc_bad():
    return preset("superconducting_bad_cavity")


@pytest.fixture
def space4():
    return HilbertSpace(4)


@pytest.fixture
def ops4(space4):
    return build_operators(space4)


def random_density_matrix(rng, dim):
    """Random full-rank state via a Ginibre draw."""
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (m + m.conj().T)
