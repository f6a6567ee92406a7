import numpy as np
import pytest

from tunneltimes.scattering import Barrier


@pytest.fixture(scope="session")
def barrier():
    """The reference barrier used throughout: a=15, m=1, 2mV=1."""
    return Barrier.from_two_mv(1.0, 15.0, 1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
