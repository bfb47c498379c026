import numpy as np
import pytest

from renyi_bounds.hamiltonian import TFIM, ChainSpec, build_nn_chain


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def tfim_l2():
    return build_nn_chain(ChainSpec(2, TFIM(1.0, 1.0)))


@pytest.fixture(scope="session")
def tfim_l4():
    return build_nn_chain(ChainSpec(4, TFIM(1.0, 1.0)))
