import numpy as np
import pytest

from semevo.datasets import data_path, load_fixture_store, load_network


@pytest.fixture(scope="session")
def fig1_store():
    return load_fixture_store("fig1")


@pytest.fixture(scope="session")
def fig1_net():
    return load_network("fig1_network")


@pytest.fixture(scope="session")
def fig3_store():
    return load_fixture_store("fig3")


@pytest.fixture(scope="session")
def fig4_store():
    return load_fixture_store("fig4")


@pytest.fixture(scope="session")
def fig4_parents():
    return load_network("fig4_parent1"), load_network("fig4_parent2")


@pytest.fixture(scope="session")
def fig5_store():
    return load_fixture_store("fig5")


@pytest.fixture(scope="session")
def fig5_parents():
    return load_network("fig5_parent1"), load_network("fig5_parent2")


@pytest.fixture(scope="session")
def toy_store():
    return load_fixture_store("toy")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def data():
    return data_path
