import numpy as np
import pytest

from monopole_lab.grid_spectral import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def grid():
    return GridSpec(16, 2.0 * np.pi, 1e-3)


@pytest.fixture
def grid32():
    return GridSpec(32, 2.0 * np.pi, 1e-3)
