import numpy as np
import pytest

from h2frag.dataset import load_dataset
from h2frag.grid import build_grid


@pytest.fixture(scope="session")
def ds():
    return load_dataset()


@pytest.fixture(scope="session")
def grid():
    return build_grid(0.1, 40.0, 2048)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
