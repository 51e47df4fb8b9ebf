"""Shared fixtures for harmonic tests."""

import numpy as np
import pytest

from harmonic.martingale import DyadicFunction
from harmonic.symbols import LacunarySystem, lacunary_check


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def haar() -> DyadicFunction:
    return DyadicFunction.from_values([1.0, -1.0])


@pytest.fixture
def doubling_system() -> LacunarySystem:
    return lacunary_check([1, 2, 4])


@pytest.fixture
def even_system() -> LacunarySystem:
    return lacunary_check([2, 4, 8])
