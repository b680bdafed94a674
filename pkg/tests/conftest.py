import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data"""
    return np.random.default_rng(1234)
