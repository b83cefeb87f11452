import numpy as np
import pytest

from polcipher.utils.rng import stream


@pytest.fixture
def rng() -> np.random.Generator:
    return stream(1234)


@pytest.fixture
def jones_batch(rng):
    """Random complex Jones vectors, shape (256, 2)."""
    return rng.standard_normal((256, 2)) + 1j * rng.standard_normal((256, 2))
