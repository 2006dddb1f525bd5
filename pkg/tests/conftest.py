import numpy as np
import pytest

from segprune.volumes import MaskVolume, ProbabilityVolume


def random_dims(rng, max_side=32):
    ndim = int(rng.integers(2, 4))
    return tuple(int(rng.integers(2, max_side + 1)) for _ in range(ndim))


def random_mask(rng, dims=None, max_side=32) -> MaskVolume:
    dims = dims or random_dims(rng, max_side)
    return MaskVolume(dims, rng.integers(0, 2, size=dims).astype(np.uint8))


def random_prob(rng, dims=None, max_side=32) -> ProbabilityVolume:
    dims = dims or random_dims(rng, max_side)
    return ProbabilityVolume(dims, rng.random(dims, dtype=np.float32))


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
