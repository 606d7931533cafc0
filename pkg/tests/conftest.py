import numpy as np
import pytest

from onlineload.allocation import DualWeight


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_w(rng, k, on_boundary=None):
    w1 = rng.uniform(-1, 1, k)
    w2 = rng.uniform(-1, 1, k)
    if on_boundary is None:
        on_boundary = rng.random() < 0.5
    if on_boundary:
        return DualWeight(w1 / np.abs(w1).sum(), w2 / np.abs(w2).sum())
    return DualWeight(w1 / max(1, np.abs(w1).sum()), w2 / max(1, np.abs(w2).sum()))
