import random

import numpy as np
import pytest

from sfoverlay.graph import Graph


def binom_ok(hits, trials, p, k=3.0):
    """``hits`` within ``k`` binomial standard deviations of ``trials * p``."""
    sd = np.sqrt(trials * p * (1 - p))
    return abs(hits - trials * p) <= k * max(sd, 1e-12)


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(1, 2), (2, 3)])


@pytest.fixture
def k3():
    return Graph.from_edges(3, [(1, 2), (1, 3), (2, 3)])


@pytest.fixture
def rng():
    return random.Random(12345)
