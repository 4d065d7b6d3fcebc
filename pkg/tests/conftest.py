import math

import numpy as np
import pytest

N_A = np.array([0.0, 0.0, 1.0])
N_B = np.array([0.5, 0.0, math.sqrt(3.0) / 2.0])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fig2_axes():
    return N_A.copy(), N_B.copy()
