import math

import numpy as np
import pytest

from cocycle_rigidity import Point, ShiftSpace

LN2 = math.log(2.0)


def brute_metric(x, y, lam, extent=200):
    """Independent oracle: partial sums of the defining series."""
    return sum(
        math.exp(-lam * abs(n))
        for n in range(-extent, extent + 1)
        if x.symbol_at(n) != y.symbol_at(n)
    )


@pytest.fixture
def full2():
    return ShiftSpace(2, LN2)


@pytest.fixture
def full3():
    return ShiftSpace(3, LN2)


@pytest.fixture
def golden():
    # forbid the word 11
    return ShiftSpace(2, LN2, [[1, 1], [1, 0]])


@pytest.fixture
def all0():
    return Point((0,))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
