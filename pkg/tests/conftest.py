import math

import pytest

from symthermo.contact import ScalingWeights
from symthermo.scaling import ExtendedEnergy, ExtendedState

LN2 = math.log(2.0)


def ratio(q):
    return q[0] / q[1]


@pytest.fixture
def unit_weights():
    return ScalingWeights.uniform(2)


@pytest.fixture
def ratio_energy(unit_weights):
    return ExtendedEnergy(ratio, unit_weights, [(0.5, 4.0), (0.5, 4.0)])


@pytest.fixture
def demo_state():
    # the symplectized image of q=(1, 2) at t = ln 2 for u = q1/q2
    return ExtendedState(2.0, 0.5, (2.0, 4.0), (0.5, -0.25))
