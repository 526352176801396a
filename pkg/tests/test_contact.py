import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symthermo.calculus import grid_points
from symthermo.contact import (
    ContactChart,
    HomogeneityError,
    ScalingWeights,
    contactize,
    energy_drift,
    homogeneity_defect,
    legendre_drift,
    legendre_from_generating,
    project_to_lagrangian,
    restricted_flow,
    verify_legendre,
)
from symthermo.eos import ideal_gas_energy
from symthermo.symplectic import CanonicalChart

from conftest import LN2, ratio

IDEAL_BOX = [(-1.0, 1.0), (0.5, 4.0)]


def test_contactize_two_dof():
    cc = contactize(CanonicalChart(2))
    assert cc.dim == 5
    assert cc.names == ("u", "q1", "q2", "p1", "p2")
    x = [0.1, 0.2, 0.3, 0.4, 0.5]
    assert cc.alpha(x) == [1.0, -0.4, -0.5, 0.0, 0.0]
    assert float(np.dot(cc.alpha(x), cc.reeb(x))) == 1.0


def test_d_alpha_is_pulled_back_omega():
    cc = ContactChart(CanonicalChart(2))
    x = [0.1, -1.2, 0.3, 0.4, 2.5]
    da = cc.d_alpha(x)
    assert np.array_equal(da, cc.pullback_omega())
    # d alpha(d/dq1, d/dp1) = omega(d/dq1, d/dp1) = +1 with omega = -d theta
    assert da[1, 3] == 1.0
    assert cc.structure_residual(x) == 0.0


def test_ideal_gas_legendre_submanifold():
    lam = legendre_from_generating(ideal_gas_energy(1.0), 2, IDEAL_BOX)
    pt = lam.embed([0.0, 1.0])
    assert pt.tolist() == pytest.approx([1.5, 0.0, 1.0, 1.0, -1.0], abs=1e-15)
    for q in grid_points(IDEAL_BOX, 4):
        u, _, q2, p1, p2 = lam.embed(q)
        assert p1 == pytest.approx(2.0 / 3.0 * u, rel=1e-14)
        assert p2 == pytest.approx(-2.0 / 3.0 * u / q2, rel=1e-14)
    assert verify_legendre(lam).max_residual <= 1e-12


def test_constant_generating_function_is_horizontal():
    lam = legendre_from_generating(lambda q: 3.0 + 0.0 * q[0], 2, [(0.5, 2.0)] * 2)
    assert lam.embed([1.0, 1.5]).tolist() == [3.0, 1.0, 1.5, 0.0, 0.0]


def test_ratio_generating_function():
    lam = legendre_from_generating(ratio, 2)
    assert lam.embed([1.0, 2.0]).tolist() == [0.5, 1.0, 2.0, 0.5, -0.25]


def test_projection_is_isotropic():
    lam = legendre_from_generating(ideal_gas_energy(1.0), 2, IDEAL_BOX)
    assert project_to_lagrangian(lam).max_residual <= 1e-12
    one = legendre_from_generating(lambda q: q[0] ** 3, 1, [(0.0, 1.0)])
    assert project_to_lagrangian(one).max_residual == 0.0


def test_lift_roundtrip_recovers_energy_from_temperature():
    lam = legendre_from_generating(ideal_gas_energy(1.0), 2, IDEAL_BOX)
    for q in grid_points(IDEAL_BOX, 5):
        point = lam.embed(q)
        back = lam.lift(lam.project(point))
        assert np.array_equal(back, point)
        assert back[0] == pytest.approx(1.5 * back[3], rel=1e-14)


def test_restricted_flow_closed_form():
    lam = legendre_from_generating(ratio, 2)
    recs = restricted_flow(lam, ScalingWeights.uniform(2), [2.0, 4.0], 1.0, LN2, 1e-3)
    last = recs[-1]
    assert last.t == LN2
    assert last.q == pytest.approx([1.0, 2.0], abs=1e-8)
    assert last.p[0] == pytest.approx(0.5, abs=1e-8)
    assert recs[0].p[0] == 0.25
    assert energy_drift(recs) <= 1e-8


def test_restricted_flow_stationary_when_c_is_zero():
    lam = legendre_from_generating(ratio, 2)
    recs = restricted_flow(lam, ScalingWeights.uniform(2), [2.0, 4.0], 0.0, 1.0, 0.1)
    assert all(np.array_equal(r.q, recs[0].q) and np.array_equal(r.p, recs[0].p) for r in recs)


def test_restricted_flow_requires_scale_invariance():
    lam = legendre_from_generating(ideal_gas_energy(1.0), 2)
    with pytest.raises(HomogeneityError):
        restricted_flow(lam, ScalingWeights.uniform(2), [0.3, 1.2])
    assert homogeneity_defect(ratio, ScalingWeights.uniform(2), [0.3, 1.2]) == 0.0


def test_restricted_flow_invariants():
    lam = legendre_from_generating(ratio, 2)
    recs = restricted_flow(lam, ScalingWeights.uniform(2), [2.0, 4.0], 1.0, 1.0, 1e-3)
    assert legendre_drift(lam, recs) <= 1e-6
    assert energy_drift(recs) <= 1e-8


def test_rk4_order():
    lam = legendre_from_generating(ratio, 2)
    w = ScalingWeights.uniform(2)

    def error(dt):
        r = restricted_flow(lam, w, [2.0, 4.0], 1.0, 1.0, dt)[-1]
        exact_q = np.array([2.0, 4.0]) * math.exp(-1.0)
        exact_p = np.array([0.25, -0.125]) * math.e
        return max(np.max(np.abs(r.q - exact_q)), np.max(np.abs(r.p - exact_p)))

    factor = error(0.1) / error(0.05)
    assert 8.0 <= factor <= 32.0


@given(st.floats(0.6, 3.5), st.floats(0.6, 3.5))
@settings(max_examples=30, deadline=None)
def test_legendre_implies_isotropy(a, b):
    def u(q):
        return q[0] * q[0] / q[1] + 0.5 * q[1] ** 3

    lam = legendre_from_generating(u, 2)
    assert lam.legendre_residual([a, b]) <= 1e-12
    assert lam.isotropy_residual([a, b]) <= 1e-12


def test_weights_validation():
    with pytest.raises(ValueError):
        ScalingWeights(1.0, 0.0, (1.0,))
    with pytest.raises(ValueError):
        restricted_flow(legendre_from_generating(ratio, 2), ScalingWeights.uniform(1), [1.0])
