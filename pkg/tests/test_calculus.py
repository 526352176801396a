import numpy as np
import pytest

from symthermo import hyperdual as hd
from symthermo.calculus import (
    MAX_DIM,
    canonical_omega,
    exterior_derivative,
    grad,
    grid_points,
    hessian,
    jacobian,
    second_directional,
)
from symthermo.contact import ScalingWeights
from symthermo.eos import VdwParams, ideal_gas_energy, ideal_to_vdw_map
from symthermo.scaling import ExtendedState, apply_dilation, dilation_map

E1, E2 = [1.0, 0.0], [0.0, 1.0]


def test_grad_examples():
    assert grad(ideal_gas_energy(1.0), [0.0, 1.0]).tolist() == pytest.approx([1.0, -1.0],
                                                                             abs=1e-15)
    assert grad(lambda q: 7.0, [3.0, 4.0]).tolist() == [0.0, 0.0]
    assert grad(lambda q: q[0] / q[1], [1.0, 2.0]).tolist() == [0.5, -0.25]


def test_second_directional_examples():
    assert second_directional(lambda q: q[0] * q[1], [0.0, 0.0], E1, E2) == 1.0
    assert second_directional(lambda q: 3.0 * q[0] - q[1] + 2.0, [0.4, -1.0], E1, E2) == 0.0
    val = second_directional(ideal_gas_energy(1.0), [0.0, 1.0], E2, E2)
    assert val == pytest.approx(5.0 / 3.0, abs=1e-14)


def test_second_directional_rejects_zero_direction():
    with pytest.raises(ValueError):
        second_directional(lambda q: q[0], [1.0, 1.0], [0.0, 0.0], E1)


def test_hessian_matches_closed_form():
    H = hessian(ideal_gas_energy(1.0), [0.0, 1.0])
    # u = 1.5 e^{2s/3} v^{-2/3}
    assert H == pytest.approx(np.array([[2.0 / 3.0, -2.0 / 3.0], [-2.0 / 3.0, 5.0 / 3.0]]))


def test_jacobian_identity():
    assert np.array_equal(jacobian(lambda x: list(x), [0.3, -1.0, 2.0, 5.0]), np.eye(4))


def test_jacobian_of_vdw_shear():
    J = jacobian(ideal_to_vdw_map(VdwParams(1.0, 1.0)), [0.0, 2.0, 1.0, -0.75])
    expected = np.eye(4)
    expected[3, 1] = 0.25
    assert np.array_equal(J, expected)


def test_jacobian_of_dilation():
    w = ScalingWeights(1.0, 1.0, (1.0,))
    x = ExtendedState(1.5, -0.2, (1.0,), (0.3,))
    dilate = dilation_map(w, 2.0)
    # chart order (Q1, Z, P1, mu)
    assert np.array_equal(jacobian(dilate, x.vector()), np.diag([2.0, 2.0, 1.0, 1.0]))
    assert dilate(x.vector()) == apply_dilation(x, 2.0, w).vector()


def test_jacobian_size_cap():
    with pytest.raises(ValueError):
        jacobian(lambda x: list(x), [0.0] * (MAX_DIM + 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_canonical_omega_properties(n):
    W = canonical_omega(n)
    assert np.array_equal(W.T, -W)
    assert np.array_equal(W @ W, -np.eye(2 * n))


def test_exterior_derivative_of_tautological_form():
    # theta = p dq in (q, p); d theta = dp ^ dq, so -d theta is the canonical matrix
    d = exterior_derivative(lambda x: [x[1], 0.0], [0.3, 0.7])
    assert np.array_equal(-d, canonical_omega(1))


def test_grid_points():
    pts = grid_points([(0.0, 1.0), (2.0, 4.0)], 3)
    assert len(pts) == 9
    assert pts[0] == (0.0, 2.0) and pts[-1] == (1.0, 4.0)
    with pytest.raises(ValueError):
        grid_points([(1.0, 1.0)], 3)


def test_power_with_variable_exponent_differentiates():
    g = grad(lambda x: hd.power(x[0], x[1]), [2.0, 3.0])
    assert g == pytest.approx([12.0, 8.0 * np.log(2.0)])
