import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symthermo.calculus import canonical_omega, directional, gradient, grid_points
from symthermo.contact import ScalingWeights
from symthermo.eos import VdwParams, ideal_gas, ideal_to_vdw_map
from symthermo.hyperdual import real
from symthermo.scaling import (
    ExtendedEnergy,
    charge_function,
    charge_vector_field,
    dilation_vector_field,
    invariant_functions,
    process_hamiltonian_function,
    random_states,
)
from symthermo.symplectic import (
    CanonicalChart,
    ChartError,
    SmoothMap,
    check_symplectomorphism,
    extended_chart,
    hamiltonian_field,
    hamiltonian_vector_field,
    lie_bracket,
    lie_derivative_closed_two_form,
    poisson_bracket,
    vector_field_apply,
)


def q1(x):
    return x[0]


def p1(x):
    return x[len(x) // 2]


def test_canonical_pair():
    assert poisson_bracket(q1, p1, [0.3, -0.2, 1.1, 4.0]) == 1.0
    assert poisson_bracket(p1, q1, [0.3, -0.2, 1.1, 4.0]) == -1.0


def test_ideal_gas_constraints_commute():
    sys = ideal_gas()
    assert poisson_bracket(sys.constraint(0), sys.constraint(1), [0.0, 1.0, 1.0, -1.0]) == 0.0


def test_scale_invariant_coordinate_commutes_with_charge(unit_weights, demo_state):
    qs, _ = invariant_functions(unit_weights)
    G = charge_function(unit_weights)
    assert poisson_bracket(qs[0], G, demo_state.vector()) == 0.0


def test_hamiltonian_field_of_temperature_constraint():
    # p1 - T(q): its field is -d/dq1 - (2/3) T d/dp1 + (2/3) T / q2 d/dp2
    X = hamiltonian_field(ideal_gas().constraint(0), [0.0, 1.0, 1.0, -1.0], "df")
    assert X.components == pytest.approx([-1.0, 0.0, -2.0 / 3.0, 2.0 / 3.0], abs=1e-15)
    assert X.components[0] == -1.0


def test_charge_field_components(unit_weights, demo_state):
    X = hamiltonian_field(charge_function(unit_weights), demo_state.vector(), "-df")
    # order (Q1, Q2, Z, P1, P2, mu)
    assert X.components.tolist() == [2.0, 4.0, 2.0, -0.5, 0.25, -0.5]
    closed = charge_vector_field(unit_weights)(demo_state.vector())
    assert X.components.tolist() == closed


@pytest.mark.parametrize("convention", ["df", "-df"])
def test_constant_function_has_zero_field(convention):
    X = hamiltonian_field(lambda x: 4.0, [1.0, 2.0, 3.0, 4.0], convention)
    assert not np.any(X.components)


def test_hamiltonian_field_solves_interior_product():
    f = ideal_gas().constraint(0)
    x = [0.2, 1.3, 0.7, -0.4]
    W = canonical_omega(2)
    df = np.array(gradient(f, x))
    for conv, sign in (("df", 1.0), ("-df", -1.0)):
        X = hamiltonian_field(f, x, conv).components
        # contraction in the second slot: omega(Y, X) = sign * df(Y)
        assert np.allclose(W @ X, sign * df, rtol=0, atol=1e-15)


def test_unknown_convention():
    with pytest.raises(ValueError):
        hamiltonian_vector_field(q1, "dF")


def test_chart_mismatch():
    chart = CanonicalChart(2)
    with pytest.raises(ChartError):
        poisson_bracket(q1, p1, [1.0, 2.0], chart)
    with pytest.raises(ChartError):
        poisson_bracket(q1, p1, [1.0, 2.0, 3.0])


def test_extended_chart_names():
    assert extended_chart(2).names == ("Q1", "Q2", "Z", "P1", "P2", "mu")


def test_vdw_shear_is_symplectic():
    psi = ideal_to_vdw_map(VdwParams(1.0, 1.0))
    pts = grid_points([(-1.0, 1.0), (1.5, 4.0), (0.0, 2.0), (-2.0, 0.0)], 5)
    assert len(pts) == 625
    assert check_symplectomorphism(psi, pts) <= 1e-12


def test_identity_is_symplectic():
    ident = SmoothMap(lambda x: list(x), 4, 4)
    assert check_symplectomorphism(ident, grid_points([(-1, 1)] * 4, 3)) == 0.0


def test_non_canonical_scaling():
    stretch = SmoothMap(lambda x: [2.0 * x[0], x[1]], 2, 2)
    assert check_symplectomorphism(stretch, [(0.5, 0.5), (1.0, -2.0)]) == 1.0


def test_composition_of_symplectomorphisms():
    psi = ideal_to_vdw_map(VdwParams(1.0, 1.0))
    shear = SmoothMap(lambda x: [x[0], x[1], x[2] + x[0] ** 2, x[3]], 4, 4, "shear")
    pts = grid_points([(-1.0, 1.0), (1.5, 4.0), (0.0, 2.0), (-2.0, 0.0)], 3)
    both = shear.compose(psi)
    assert check_symplectomorphism(both, pts) <= (check_symplectomorphism(psi, pts)
                                                  + check_symplectomorphism(shear, pts) + 1e-12)


def _const(v):
    return lambda x: list(v)


def test_constant_fields_commute():
    b = lie_bracket(_const([1, 0, 0, 0]), _const([0, 0, 1, 0]), [0.1, 0.2, 0.3, 0.4])
    assert not np.any(b.components)


def test_dilation_commutes_with_charge_field(unit_weights, demo_state):
    b = lie_bracket(dilation_vector_field(unit_weights), charge_vector_field(unit_weights),
                    demo_state.vector())
    assert not np.any(b.components)


def test_dilation_commutes_with_process_field(ratio_energy):
    Xr = dilation_vector_field(ratio_energy.weights)
    XH = hamiltonian_vector_field(process_hamiltonian_function(ratio_energy), "-df")
    for x in random_states(ratio_energy, 10, seed=3, on_graph=False):
        assert np.max(np.abs(lie_bracket(Xr, XH, x.vector()).components)) <= 1e-9


def test_lie_bracket_of_non_commuting_fields():
    # [x d/dy, d/dx] = -d/dy
    b = lie_bracket(lambda x: [0.0, x[0]], lambda x: [1.0, 0.0], [0.3, 0.4])
    assert b.components.tolist() == [0.0, -1.0]


def test_lie_derivative_of_omega_under_dilation():
    w = ScalingWeights(2.0, 1.0, (1.0,))
    L = lie_derivative_closed_two_form(dilation_vector_field(w), canonical_omega(2),
                                       [1.0, 1.0, 1.0, 1.0])
    assert np.array_equal(L, 2.0 * canonical_omega(2))


def test_lie_derivative_zero_field_and_charge_field(unit_weights, demo_state):
    W = canonical_omega(3)
    zero = lie_derivative_closed_two_form(lambda x: [0.0] * 6, W, demo_state.vector())
    assert not np.any(zero)
    LG = lie_derivative_closed_two_form(charge_vector_field(unit_weights), W,
                                        demo_state.vector())
    assert not np.any(LG)


# -- properties ---------------------------------------------------------------

coef = st.floats(-2, 2, allow_nan=False)
poly = st.tuples(*[coef] * 15)
point = st.lists(st.floats(-1.5, 1.5), min_size=4, max_size=4)


def quadratic(c):
    """General polynomial of degree <= 2 in four variables."""
    def f(x):
        out = c[0]
        k = 1
        for i in range(4):
            out = out + c[k] * x[i]
            k += 1
        for i, j in ((0, 1), (0, 2), (1, 3), (2, 3), (0, 3), (1, 2)):
            out = out + c[k] * x[i] * x[j]
            k += 1
        for i in range(4):
            out = out + c[k] * x[i] * x[i]
            k += 1
        return out
    return f


@given(poly, poly, point)
@settings(max_examples=50, deadline=None)
def test_antisymmetry(cf, cg, x):
    f, g = quadratic(cf), quadratic(cg)
    assert poisson_bracket(f, g, x) + poisson_bracket(g, f, x) == 0.0


@given(poly, poly, poly, point)
@settings(max_examples=50, deadline=None)
def test_jacobi_identity(cf, cg, ch, x):
    f, g, h = quadratic(cf), quadratic(cg), quadratic(ch)

    def br(a, b):
        return lambda y: poisson_bracket(a, b, y)

    total = (poisson_bracket(f, br(g, h), x) + poisson_bracket(g, br(h, f), x)
             + poisson_bracket(h, br(f, g), x))
    assert abs(real(total)) <= 1e-9


@given(poly, poly, point)
@settings(max_examples=50, deadline=None)
def test_bracket_is_derivative_along_hamiltonian_field(cf, cg, x):
    f, g = quadratic(cf), quadratic(cg)
    X = hamiltonian_field(f, x, "df").components
    assert abs(poisson_bracket(f, g, x) - directional(g, x, X.tolist())) <= 1e-12
    assert abs(poisson_bracket(f, g, x)
               - vector_field_apply(hamiltonian_vector_field(f, "df"), g, x)) <= 1e-12
