"""Equations of state as primary constraints ``phi_i = p_i - f_i(q)``.

Covers the involutivity and Maxwell (isotropy) checks, reconstruction of
the internal energy by line integrals, the Legendre transform as a
canonical transformation, and the shear map taking the ideal gas to the
van der Waals-type system.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import hyperdual as hd
from .calculus import grad, grid_points, jacobian
from .hyperdual import DomainError
from .report import DEFAULT_TOLERANCE, CheckReport, reduce_residuals
from .symplectic import CanonicalChart, SmoothMap, poisson_bracket

Box = Sequence[tuple[float, float]]

BUILTIN_SYSTEMS = ("ideal-gas", "paper-vdw")


@dataclass
class ConstraintSystem:
    """``n`` equations of state ``p_i = f_i(q)`` on a ``2n``-dimensional chart.

    ``energy`` is an optional closed-form potential with ``grad energy = f``;
    ``box`` is the default sampling region in ``q``.
    """

    name: str
    state_functions: list[Callable]
    energy: Callable | None = None
    box: list[tuple[float, float]] | None = None
    chart: CanonicalChart = field(default=None)

    def __post_init__(self):
        if self.chart is None:
            self.chart = CanonicalChart(len(self.state_functions))
        if self.chart.n != len(self.state_functions):
            raise ValueError("need one state function per degree of freedom")

    @property
    def n(self) -> int:
        return self.chart.n

    def state(self, q: Sequence) -> list:
        return [f(q) for f in self.state_functions]

    def constraint(self, i: int) -> Callable:
        n, f = self.n, self.state_functions[i]

        def phi(x):
            return x[n + i] - f(x[:n])

        return phi

    def surface_point(self, q: Sequence) -> list[float]:
        return list(map(float, q)) + [float(v) for v in self.state(q)]


@dataclass(frozen=True)
class IdealGasParams:
    A: float = 1.0

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError("ideal gas needs A > 0")


@dataclass(frozen=True)
class VdwParams:
    A: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if not self.A > 0 or not self.b > 0:
            raise ValueError("van der Waals parameters need A > 0 and b > 0")


def ideal_gas_energy(A: float = 1.0) -> Callable:
    """``u = (3/2) A exp(2 q1 / 3) q2^(-2/3)``."""
    return lambda q: 3.0 / 2.0 * A * hd.exp(2.0 / 3.0 * q[0]) * hd.power(q[1], -(2.0 / 3.0))


def ideal_gas(params: IdealGasParams = IdealGasParams()) -> ConstraintSystem:
    A = params.A
    temperature = lambda q: A * hd.exp(2.0 / 3.0 * q[0]) * hd.power(q[1], -(2.0 / 3.0))
    minus_pressure = lambda q: -A * hd.exp(2.0 / 3.0 * q[0]) * hd.power(q[1], -(5.0 / 3.0))
    return ConstraintSystem("ideal-gas", [temperature, minus_pressure],
                            energy=ideal_gas_energy(A), box=[(-1.0, 1.0), (0.5, 4.0)])


def vdw_printed_energy(params: VdwParams) -> Callable:
    """``(3/2) A exp(2 q1 / 3) (q2 - b)^(-2/3)``, the energy as usually quoted.

    Its gradient misses the ``q2^-2`` shift of ``p2``; the potential whose
    gradient is the pulled-back state is :func:`vdw_energy`.
    """
    A, b = params.A, params.b
    return lambda q: 3.0 / 2.0 * A * hd.exp(2.0 / 3.0 * q[0]) * hd.power(q[1] - b, -(2.0 / 3.0))


def vdw_energy(params: VdwParams) -> Callable:
    """Exact potential of the pulled-back system: printed energy ``- 1/q2``."""
    printed = vdw_printed_energy(params)
    return lambda q: printed(q) - 1.0 / q[1]


def paper_vdw(params: VdwParams = VdwParams()) -> ConstraintSystem:
    A, b = params.A, params.b
    f1 = lambda q: A * hd.exp(2.0 / 3.0 * q[0]) * hd.power(q[1] - b, -(2.0 / 3.0))
    f2 = lambda q: hd.power(q[1], -2.0) - A * hd.exp(2.0 / 3.0 * q[0]) * hd.power(q[1] - b, -(5.0 / 3.0))
    return ConstraintSystem("paper-vdw", [f1, f2], energy=vdw_energy(params),
                            box=[(-1.0, 1.0), (b + 0.5, b + 3.0)])


def ideal_to_vdw_map(params: VdwParams) -> SmoothMap:
    """``psi(q', p') = (q, p)``: shift ``q2`` by ``-b`` and ``p2`` by ``-q2'^-2``."""
    b = params.b

    def psi(x):
        q1, q2, p1, p2 = x
        return [q1, q2 - b, p1, p2 - hd.power(q2, -2.0)]

    return SmoothMap(psi, 4, 4, "psi")


def map_ideal_to_vdw(params: VdwParams) -> tuple[SmoothMap, ConstraintSystem]:
    """The shear map and the constraint system it pulls the ideal gas back to."""
    return ideal_to_vdw_map(params), paper_vdw(params)


def builtin_system(name: str, constants: dict | None = None) -> ConstraintSystem:
    constants = constants or {}
    if name == "ideal-gas":
        return ideal_gas(IdealGasParams(constants.get("A", 1.0)))
    if name == "paper-vdw":
        return paper_vdw(VdwParams(constants.get("A", 1.0), constants.get("b", 1.0)))
    raise KeyError(f"unknown built-in system {name!r}; known: {', '.join(BUILTIN_SYSTEMS)}")


# -- checks ---------------------------------------------------------------

def _box(sys: ConstraintSystem, box: Box | None) -> Box:
    box = box if box is not None else sys.box
    if box is None:
        raise ValueError(f"system {sys.name!r} has no default box")
    return box


def _sample_points(sys, box, grid, p_box):
    if p_box is None:
        return [sys.surface_point(q) for q in grid_points(_box(sys, box), grid)]
    return [list(x) for x in grid_points(list(_box(sys, box)) + list(p_box), grid)]


def involutivity_report(sys: ConstraintSystem, box: Box | None = None, grid: int = 5,
                        tolerance: float = DEFAULT_TOLERANCE, p_box: Box | None = None
                        ) -> CheckReport:
    """Max of ``|{phi_i, phi_j}|`` over ``i < j`` on the constraint surface.

    With ``p_box`` the brackets are sampled on the full phase-space grid
    instead of on the surface ``p = f(q)``.
    """
    phis = [sys.constraint(i) for i in range(sys.n)]
    points = _sample_points(sys, box, grid, p_box)

    def pairs():
        for x in points:
            worst = 0.0
            for i in range(sys.n):
                for j in range(i + 1, sys.n):
                    worst = max(worst, abs(poisson_bracket(phis[i], phis[j], x, sys.chart)))
            yield x, worst

    return reduce_residuals(sys.name, "involutivity", pairs(), tolerance)


def maxwell_residual(sys: ConstraintSystem, q: Sequence) -> float:
    J = jacobian(lambda y: sys.state(y), q)
    return float(np.max(np.abs(J - J.T))) if sys.n > 1 else 0.0


def maxwell_isotropy_report(sys: ConstraintSystem, box: Box | None = None, grid: int = 5,
                            tolerance: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Max of ``|dp_i/dq^j - dp_j/dq^i|``: the pullback of omega to the surface."""
    pts = grid_points(_box(sys, box), grid)
    return reduce_residuals(sys.name, "maxwell",
                            ((q, maxwell_residual(sys, q)) for q in pts), tolerance)


_GL_NODES, _GL_WEIGHTS = (c.tolist() for c in np.polynomial.legendre.leggauss(16))


def _gauss(fn: Callable, a: float, b: float):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    total = 0.0
    for s, w in zip(_GL_NODES, _GL_WEIGHTS):
        total = total + w * fn(mid + half * s)
    return half * total


def _integrate(fn: Callable, atol: float = 1e-10, max_level: int = 12):
    """Composite 16-point Gauss-Legendre on [0, 1], halving until stable.

    ``fn`` may return hyper-duals; only the real parts steer refinement.
    """
    pieces = 1
    prev = _gauss(fn, 0.0, 1.0)
    for _ in range(max_level):
        pieces *= 2
        edges = np.linspace(0.0, 1.0, pieces + 1).tolist()
        cur = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            cur = cur + _gauss(fn, a, b)
        if abs(hd.real(cur) - hd.real(prev)) < atol:
            return cur
        prev = cur
    return prev


def line_integral(one_form: Callable, vertices: Sequence[Sequence]):
    """``int sum_k b_k(q) dq^k`` along the polyline through ``vertices``.

    Vertices may carry hyper-dual coordinates, which makes the integral
    differentiable with respect to its endpoints.
    """
    total = 0.0
    for a, b in zip(vertices[:-1], vertices[1:]):
        delta = [bk - ak for ak, bk in zip(a, b)]
        if not any(hd.real(d) or hd.depth(d) for d in delta):
            continue

        def integrand(s, a=a, delta=delta):
            q = [ak + s * dk for ak, dk in zip(a, delta)]
            out = 0.0
            for c, d in zip(one_form(q), delta):
                out = out + c * d
            return out

        total = total + _integrate(integrand)
    return total


def reconstruct_energy(sys: ConstraintSystem, q0: Sequence, q1: Sequence,
                       via: Sequence[Sequence[float]] = ()) -> float:
    """``int sum_i f_i dq^i`` from ``q0`` to ``q1``, through optional ``via`` vertices.

    For a system passing the Maxwell check this is ``u(q1) - u(q0)`` and does
    not depend on the path.
    """
    vertices = [list(q0), *map(list, via), list(q1)]
    try:
        return hd.real(line_integral(sys.state, vertices))
    except DomainError as err:
        err.message = f"path leaves the domain: {err.message}"
        raise


def reconstructed_energy(sys: ConstraintSystem, base: Sequence[float]) -> Callable:
    """Scalar field ``q -> int_base^q f . dq`` along the straight segment."""
    base = list(map(float, base))
    return lambda q: line_integral(sys.state, [base, list(q)])


def path_independence_report(sys: ConstraintSystem, box: Box | None = None,
                             tolerance: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Straight path vs. L-shaped path between opposite corners of the box.

    When a closed-form energy is available both integrals are also compared
    to the energy difference.
    """
    box = _box(sys, box)
    q0 = [lo for lo, _ in box]
    q1 = [hi for _, hi in box]
    corner = [q1[0]] + q0[1:]
    straight = reconstruct_energy(sys, q0, q1)
    bent = reconstruct_energy(sys, q0, q1, via=[corner])
    residual = abs(straight - bent)
    if sys.energy is not None:
        du = float(sys.energy(q1)) - float(sys.energy(q0))
        residual = max(residual, abs(straight - du), abs(bent - du))
    return CheckReport(sys.name, "path-independence", 2, residual, tolerance, tuple(q1))


def energy_gradient_report(sys: ConstraintSystem, box: Box | None = None, grid: int = 5,
                           tolerance: float = 1e-8) -> CheckReport:
    """``|grad u - f|`` for ``u`` reconstructed by integration from the box corner."""
    box = _box(sys, box)
    u = reconstructed_energy(sys, [lo for lo, _ in box])

    def pairs():
        for q in grid_points(box, grid):
            g = grad(u, q)
            f = [float(v) for v in sys.state(q)]
            yield q, max(abs(a - b) for a, b in zip(g, f))

    return reduce_residuals(sys.name, "energy-gradient", pairs(), tolerance)


@dataclass
class LegendreTransformResult:
    index: int
    points: list[tuple]
    values: list[float]
    max_residual: float


def legendre_canonical_transform(sys: ConstraintSystem, index: int,
                                 points: Sequence[Sequence[float]]) -> LegendreTransformResult:
    """Potential ``u - p_i q^i`` (no sum) at ``points`` on the surface.

    The transform ``(q^i, p_i) -> (-p_i, q^i)`` changes the tautological form
    to ``theta' = theta - d(q^i p_i)``.  The residual compares the line
    integral of ``theta'`` restricted to the surface, taken along straight
    segments between consecutive points, with the difference of the new
    potential, and the integral of ``theta - theta'`` with ``Delta(q^i p_i)``.
    """
    if sys.energy is None:
        raise ValueError(f"system {sys.name!r} has no energy to transform")
    i = index
    if not 0 <= i < sys.n:
        raise IndexError(f"index {i} out of range for n={sys.n}")
    fi = sys.state_functions[i]
    pts = [tuple(map(float, q)) for q in points]

    def potential(q):
        return float(sys.energy(q)) - float(fi(q)) * q[i]

    def theta_prime(q):
        comps = [float(v) for v in sys.state(q)]
        dfi = grad(fi, q)
        comps = [c - q[i] * g for c, g in zip(comps, dfi)]
        comps[i] = -q[i] * float(dfi[i])
        return comps

    def theta_minus_prime(q):
        theta = [float(v) for v in sys.state(q)]
        return [a - b for a, b in zip(theta, theta_prime(q))]

    values = [potential(q) for q in pts]
    residual = 0.0
    for a, b, va, vb in zip(pts[:-1], pts[1:], values[:-1], values[1:]):
        residual = max(residual, abs(line_integral(theta_prime, [a, b]) - (vb - va)))
        dqp = float(fi(b)) * b[i] - float(fi(a)) * a[i]
        residual = max(residual, abs(line_integral(theta_minus_prime, [a, b]) - dqp))
    return LegendreTransformResult(i, pts, values, residual)


def tangent_map_residual(params: VdwParams, q_prime: Sequence, ideal_A: float | None = None
                         ) -> float:
    """``|[d phi] - I_2|`` at one point of the van der Waals surface.

    ``phi`` is the shear map restricted to that surface.  The image of each
    tangent basis vector ``e'_i = d/dq'^i + sum_k dp'_k/dq'^i d/dp'_k`` is
    expanded in the basis ``e_j`` of the ideal-gas surface at the image
    point; the residual also includes the component of the image that falls
    outside that tangent plane.
    """
    psi = ideal_to_vdw_map(params)
    vdw = paper_vdw(params)
    ideal = ideal_gas(IdealGasParams(params.A if ideal_A is None else ideal_A))
    qp = list(map(float, q_prime))
    x = vdw.surface_point(qp)
    J = jacobian(psi, x)
    dfp = jacobian(lambda y: vdw.state(y), qp)
    image = psi(x)
    q_img = [float(c) for c in image[:2]]
    df = jacobian(lambda y: ideal.state(y), q_img)
    n = 2
    residual = 0.0
    for i in range(n):
        e_prime = np.zeros(2 * n)
        e_prime[i] = 1.0
        e_prime[n:] = dfp[:, i]
        w = J @ e_prime
        coeffs = w[:n]
        span = coeffs @ np.vstack([np.concatenate([np.eye(n)[j], df[:, j]]) for j in range(n)])
        residual = max(residual, float(np.max(np.abs(coeffs - np.eye(n)[i]))),
                       float(np.max(np.abs(w - span))))
    # the restricted map must land on the ideal-gas surface
    residual = max(residual, max(abs(float(a) - float(b))
                                 for a, b in zip(image[n:], ideal.state(q_img))))
    return residual


def tangent_map_identity_check(params: VdwParams = VdwParams(), box: Box | None = None,
                               grid: int = 5, tolerance: float = DEFAULT_TOLERANCE
                               ) -> CheckReport:
    box = box if box is not None else [(-1.0, 1.0), (params.b + 0.5, params.b + 2.0)]
    pts = grid_points(box, grid)

    def pairs():
        for q in pts:
            try:
                yield q, tangent_map_residual(params, q)
            except DomainError as err:
                err.point = tuple(map(float, q))
                raise

    return reduce_residuals("paper-vdw", "tangent-map-identity", pairs(), tolerance)
