"""Symplectization: global scale coordinate, dilations, Noether charge, gauge fixing.

Extended points are vectors ordered ``(Q^1..Q^n, Z, P_1..P_n, mu)`` so that
``omega' = dZ ^ dmu + sum dQ^i ^ dP_i`` has the canonical coefficient
matrix.  Functions that build scalar fields on that chart (charge,
invariants, process Hamiltonian) return callables that accept hyper-dual
vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from . import hyperdual as hd
from .calculus import canonical_omega, directional, exterior_derivative, gradient, jacobian
from .contact import ScalingWeights
from .hyperdual import HyperDual, depth, real
from .ode import integrate
from .symplectic import (
    SmoothMap,
    VectorFieldValue,
    hamiltonian_vector_field,
)


def split(x: Sequence, n: int):
    """``(Q, Z, P, mu)`` from an extended vector."""
    return list(x[:n]), x[n], list(x[n + 1:2 * n + 1]), x[2 * n + 1]


@dataclass(frozen=True)
class ExtendedState:
    Z: float
    mu: float
    Q: tuple[float, ...]
    P: tuple[float, ...]

    def __post_init__(self):
        if not self.Z > 0:
            raise ValueError(f"scale coordinate must be positive, got Z={self.Z}")
        object.__setattr__(self, "Q", tuple(float(c) for c in self.Q))
        object.__setattr__(self, "P", tuple(float(c) for c in self.P))
        if len(self.Q) != len(self.P):
            raise ValueError("Q and P must have the same length")

    @property
    def n(self) -> int:
        return len(self.Q)

    def vector(self) -> list[float]:
        return [*self.Q, float(self.Z), *self.P, float(self.mu)]

    @classmethod
    def from_vector(cls, x: Sequence, n: int | None = None) -> "ExtendedState":
        if n is None:
            n = (len(x) - 2) // 2
        Q, Z, P, mu = split([real(c) for c in x], n)
        return cls(Z, mu, tuple(Q), tuple(P))

    def replace(self, **kw) -> "ExtendedState":
        d = dict(Z=self.Z, mu=self.mu, Q=self.Q, P=self.P)
        d.update(kw)
        return ExtendedState(**d)


@dataclass
class ExtendedEnergy:
    """``U(Q, Z) = Z^(r/rho) u(Q^i / Z^(r_i/rho))``, homogeneous of degree ``r``.

    ``box`` is the sampling region of the scale-invariant coordinates ``q``.
    """

    u: Callable
    weights: ScalingWeights
    box: list[tuple[float, float]] | None = None

    @property
    def n(self) -> int:
        return self.weights.n

    def value(self, Q: Sequence, Z):
        w = self.weights
        q = [Qi * hd.power(Z, -ri / w.rho) for Qi, ri in zip(Q, w.coords)]
        return hd.power(Z, w.r / w.rho) * self.u(q)

    def __call__(self, x: Sequence):
        Q, Z, _, _ = split(x, self.n)
        return self.value(Q, Z)

    def dZ(self, Q: Sequence, Z):
        """``dU/dZ``; works when ``Q``, ``Z`` already carry perturbations."""
        level = max([depth(Z)] + [depth(c) for c in Q]) + 1
        out = self.value(Q, HyperDual(Z, 1.0, 0.0, 0.0, level))
        return out.d1 if depth(out) == level else 0.0

    def gradient(self, Q: Sequence, Z) -> tuple[list, float]:
        """``(dU/dQ, dU/dZ)`` at a real point."""
        n = self.n
        g = gradient(lambda y: self.value(y[:n], y[n]), list(Q) + [Z])
        return [real(c) for c in g[:n]], real(g[n])

    def graph_state(self, Q: Sequence, Z: float) -> ExtendedState:
        """Point of the Lagrangian graph ``P = dU/dQ, mu = dU/dZ`` over ``(Q, Z)``."""
        P, mu = self.gradient(Q, Z)
        return ExtendedState(Z, mu, tuple(Q), tuple(P))

    def graph_state_from_invariants(self, q: Sequence, Z: float) -> ExtendedState:
        w = self.weights
        Q = [qi * Z ** (ri / w.rho) for qi, ri in zip(q, w.coords)]
        return self.graph_state(Q, Z)


def symplectize_point(u: float, q: Sequence, p: Sequence, t: float,
                      weights: ScalingWeights) -> ExtendedState:
    """Image of ``(t, u, q, p)`` in the extended chart."""
    w = weights
    vec = symplectization_vector(w, [t, u, *q, *p])
    return ExtendedState.from_vector(vec, w.n)


def symplectization_vector(weights: ScalingWeights, y: Sequence) -> list:
    """``(t, u, q, p) -> (Q, Z, P, mu)``, generic in the coordinate type."""
    w, n = weights, weights.n
    t, u, q, p = y[0], y[1], y[2:2 + n], y[2 + n:2 + 2 * n]
    Z = hd.exp(w.rho * t)
    euler = w.r * u
    for ri, pi, qi in zip(w.coords, p, q):
        euler = euler - ri * pi * qi
    mu = (1.0 / w.rho) * hd.exp((w.r - w.rho) * t) * euler
    Q = [hd.exp(ri * t) * qi for ri, qi in zip(w.coords, q)]
    P = [hd.exp((w.r - ri) * t) * pi for ri, pi in zip(w.coords, p)]
    return [*Q, Z, *P, mu]


def symplectization_map(weights: ScalingWeights) -> SmoothMap:
    dim = 2 * weights.n + 2
    return SmoothMap(lambda y: symplectization_vector(weights, y), dim, dim, "symplectization")


def source_form(weights: ScalingWeights) -> Callable[[Sequence], np.ndarray]:
    """Coefficient matrix of ``d(e^(r t) alpha)`` on ``(t, u, q, p)``."""
    n, r = weights.n, weights.r

    def one_form(y):
        scale = hd.exp(r * y[0])
        return [0.0, scale] + [-scale * pi for pi in y[2 + n:]] + [0.0] * n

    return lambda y: exterior_derivative(one_form, y)


def euler_residual(x: ExtendedState, U: ExtendedEnergy) -> float:
    """``|r U - rho mu Z - sum r_i P_i Q^i|``."""
    w = U.weights
    rhs = w.rho * x.mu * x.Z + sum(ri * Pi * Qi for ri, Pi, Qi in zip(w.coords, x.P, x.Q))
    return abs(w.r * real(U.value(x.Q, x.Z)) - rhs)


def homogeneity_residual(U: ExtendedEnergy, x: ExtendedState, lam: float) -> float:
    """``|U(lam^r_i Q, lam^rho Z) - lam^r U(Q, Z)|``."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    w = U.weights
    Qs = [lam ** ri * Qi for ri, Qi in zip(w.coords, x.Q)]
    return abs(real(U.value(Qs, lam ** w.rho * x.Z)) - lam ** w.r * real(U.value(x.Q, x.Z)))


def dilation_vector_field(weights: ScalingWeights) -> Callable[[Sequence], list]:
    """``X_r``: components ``(r_i Q^i, rho Z, (r - r_i) P_i, (r - rho) mu)``."""
    w, n = weights, weights.n

    def X(x):
        Q, Z, P, mu = split(x, n)
        return ([ri * Qi for ri, Qi in zip(w.coords, Q)] + [w.rho * Z]
                + [(w.r - ri) * Pi for ri, Pi in zip(w.coords, P)] + [(w.r - w.rho) * mu])

    return X


def dilation_field(x: ExtendedState, weights: ScalingWeights) -> VectorFieldValue:
    v = x.vector()
    return VectorFieldValue(v, dilation_vector_field(weights)(v))


def charge_vector_field(weights: ScalingWeights) -> Callable[[Sequence], list]:
    """Closed form of ``X_G``: ``(r_i Q^i, rho Z, -r_i P_i, -rho mu)``."""
    w, n = weights, weights.n

    def X(x):
        Q, Z, P, mu = split(x, n)
        return ([ri * Qi for ri, Qi in zip(w.coords, Q)] + [w.rho * Z]
                + [-ri * Pi for ri, Pi in zip(w.coords, P)] + [-w.rho * mu])

    return X


def dilation_map(weights: ScalingWeights, lam: float) -> SmoothMap:
    """:func:`apply_dilation` as a map on extended vectors."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    w, n = weights, weights.n
    scale = ([lam ** ri for ri in w.coords] + [lam ** w.rho]
             + [lam ** (w.r - ri) for ri in w.coords] + [lam ** (w.r - w.rho)])
    return SmoothMap(lambda x: [c * xi for c, xi in zip(scale, x)], 2 * n + 2, 2 * n + 2,
                     f"dilation({lam:g})")


def apply_dilation(x: ExtendedState, lam: float, weights: ScalingWeights) -> ExtendedState:
    """``Q -> lam^r_i Q, Z -> lam^rho Z, P -> lam^(r-r_i) P, mu -> lam^(r-rho) mu``."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    w = weights
    return ExtendedState(
        lam ** w.rho * x.Z,
        lam ** (w.r - w.rho) * x.mu,
        tuple(lam ** ri * Qi for ri, Qi in zip(w.coords, x.Q)),
        tuple(lam ** (w.r - ri) * Pi for ri, Pi in zip(w.coords, x.P)),
    )


def charge_function(weights: ScalingWeights) -> Callable[[Sequence], object]:
    """``G = rho mu Z + sum r_i P_i Q^i`` as a field on extended vectors."""
    w, n = weights, weights.n

    def G(x):
        Q, Z, P, mu = split(x, n)
        total = w.rho * mu * Z
        for ri, Pi, Qi in zip(w.coords, P, Q):
            total = total + ri * Pi * Qi
        return total

    return G


def noether_charge(x: ExtendedState, weights: ScalingWeights) -> float:
    return float(real(charge_function(weights)(x.vector())))


def invariant_functions(weights: ScalingWeights) -> tuple[list[Callable], list[Callable]]:
    """``q^i = Z^(-r_i/rho) Q^i`` and ``p_i = Z^((r_i-r)/rho) P_i`` as fields."""
    w, n = weights, weights.n

    def q_fn(i):
        return lambda x: hd.power(x[n], -w.coords[i] / w.rho) * x[i]

    def p_fn(i):
        return lambda x: hd.power(x[n], (w.coords[i] - w.r) / w.rho) * x[n + 1 + i]

    return [q_fn(i) for i in range(n)], [p_fn(i) for i in range(n)]


def quotient_invariants(x: ExtendedState, weights: ScalingWeights) -> tuple[np.ndarray, np.ndarray]:
    qs, ps = invariant_functions(weights)
    v = x.vector()
    return (np.array([real(f(v)) for f in qs]), np.array([real(f(v)) for f in ps]))


def process_hamiltonian_function(U: ExtendedEnergy) -> Callable[[Sequence], object]:
    """``H = Z^(1 - r/rho) rho (mu r U - dU/dZ G)``.

    ``mu r U`` stands for ``mu`` times the charge restricted to the graph,
    where ``G = r U``; it is continued off the graph as a function of
    ``(Q, Z)``.  This ``H`` vanishes on the graph, commutes with ``G`` and
    satisfies ``X_r(H) = r H``.
    """
    w, n = U.weights, U.n
    G = charge_function(w)

    def H(x):
        Q, Z, _, mu = split(x, n)
        inner = mu * (w.r * U.value(Q, Z)) - U.dZ(Q, Z) * G(x)
        return hd.power(Z, 1.0 - w.r / w.rho) * w.rho * inner

    return H


def process_hamiltonian(x: ExtendedState, U: ExtendedEnergy) -> float:
    return float(real(process_hamiltonian_function(U)(x.vector())))


def hamiltonian_homogeneity_residual(x: ExtendedState, U: ExtendedEnergy) -> float:
    """``|X_r(H) - r H|``."""
    H = process_hamiltonian_function(U)
    v = x.vector()
    XrH = directional(H, v, dilation_vector_field(U.weights)(v))
    return abs(real(XrH) - U.weights.r * real(H(v)))


@dataclass
class ExtendedRecord:
    step: int
    t: float
    state: ExtendedState
    G: float
    H: float
    U: float


Generator = Literal["X_G", "X_H"]


def hamiltonian_flow(x0: ExtendedState, generator: Generator, U: ExtendedEnergy,
                     t_end: float = 1.0, dt: float = 1e-3) -> list[ExtendedRecord]:
    """RK4 flow of ``X_G`` (closed form) or ``X_H`` (from ``i_X omega' = -dH``)."""
    w = U.weights
    if x0.n != w.n:
        raise ValueError("state and weights dimension differ")
    H = process_hamiltonian_function(U)
    G = charge_function(w)
    if generator == "X_G":
        field = charge_vector_field(w)
    elif generator == "X_H":
        field = hamiltonian_vector_field(H, "-df")
    else:
        raise ValueError(f"unknown generator {generator!r}; use 'X_G' or 'X_H'")

    def rhs(y):
        return np.array([real(c) for c in field(y.tolist())])

    def record(step, t, y):
        v = y.tolist()
        state = ExtendedState.from_vector(v, w.n)
        return ExtendedRecord(step, t, state, float(real(G(v))), float(real(H(v))),
                              float(real(U(v))))

    return integrate(rhs, x0.vector(), t_end, dt, record)


@dataclass
class GaugeFixed:
    representative: ExtendedState
    contact_point: np.ndarray  # (u, q, p)
    factor: float


def contact_point(x: ExtendedState, weights: ScalingWeights) -> np.ndarray:
    """Dilation-invariant ``(u, q, p)`` with ``u = Z^(-r/rho) G / r``."""
    if weights.r == 0:
        raise ValueError("energy degree r = 0 leaves u undetermined by the charge")
    q, p = quotient_invariants(x, weights)
    u = noether_charge(x, weights) / (weights.r * x.Z ** (weights.r / weights.rho))
    return np.concatenate([[u], q, p])


def gauge_fix(x: ExtendedState, Z0: float, weights: ScalingWeights) -> GaugeFixed:
    """Slide ``x`` along its dilation orbit to ``Z = Z0``.

    ``factor = r Z0^(r/rho)`` is the ratio between the pullback of
    ``i_{X_r} omega'`` to the slice and ``alpha``.
    """
    if not Z0 > 0:
        raise ValueError("gauge value Z0 must be positive")
    lam = (Z0 / x.Z) ** (1.0 / weights.rho)
    rep = apply_dilation(x, lam, weights)
    rep = rep.replace(Z=Z0)
    return GaugeFixed(rep, contact_point(rep, weights), weights.r * Z0 ** (weights.r / weights.rho))


def gauge_embedding(weights: ScalingWeights, Z0: float) -> Callable[[Sequence], list]:
    """Section ``(u, q, p) -> (Q, Z0, P, mu)`` of the slice ``Z = Z0``."""
    t0 = np.log(Z0) / weights.rho

    def embed(y):
        return symplectization_vector(weights, [t0, *y])

    return embed


def gauge_pullback_residual(y: Sequence, Z0: float, weights: ScalingWeights) -> float:
    """``|s^*(i_{X_r} omega') - r Z0^(r/rho) alpha|`` at contact point ``y``."""
    n = weights.n
    embed = gauge_embedding(weights, Z0)
    x = [real(c) for c in embed(list(y))]
    X = dilation_vector_field(weights)(x)
    omega = canonical_omega(n + 1)
    one_form = np.asarray(X) @ omega
    pulled = one_form @ jacobian(embed, list(y))
    alpha = np.array([1.0] + [-c for c in y[1 + n:]] + [0.0] * n)
    factor = weights.r * Z0 ** (weights.r / weights.rho)
    return float(np.max(np.abs(pulled - factor * alpha)))


def random_states(U: ExtendedEnergy, count: int = 100, seed: int = 42, on_graph: bool = True,
                  z_range: tuple[float, float] = (0.5, 4.0)) -> list[ExtendedState]:
    """Seeded sample of extended states.

    ``Z`` is log-uniform in ``z_range``; the invariant coordinates ``q`` are
    uniform in the energy's box so ``u`` stays in its domain; off the graph
    ``P`` and ``mu`` are uniform in ``[-2, 2]``.
    """
    if U.box is None:
        raise ValueError("extended energy needs a box for its invariant coordinates")
    rng = np.random.default_rng(seed)
    lo = np.array([a for a, _ in U.box])
    hi = np.array([b for _, b in U.box])
    w = U.weights
    out = []
    for _ in range(count):
        Z = float(np.exp(rng.uniform(np.log(z_range[0]), np.log(z_range[1]))))
        q = rng.uniform(lo, hi)
        if on_graph:
            out.append(U.graph_state_from_invariants(q.tolist(), Z))
        else:
            Q = [qi * Z ** (ri / w.rho) for qi, ri in zip(q.tolist(), w.coords)]
            P = rng.uniform(-2.0, 2.0, size=w.n)
            mu = float(rng.uniform(-2.0, 2.0))
            out.append(ExtendedState(Z, mu, tuple(Q), tuple(P.tolist())))
    return out
