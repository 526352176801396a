"""Contactization of canonical charts and Legendre submanifolds.

Contact points are ordered ``(u, q^1..q^n, p_1..p_n)`` with contact form
``alpha = du - sum p_i dq^i`` and Reeb field ``d/du``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .calculus import exterior_derivative, grad, gradient, grid_points, jacobian
from .hyperdual import DomainError, real
from .ode import integrate
from .report import CheckReport, reduce_residuals
from .symplectic import CanonicalChart


class HomogeneityError(ValueError):
    """The generating function is not scale invariant under the given weights."""


@dataclass(frozen=True)
class ScalingWeights:
    """Degrees of homogeneity: energy ``r``, scale coordinate ``rho``, coordinates ``coords``."""

    r: float
    rho: float
    coords: tuple[float, ...]

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("scale-coordinate degree rho must be positive")
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if not self.coords:
            raise ValueError("need at least one coordinate weight")

    @property
    def n(self) -> int:
        return len(self.coords)

    @classmethod
    def uniform(cls, n: int, r: float = 1.0, rho: float = 1.0, w: float = 1.0) -> "ScalingWeights":
        return cls(r, rho, (w,) * n)


@dataclass
class ContactChart:
    base: CanonicalChart
    fiber: str = "u"

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def names(self) -> tuple[str, ...]:
        return (self.fiber,) + self.base.names

    def alpha(self, x: Sequence) -> list:
        """Components of ``alpha`` at ``x``: ``(1, -p, 0)``."""
        n = self.n
        return [1.0] + [-c for c in x[1 + n:]] + [0.0] * n

    def reeb(self, x: Sequence) -> np.ndarray:
        r = np.zeros(self.dim)
        r[0] = 1.0
        return r

    def d_alpha(self, x: Sequence) -> np.ndarray:
        return exterior_derivative(self.alpha, x)

    def pullback_omega(self) -> np.ndarray:
        """``pi^* omega`` as a coefficient matrix on the contact chart."""
        w = np.zeros((self.dim, self.dim))
        w[1:, 1:] = self.base.omega
        return w

    def structure_residual(self, x: Sequence) -> float:
        """Max of ``|d alpha - pi^* omega|``, ``|alpha(R) - 1|`` and ``|i_R d alpha|``."""
        da = self.d_alpha(x)
        R = self.reeb(x)
        return max(
            float(np.max(np.abs(da - self.pullback_omega()))),
            abs(float(np.dot(self.alpha(x), R)) - 1.0),
            float(np.max(np.abs(R @ da))),
        )


def contactize(chart: CanonicalChart, seed: int = 0, samples: int = 10) -> ContactChart:
    """Product chart with ``alpha = du - theta``, checked at random points."""
    cc = ContactChart(chart)
    rng = np.random.default_rng(seed)
    for x in rng.uniform(-2.0, 2.0, size=(samples, cc.dim)):
        res = cc.structure_residual(x.tolist())
        if res > 1e-12:
            raise RuntimeError(f"contact structure check failed (residual {res:.3e})")
    return cc


@dataclass
class LegendreSubmanifold:
    """Graph ``u = f(q), p = grad f(q)`` of a generating function."""

    generating: Callable
    n: int
    box: list[tuple[float, float]] | None = None
    chart: ContactChart = field(default=None)

    def __post_init__(self):
        if self.chart is None:
            self.chart = ContactChart(CanonicalChart(self.n))

    def embed(self, q: Sequence) -> np.ndarray:
        """``i_Lambda(q) = (u(q), q, du/dq)``."""
        q = list(map(float, q))
        return np.array([real(self.generating(q))] + q + grad(self.generating, q).tolist())

    def momenta(self, q: Sequence):
        return gradient(self.generating, q)

    def legendre_residual(self, q: Sequence) -> float:
        """Max over tangent directions of ``|(i_Lambda^* alpha)(e_k)|``."""
        def embedding(y):
            return [self.generating(y)] + list(y) + self.momenta(y)

        J = jacobian(embedding, q)
        alpha = self.chart.alpha(self.embed(q))
        return float(np.max(np.abs(np.asarray(alpha) @ J)))

    def project(self, point: Sequence) -> np.ndarray:
        """``rho(u, q, p) = (q, p)``."""
        return np.asarray(point[1:], dtype=float)

    def lift(self, qp: Sequence) -> np.ndarray:
        """``rho^-1(q, p) = (u(q), q, p)`` for points of the projected graph."""
        q = list(map(float, qp[:self.n]))
        return np.array([real(self.generating(q))] + list(map(float, qp)))

    def isotropy_residual(self, q: Sequence) -> float:
        if self.n == 1:
            return 0.0
        H = jacobian(self.momenta, q)
        return float(np.max(np.abs(H - H.T)))


def legendre_from_generating(u: Callable, n: int, box=None) -> LegendreSubmanifold:
    return LegendreSubmanifold(u, n, list(box) if box is not None else None)


def _box(lam: LegendreSubmanifold, box):
    box = box if box is not None else lam.box
    if box is None:
        raise ValueError("no sampling box given")
    return box


def verify_legendre(lam: LegendreSubmanifold, box=None, grid: int = 5,
                    tolerance: float = 1e-12, system: str = "legendre") -> CheckReport:
    pts = grid_points(_box(lam, box), grid)
    return reduce_residuals(system, "legendre",
                            ((q, lam.legendre_residual(q)) for q in pts), tolerance)


def project_to_lagrangian(lam: LegendreSubmanifold, box=None, grid: int = 5,
                          tolerance: float = 1e-12, system: str = "legendre") -> CheckReport:
    """Isotropy of ``L = pi(Lambda)``: max ``|dp_i/dq^j - dp_j/dq^i|``."""
    pts = grid_points(_box(lam, box), grid)
    return reduce_residuals(system, "projection-isotropy",
                            ((q, lam.isotropy_residual(q)) for q in pts), tolerance)


def homogeneity_defect(u: Callable, weights: ScalingWeights, q: Sequence) -> float:
    """``|sum_i r_i q^i du/dq^i|``; zero when ``u`` is scale invariant."""
    g = grad(u, q)
    return abs(float(sum(w * qi * gi for w, qi, gi in zip(weights.coords, q, g))))


@dataclass
class RestrictedRecord:
    step: int
    t: float
    u: float
    q: np.ndarray
    p: np.ndarray


def restricted_flow(lam: LegendreSubmanifold, weights: ScalingWeights, q0: Sequence,
                    C: float = 1.0, t_end: float = 1.0, dt: float = 1e-3,
                    homogeneity_tol: float = 1e-9) -> list[RestrictedRecord]:
    """Integrate ``u' = 0, q' = -C r_i q^i, p' = C r_i p_i`` from the graph over ``q0``.

    ``u`` is recorded from the generating function at ``q(t)`` and ``p`` from
    the integrated state, so both drifts are observable.
    """
    if weights.n != lam.n:
        raise ValueError("weights and submanifold dimension differ")
    q0 = list(map(float, q0))
    defect = homogeneity_defect(lam.generating, weights, q0)
    if defect > homogeneity_tol:
        raise HomogeneityError(
            f"generating function is not homogeneous of degree zero at q0 "
            f"(|sum r_i q^i du/dq^i| = {defect:.3e})")
    n = lam.n
    rates = np.array(weights.coords) * C
    y0 = lam.embed(q0)

    def rhs(y):
        dy = np.zeros_like(y)
        dy[1:1 + n] = -rates * y[1:1 + n]
        dy[1 + n:] = rates * y[1 + n:]
        return dy

    def record(step, t, y):
        q = y[1:1 + n].copy()
        return RestrictedRecord(step, t, real(lam.generating(q.tolist())), q, y[1 + n:].copy())

    return integrate(rhs, y0, t_end, dt, record)


def legendre_drift(lam: LegendreSubmanifold, records: list[RestrictedRecord]) -> float:
    """Max over records of ``|p_i(t) - du/dq^i(q(t))|``."""
    return max(float(np.max(np.abs(r.p - grad(lam.generating, r.q.tolist())))) for r in records)


def energy_drift(records: list[RestrictedRecord]) -> float:
    u0 = records[0].u
    return max(abs(r.u - u0) for r in records)
