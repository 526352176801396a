"""Poisson brackets, Hamiltonian fields and symplectic checks on Darboux charts.

Points of a canonical chart are ordered ``(q^1..q^n, p_1..p_n)`` and the
symplectic form ``omega = -d theta = sum dq^i ^ dp_i`` has coefficient
matrix ``canonical_omega(n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .calculus import (
    canonical_omega,
    directional,
    exterior_derivative,
    gradient,
    jacobian,
)
from .hyperdual import DomainError, HyperDual, depth, real

Convention = Literal["df", "-df"]
FieldFunction = Callable[[Sequence], Sequence]


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalChart:
    n: int
    q_names: tuple[str, ...] = ()
    p_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ChartError("a canonical chart needs n >= 1")
        if not self.q_names:
            object.__setattr__(self, "q_names", tuple(f"q{i + 1}" for i in range(self.n)))
        if not self.p_names:
            object.__setattr__(self, "p_names", tuple(f"p{i + 1}" for i in range(self.n)))
        if len(self.q_names) != self.n or len(self.p_names) != self.n:
            raise ChartError("coordinate name count does not match n")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def names(self) -> tuple[str, ...]:
        return self.q_names + self.p_names

    @property
    def omega(self) -> np.ndarray:
        return canonical_omega(self.n)

    def check_point(self, x: Sequence) -> None:
        if len(x) != self.dim:
            raise ChartError(f"point has {len(x)} coordinates, chart has dimension {self.dim}")


def extended_chart(n: int) -> CanonicalChart:
    """Chart ``(Q^1..Q^n, Z, P_1..P_n, mu)`` of a symplectized system."""
    return CanonicalChart(
        n + 1,
        tuple(f"Q{i + 1}" for i in range(n)) + ("Z",),
        tuple(f"P{i + 1}" for i in range(n)) + ("mu",),
    )


@dataclass
class SmoothMap:
    fn: Callable[[Sequence], Sequence]
    dim_in: int
    dim_out: int
    name: str = ""

    def __call__(self, x: Sequence) -> list:
        out = list(self.fn(x))
        if len(out) != self.dim_out:
            raise ChartError(f"{self.name or 'map'} returned {len(out)} components, "
                             f"expected {self.dim_out}")
        return out

    def compose(self, inner: "SmoothMap") -> "SmoothMap":
        """``self o inner``."""
        if inner.dim_out != self.dim_in:
            raise ChartError("cannot compose maps with mismatched dimensions")
        return SmoothMap(lambda x: self(inner(x)), inner.dim_in, self.dim_out,
                         f"{self.name}o{inner.name}")


@dataclass
class VectorFieldValue:
    base: np.ndarray
    components: np.ndarray = field(default=None)

    def __post_init__(self):
        self.base = np.asarray(self.base, dtype=float)
        self.components = np.asarray(self.components, dtype=float)
        if self.components.shape != self.base.shape:
            raise ChartError("vector field components do not match the chart dimension")


def _check_chart(x: Sequence, chart: CanonicalChart | None) -> int:
    if chart is not None:
        chart.check_point(x)
        return chart.n
    if len(x) % 2:
        raise ChartError("canonical points have even dimension")
    return len(x) // 2


def poisson_bracket(f, g, x: Sequence, chart: CanonicalChart | None = None):
    """``{f, g} = sum_i df/dq^i dg/dp_i - dg/dq^i df/dp_i`` at ``x``."""
    n = _check_chart(x, chart)
    gf = gradient(f, x)
    gg = gradient(g, x)
    total = 0.0
    for i in range(n):
        total = total + (gf[i] * gg[n + i] - gg[i] * gf[n + i])
    return total


def _omega_times(grad_f: list, n: int) -> list:
    # canonical_omega(n) @ grad_f, written out so it works on hyper-duals
    return list(grad_f[n:]) + [-c for c in grad_f[:n]]


def hamiltonian_vector_field(f, convention: Convention = "df") -> FieldFunction:
    """Field function ``x -> X_f(x)`` usable inside further differentiation.

    The interior product is taken in the second slot, ``omega(., X)``, so
    the two conventions read ``Omega X = grad f`` (``"df"``) and
    ``Omega X = -grad f`` (``"-df"``); with this reading ``{f, g} = dg(X_f)``
    for the ``"df"`` field.
    """
    if convention not in ("df", "-df"):
        raise ValueError(f"unknown sign convention {convention!r}")
    sign = -1.0 if convention == "df" else 1.0

    def X(x):
        n = _check_chart(x, None)
        return [sign * c for c in _omega_times(gradient(f, x), n)]

    return X


def hamiltonian_field(f, x: Sequence, convention: Convention = "df",
                      chart: CanonicalChart | None = None) -> VectorFieldValue:
    _check_chart(x, chart)
    comps = hamiltonian_vector_field(f, convention)(x)
    return VectorFieldValue(np.asarray(x, dtype=float), np.array(comps, dtype=float))


def _residual_at(fmap, x, omega_in, omega_out) -> float:
    J = jacobian(fmap, x)
    w_in = omega_in(x) if callable(omega_in) else omega_in
    w_out = omega_out(fmap(x)) if callable(omega_out) else omega_out
    return float(np.max(np.abs(J.T @ w_out @ J - w_in)))


def symplectomorphism_residuals(fmap: SmoothMap, points, omega_in=None, omega_out=None):
    """Yield ``(point, residual)`` for ``|J^T Omega_out J - Omega_in|_max``.

    Either form may be a constant matrix or a callable of the point; both
    default to the canonical matrix of the matching dimension.
    """
    if fmap.dim_in != fmap.dim_out and (omega_in is None or omega_out is None):
        raise ChartError("symplectomorphism check needs equal dimensions")
    if omega_in is None:
        omega_in = canonical_omega(fmap.dim_in // 2)
    if omega_out is None:
        omega_out = canonical_omega(fmap.dim_out // 2)
    for x in points:
        try:
            yield tuple(x), _residual_at(fmap, x, omega_in, omega_out)
        except DomainError as err:
            if err.point is None:
                err.point = tuple(map(float, x))
            raise


def check_symplectomorphism(fmap: SmoothMap, points, omega_in=None, omega_out=None) -> float:
    """Maximum over ``points`` of ``|J^T Omega J - Omega|_max``."""
    return max(r for _, r in symplectomorphism_residuals(fmap, points, omega_in, omega_out))


def _along(fn: FieldFunction, x: Sequence, v: Sequence) -> list:
    level = max((depth(c) for c in x), default=0) + 1
    args = [HyperDual(xk, vk, 0.0, 0.0, level) for xk, vk in zip(x, v)]
    out = fn(args)
    return [c.d1 if depth(c) == level else 0.0 for c in out]


def lie_bracket(X: FieldFunction, Y: FieldFunction, x: Sequence) -> VectorFieldValue:
    """``[X, Y] = (X . grad) Y - (Y . grad) X`` at ``x``."""
    Xx = [real(c) for c in X(x)]
    Yx = [real(c) for c in Y(x)]
    dY = _along(Y, x, Xx)
    dX = _along(X, x, Yx)
    comps = [real(a) - real(b) for a, b in zip(dY, dX)]
    return VectorFieldValue(np.asarray(x, dtype=float), np.array(comps))


def lie_derivative_closed_two_form(X: FieldFunction, form, x: Sequence) -> np.ndarray:
    """``L_X w = d(i_X w)`` for a closed two-form ``w``.

    ``form`` is a coefficient matrix or a callable returning one; the
    contraction here is the ordinary first-slot one, so the result is the
    coordinate-free Lie derivative.
    """
    def contracted(y):
        W = form(y) if callable(form) else form
        W = W.tolist() if isinstance(W, np.ndarray) else W
        Xy = X(y)
        dim = len(y)
        return [sum((Xy[j] * W[j][k] for j in range(dim)), 0.0) for k in range(dim)]

    return exterior_derivative(contracted, x)


def vector_field_apply(X: FieldFunction, f, x: Sequence):
    """``X(f)`` at ``x``: derivative of ``f`` along ``X(x)``."""
    return directional(f, x, [real(c) for c in X(x)])
