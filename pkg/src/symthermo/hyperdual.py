"""Hyper-dual numbers: exact first and mixed second derivatives.

A hyper-dual value carries ``val + d1*e1 + d2*e2 + d12*e1*e2`` with
``e1**2 = e2**2 = 0``.  Components may themselves be hyper-duals, which is
how higher derivatives are obtained (a gradient evaluated at a point that is
already being differentiated).  Every value records the perturbation level
it belongs to in ``depth`` so that values of different levels never get
confused: a lower-level value is a constant at a higher level.
"""
from __future__ import annotations

import math


class DomainError(ValueError):
    """A function was evaluated outside its real domain.

    ``point`` is filled in by the differentiation helpers with the
    coordinates at which the failing evaluation was requested.
    """

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.message = message
        self.point = point

    def __str__(self) -> str:
        if self.point is None:
            return self.message
        coords = ", ".join(f"{c:.17g}" for c in self.point)
        return f"{self.message} at point ({coords})"


def depth(x) -> int:
    """Perturbation level of ``x``; plain numbers are level 0."""
    return x.depth if isinstance(x, HyperDual) else 0


def real(x) -> float:
    """Strip every perturbation and return the underlying real number."""
    while isinstance(x, HyperDual):
        x = x.val
    return float(x)


class HyperDual:
    __slots__ = ("val", "d1", "d2", "d12", "depth")

    def __init__(self, val, d1=0.0, d2=0.0, d12=0.0, level: int | None = None):
        self.val = val
        self.d1 = d1
        self.d2 = d2
        self.d12 = d12
        if level is None:
            level = max(depth(val), depth(d1), depth(d2), depth(d12)) + 1
        self.depth = level

    @classmethod
    def constant(cls, val, level: int | None = None) -> "HyperDual":
        return cls(val, 0.0, 0.0, 0.0, level)

    def __repr__(self) -> str:
        return f"HyperDual({self.val!r}, {self.d1!r}, {self.d2!r}, {self.d12!r})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, o):
        d = depth(o)
        if d == self.depth:
            return HyperDual(self.val + o.val, self.d1 + o.d1, self.d2 + o.d2,
                             self.d12 + o.d12, self.depth)
        if d < self.depth:
            return HyperDual(self.val + o, self.d1, self.d2, self.d12, self.depth)
        return o.__add__(self)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.val, -self.d1, -self.d2, -self.d12, self.depth)

    def __pos__(self):
        return self

    def __sub__(self, o):
        d = depth(o)
        if d == self.depth:
            return HyperDual(self.val - o.val, self.d1 - o.d1, self.d2 - o.d2,
                             self.d12 - o.d12, self.depth)
        if d < self.depth:
            return HyperDual(self.val - o, self.d1, self.d2, self.d12, self.depth)
        return (-o).__add__(self)

    def __rsub__(self, o):
        # o has lower level here (a plain number or an outer constant)
        return HyperDual(o - self.val, -self.d1, -self.d2, -self.d12, self.depth)

    def __mul__(self, o):
        d = depth(o)
        if d < self.depth:
            return HyperDual(self.val * o, self.d1 * o, self.d2 * o, self.d12 * o,
                             self.depth)
        if d > self.depth:
            return o.__mul__(self)
        # the mixed term is grouped so swapping directions 1 and 2 is exact
        return HyperDual(
            self.val * o.val,
            self.val * o.d1 + self.d1 * o.val,
            self.val * o.d2 + self.d2 * o.val,
            self.val * o.d12 + (self.d1 * o.d2 + self.d2 * o.d1) + self.d12 * o.val,
            self.depth,
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        d = depth(o)
        if d < self.depth:
            return HyperDual(self.val / o, self.d1 / o, self.d2 / o, self.d12 / o,
                             self.depth)
        if d > self.depth:
            return o.__rtruediv__(self)
        q = self * reciprocal(o)
        # the value slot is divided directly so it matches plain evaluation
        return HyperDual(self.val / o.val, q.d1, q.d2, q.d12, self.depth)

    def __rtruediv__(self, o):
        q = reciprocal(self) * o
        return HyperDual(o / self.val, q.d1, q.d2, q.d12, self.depth)

    def __pow__(self, c):
        return power(self, c)

    def __rpow__(self, base):
        return power(base, self)


def _chain(x: HyperDual, f0, f1, f2) -> HyperDual:
    """Apply a scalar function with value ``f0`` and derivatives ``f1``, ``f2``."""
    return HyperDual(f0, f1 * x.d1, f1 * x.d2, f1 * x.d12 + f2 * (x.d1 * x.d2),
                     x.depth)


def reciprocal(x):
    if isinstance(x, HyperDual):
        inv = reciprocal(x.val)
        inv2 = inv * inv
        return _chain(x, inv, -inv2, 2.0 * inv2 * inv)
    if x == 0:
        raise DomainError("division by zero")
    return 1.0 / x


def exp(x):
    if isinstance(x, HyperDual):
        e = exp(x.val)
        return _chain(x, e, e, e)
    return math.exp(x)


def log(x):
    if isinstance(x, HyperDual):
        inv = reciprocal(x.val)
        return _chain(x, log(x.val), inv, -(inv * inv))
    if x <= 0:
        raise DomainError(f"logarithm of non-positive value {x!r}")
    return math.log(x)


ln = log


def _is_integer(c) -> bool:
    return float(c).is_integer()


def power(x, c):
    """``x ** c``.

    Non-integer exponents need a strictly positive base; that is a hard
    error rather than a NaN.  A hyper-dual exponent is handled as
    ``exp(c * log(x))``.
    """
    if isinstance(c, HyperDual):
        if real(x) <= 0:
            raise DomainError(f"variable exponent of non-positive base {real(x)!r}")
        return exp(c * log(x))
    c = float(c)
    if isinstance(x, HyperDual):
        if c == 0.0:
            return HyperDual.constant(1.0, x.depth)
        v = x.val
        f0 = power(v, c)
        f1 = c * power(v, c - 1.0)
        k = c * (c - 1.0)
        f2 = k * power(v, c - 2.0) if k != 0.0 else 0.0
        return _chain(x, f0, f1, f2)
    if not _is_integer(c) and x <= 0:
        raise DomainError(f"non-integer power {c!r} of non-positive base {x!r}")
    if x == 0 and c < 0:
        raise DomainError(f"negative power {c!r} of zero")
    return float(x) ** c


def sqrt(x):
    return power(x, 0.5)
