"""Derivatives of scalar fields and maps via hyper-dual evaluation.

A scalar field is any callable taking a sequence of coordinates and
returning a number; it must be written with the functions of
:mod:`symthermo.hyperdual` (or plain arithmetic) so it can be evaluated on
hyper-dual arguments.  A map is a callable returning a sequence.

All helpers accept points whose coordinates are themselves hyper-duals;
the result then carries the outer perturbations, which is what lets Lie
brackets differentiate Hamiltonian vector fields.
"""
from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

from .hyperdual import DomainError, HyperDual, depth, real

MAX_DIM = 8

ScalarField = Callable[[Sequence], object]
Map = Callable[[Sequence], Sequence]


def _level(x: Sequence) -> int:
    return max((depth(c) for c in x), default=0) + 1


def _part(r, level: int, attr: str):
    if depth(r) == level:
        return getattr(r, attr)
    return 0.0


def _evaluate(fn, args, x):
    try:
        return fn(args)
    except DomainError as err:
        if err.point is None:
            err.point = tuple(real(c) for c in x)
        raise


def _is_real(x: Sequence) -> bool:
    return all(depth(c) == 0 for c in x)


def gradient(field: ScalarField, x: Sequence) -> list:
    """First partials of ``field`` at ``x``, one coordinate per pass."""
    level = _level(x)
    out = []
    for k in range(len(x)):
        args = list(x)
        args[k] = HyperDual(x[k], 1.0, 0.0, 0.0, level)
        out.append(_part(_evaluate(field, args, x), level, "d1"))
    return out


def grad(field: ScalarField, x: Sequence) -> np.ndarray:
    """Exact gradient of ``field`` at a real point.

    >>> grad(lambda q: q[0] / q[1], (1.0, 2.0))
    array([ 0.5 , -0.25])
    """
    g = gradient(field, x)
    return np.array(g, dtype=float) if _is_real(x) else g


def directional(field: ScalarField, x: Sequence, v: Sequence):
    """Derivative of ``field`` at ``x`` along ``v``."""
    level = _level(x)
    args = [HyperDual(xk, vk, 0.0, 0.0, level) for xk, vk in zip(x, v)]
    return _part(_evaluate(field, args, x), level, "d1")


def second_directional(field: ScalarField, x: Sequence, dir1: Sequence,
                       dir2: Sequence):
    """Bilinear second derivative ``D^2 field(x)[dir1, dir2]``."""
    if not any(dir1) or not any(dir2):
        raise ValueError("directions must be nonzero")
    level = _level(x)
    args = [HyperDual(xk, ak, bk, 0.0, level) for xk, ak, bk in zip(x, dir1, dir2)]
    return _part(_evaluate(field, args, x), level, "d12")


def hessian(field: ScalarField, x: Sequence) -> np.ndarray:
    n = len(x)
    eye = np.eye(n)
    h = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            h[i, j] = h[j, i] = second_directional(field, x, eye[i], eye[j])
    return h


def jacobian_columns(fmap: Map, x: Sequence) -> list[list]:
    """Columns of the Jacobian (one pass per input) as nested lists."""
    level = _level(x)
    cols = []
    for k in range(len(x)):
        args = list(x)
        args[k] = HyperDual(x[k], 1.0, 0.0, 0.0, level)
        out = _evaluate(fmap, args, x)
        cols.append([_part(c, level, "d1") for c in out])
    return cols


def jacobian(fmap: Map, x: Sequence) -> np.ndarray:
    """Matrix ``J[i, j] = d out_i / d x_j`` at a real point."""
    if len(x) > MAX_DIM:
        raise ValueError(f"dimension {len(x)} exceeds the {MAX_DIM}x{MAX_DIM} cap")
    cols = jacobian_columns(fmap, x)
    if len(cols[0]) > MAX_DIM:
        raise ValueError(f"map output exceeds the {MAX_DIM}x{MAX_DIM} cap")
    return np.array(cols, dtype=float).T


def exterior_derivative(one_form: Map, x: Sequence) -> np.ndarray:
    """Coefficient matrix of ``d beta`` for ``beta = sum_k b_k(x) dx^k``.

    Entry ``[a, b]`` is ``d_a b_b - d_b b_a``; a two-form with coefficient
    matrix ``W`` evaluates as ``w(v, w) = v^T W w``.
    """
    J = jacobian(one_form, x)
    return J.T - J


def canonical_omega(n: int) -> np.ndarray:
    """Block matrix ``[[0, I], [-I, 0]]`` of size ``2n``."""
    if n < 1 or 2 * n > MAX_DIM:
        raise ValueError(f"canonical chart needs 1 <= n <= {MAX_DIM // 2}, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def grid_points(box: Sequence[tuple[float, float]], n: int = 5) -> list[tuple]:
    """Tensor grid with ``n`` points per axis, endpoints included."""
    if n < 1:
        raise ValueError("grid needs at least one point per axis")
    axes = []
    for lo, hi in box:
        if not lo < hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        axes.append(np.linspace(lo, hi, n).tolist() if n > 1 else [0.5 * (lo + hi)])
    return list(itertools.product(*axes))


def central_difference(field: ScalarField, x: Sequence, k: int, h: float = 1e-5) -> float:
    """Finite-difference partial, kept as an independent oracle."""
    up = list(map(float, x))
    dn = list(map(float, x))
    up[k] += h
    dn[k] -= h
    return (real(field(up)) - real(field(dn))) / (2.0 * h)
