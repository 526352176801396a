"""Classical fixed-step RK4."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .hyperdual import DomainError


class FlowDomainError(DomainError):
    """The flow left the domain; ``step`` is the last step that completed."""

    def __init__(self, message: str, step: int, records: list):
        super().__init__(message)
        self.step = step
        self.records = records

    def __str__(self) -> str:
        return f"{self.message} (last valid step {self.step})"


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_count(t_end: float, dt: float) -> tuple[int, float]:
    """Number of uniform steps no longer than ``dt`` that land exactly on ``t_end``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    if t_end == 0:
        return 0, 0.0
    n = max(1, math.ceil(t_end / dt - 1e-9))
    return n, t_end / n


def integrate(f, y0, t_end: float, dt: float, record: Callable[[int, float, np.ndarray], object]):
    """Integrate ``y' = f(y)`` and collect ``record(step, t, y)`` at every step.

    A :class:`DomainError` raised by ``f`` or ``record`` becomes a
    :class:`FlowDomainError` carrying the records gathered so far.
    """
    n, h = step_count(t_end, dt)
    y = np.asarray(y0, dtype=float)
    records = []
    step = 0
    try:
        records.append(record(0, 0.0, y))
        for step in range(1, n + 1):
            y = rk4_step(f, y, h)
            records.append(record(step, t_end if step == n else step * h, y))
    except DomainError as err:
        raise FlowDomainError(f"flow left the domain: {err}", len(records) - 1, records) from err
    return records
