from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import __version__

DEFAULT_TOLERANCE = 1e-9


def _finite_or_none(x: float | None) -> float | None:
    return x if x is not None and math.isfinite(x) else None


@dataclass
class CheckReport:
    """Outcome of one residual check; passes iff ``max_residual <= tolerance``."""

    system: str
    check: str
    samples: int
    max_residual: float | None
    tolerance: float
    worst_point: tuple | None = None
    error: str | None = None

    @property
    def passed(self) -> bool:
        if self.error is not None or self.max_residual is None:
            return False
        return bool(math.isfinite(self.max_residual) and self.max_residual <= self.tolerance)

    def to_dict(self) -> dict:
        out = {
            "name": self.check,
            "samples": self.samples,
            "max_residual": _finite_or_none(self.max_residual),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "worst_point": list(self.worst_point) if self.worst_point is not None else None,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error is not None:
            return f"{status} {self.check}: {self.error}"
        text = (f"{status} {self.check}: max residual {self.max_residual:.3e} "
                f"(tol {self.tolerance:.1e}, {self.samples} samples)")
        if not self.passed and self.worst_point is not None:
            text += " worst at (" + ", ".join(f"{c:.6g}" for c in self.worst_point) + ")"
        return text


def reduce_residuals(system: str, check: str, pairs: Iterable[tuple[Sequence, float]],
                     tolerance: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Fold ``(point, residual)`` pairs into a report keeping the worst point."""
    worst = None
    worst_val = -1.0
    count = 0
    for point, value in pairs:
        count += 1
        value = float(value)
        if math.isnan(value):
            value = math.inf
        if value > worst_val:
            worst_val = value
            worst = tuple(float(c) for c in point)
    if count == 0:
        raise ValueError("no samples")
    return CheckReport(system, check, count, worst_val, tolerance, worst)


@dataclass
class Report:
    system: str
    checks: list[CheckReport] = field(default_factory=list)
    wall_times: dict[str, float] = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "version": self.version,
            "system": self.system,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }
        if timings:
            out["wall_times"] = dict(self.wall_times)
        return out
