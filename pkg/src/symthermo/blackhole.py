"""One-variable systems: ``U = C S^(r/rho)`` and the Smarr-type relations.

With a single extensive coordinate the scale-invariant energy is a
constant ``C``; the entropy plays the role of the scale coordinate, so
``T = dU/dS`` and ``r U = rho T S``.  A fractal horizon parameter
``Delta`` enters through ``r = D - 3`` and ``rho = D - 2 - Delta``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import grad
from .contact import ScalingWeights
from .hyperdual import power
from .scaling import ExtendedEnergy

BUILTIN_MODELS = ("schwarzschild", "barrow")


@dataclass(frozen=True)
class BlackHoleModel:
    C: float = 1.0
    D: int = 4
    Delta: float = 0.0

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("energy constant C must be positive")
        if int(self.D) != self.D or self.D < 4:
            raise ValueError(f"spacetime dimension must be an integer >= 4, got {self.D}")
        if not 0.0 <= self.Delta <= 1.0:
            raise ValueError(f"fractal parameter must lie in [0, 1], got {self.Delta}")

    @property
    def r(self) -> float:
        return float(self.D - 3)

    @property
    def rho(self) -> float:
        return float(self.D - 2 - self.Delta)

    @property
    def weights(self) -> ScalingWeights:
        return ScalingWeights(self.r, self.rho, (1.0,))

    def energy(self, S):
        return self.C * power(S, self.r / self.rho)

    def temperature(self, S):
        k = self.r / self.rho
        return self.C * k * power(S, k - 1.0)

    def extended_energy(self, box=((0.5, 4.0),)) -> ExtendedEnergy:
        """Symplectized description: constant ``u = C`` with weights ``(r, rho, 1)``."""
        C = self.C
        return ExtendedEnergy(lambda q: C + 0.0 * q[0], self.weights, list(box))


def schwarzschild(C: float = 1.0) -> BlackHoleModel:
    return BlackHoleModel(C, 4, 0.0)


def builtin_model(name: str, constants: dict | None = None) -> BlackHoleModel:
    constants = constants or {}
    C = constants.get("C", 1.0)
    if name == "schwarzschild":
        if constants.get("D", 4) != 4 or constants.get("Delta", 0.0) != 0.0:
            raise ValueError("schwarzschild model has D=4 and Delta=0")
        return schwarzschild(C)
    if name == "barrow":
        if "D" not in constants or "Delta" not in constants:
            raise KeyError("barrow model needs constants D and Delta")
        return BlackHoleModel(C, constants["D"], constants["Delta"])
    raise KeyError(f"unknown black-hole model {name!r}; known: {', '.join(BUILTIN_MODELS)}")


@dataclass
class BlackHoleState:
    U: float
    T: float
    smarr_residual: float
    barrow_residual: float


def blackhole_state(model: BlackHoleModel, S: float) -> BlackHoleState:
    """Energy, temperature and the residuals of ``r U = rho T S``."""
    if not S > 0:
        raise ValueError(f"entropy must be positive, got S={S}")
    U = float(model.energy(S))
    T = float(model.temperature(S))
    smarr = abs(model.r * U - model.rho * T * S)
    barrow = abs((model.D - 3) * U - (model.D - 2 - model.Delta) * T * S)
    return BlackHoleState(U, T, smarr, barrow)


def temperature_slope(model: BlackHoleModel, S: float) -> float:
    return float(grad(lambda s: model.temperature(s[0]), [S])[0])


def isothermal_obstruction_check(model: BlackHoleModel,
                                 samples=(0.5, 1.0, 2.0, 4.0, 8.0)) -> bool:
    """True iff ``r = rho``, i.e. only isothermal processes are possible.

    The answer is cross-checked against ``dT/dS`` at the sample entropies.
    """
    isothermal = abs(model.r - model.rho) <= 1e-12
    slopes = np.array([temperature_slope(model, S) for S in samples])
    flat = bool(np.all(np.abs(slopes) <= 1e-12))
    if flat != isothermal:
        raise RuntimeError(f"dT/dS disagrees with r = rho test for {model}")
    return isothermal
