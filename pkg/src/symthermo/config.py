"""JSON system descriptions and their validation.

A config names a system of one of three kinds:

``constraint-system``
    equations of state ``p_i = f_i(q)``, either a built-in id or
    ``state_functions`` expressions, optionally with an ``energy``;
``generating-function``
    an ``energy`` expression ``u(q)`` whose gradient gives the momenta;
``blackhole``
    a one-variable model ``U = C S^(r/rho)`` from ``C``, ``D`` and ``Delta``.

Everything is parsed and every identifier resolved at load time.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from . import blackhole, eos
from .calculus import gradient
from .contact import ScalingWeights
from .expr import ParseError, ResolutionError, compile_expr, identifiers, parse_expr
from .hyperdual import DomainError
from .scaling import ExtendedEnergy, ExtendedState

KINDS = ("constraint-system", "generating-function", "blackhole")
FIXTURES = ("ideal-gas", "paper-vdw", "degree-zero-demo", "schwarzschild", "barrow",
            "sabotage-maxwell")


class ConfigError(ValueError):
    pass


@dataclass
class Variable:
    name: str
    min: float
    max: float


@dataclass
class FlowParams:
    C: float = 1.0
    dt: float = 1e-3
    t_end: float = 1.0
    q0: list[float] | None = None
    Z0: float = 1.0
    state0: ExtendedState | None = None


@dataclass
class SystemConfig:
    name: str
    kind: str
    builtin: str | None = None
    variables: list[Variable] = field(default_factory=list)
    constants: dict[str, float] = field(default_factory=dict)
    state_functions: list[str] = field(default_factory=list)
    energy: str | None = None
    weights: ScalingWeights | None = None
    tolerance: float | None = None
    grid: int = 5
    seed: int = 42
    samples: int = 100
    flow: FlowParams | None = None
    entropies: list[float] = field(default_factory=lambda: [1.0, 4.0, 9.0, 100.0])
    source: str | None = None

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    @property
    def box(self) -> list[tuple[float, float]] | None:
        return [(v.min, v.max) for v in self.variables] or None

    def compile(self, src: str) -> Callable:
        return compile_expr(src, self.names, self.constants)

    def constraint_system(self) -> eos.ConstraintSystem:
        if self.kind == "blackhole":
            raise ConfigError("black-hole configs have no constraint system")
        if self.builtin is not None:
            sys = eos.builtin_system(self.builtin, self.constants)
            sys.name = self.name
            if self.box is not None:
                sys.box = self.box
            return sys
        energy = self.compile(self.energy) if self.energy is not None else None
        if self.kind == "generating-function":
            fns = [_partial(energy, i) for i in range(len(self.variables))]
        else:
            fns = [self.compile(src) for src in self.state_functions]
        return eos.ConstraintSystem(self.name, fns, energy=energy, box=self.box)

    def energy_field(self) -> Callable | None:
        if self.kind == "blackhole":
            return None
        return self.constraint_system().energy

    def model(self) -> blackhole.BlackHoleModel:
        if self.kind != "blackhole":
            raise ConfigError(f"config {self.name!r} is not a black-hole model")
        if self.builtin is not None:
            return blackhole.builtin_model(self.builtin, self.constants)
        c = self.constants
        return blackhole.BlackHoleModel(c.get("C", 1.0), c.get("D", 4), c.get("Delta", 0.0))

    def extended_energy(self) -> ExtendedEnergy | None:
        if self.kind == "blackhole":
            return self.model().extended_energy()
        u = self.energy_field()
        if u is None or self.weights is None:
            return None
        return ExtendedEnergy(u, self.weights, self.constraint_system().box)


def _partial(u: Callable, i: int) -> Callable:
    return lambda q: gradient(u, q)[i]


# -- validation helpers ---------------------------------------------------

def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: number must be finite")
    return float(value)


def _integer(value: Any, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}")
    return value


def _numbers(value: Any, where: str) -> list[float]:
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list of numbers")
    return [_number(v, f"{where}[{k}]") for k, v in enumerate(value)]


def _require(doc: dict, key: str, where: str = "config") -> Any:
    if key not in doc:
        raise ConfigError(f"{where}: missing field {key!r}")
    return doc[key]


def _variables(raw: Any) -> list[Variable]:
    if not isinstance(raw, list):
        raise ConfigError("variables: expected a list")
    out = []
    for k, item in enumerate(raw):
        where = f"variables[{k}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{where}: expected an object")
        name = _require(item, "name", where)
        if not isinstance(name, str) or not name.isidentifier():
            raise ConfigError(f"{where}: invalid variable name {name!r}")
        lo = _number(_require(item, "min", where), f"{where}.min")
        hi = _number(_require(item, "max", where), f"{where}.max")
        if not lo < hi:
            raise ConfigError(f"{where}: domain box for {name!r} needs min < max "
                              f"(got {lo} >= {hi})")
        out.append(Variable(name, lo, hi))
    if len({v.name for v in out}) != len(out):
        raise ConfigError("variables: duplicate names")
    return out


def _expression(src: Any, where: str, known: set[str]) -> str:
    if not isinstance(src, str):
        raise ConfigError(f"{where}: expected an expression string")
    try:
        tree = parse_expr(src)
    except ParseError as err:
        raise ConfigError(f"{where}: {err}") from err
    unknown = sorted(identifiers(tree) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown identifier {unknown[0]!r}")
    return src


def _weights(raw: Any, n: int | None) -> ScalingWeights:
    if not isinstance(raw, dict):
        raise ConfigError("weights: expected an object")
    r = _number(_require(raw, "r", "weights"), "weights.r")
    rho = _number(_require(raw, "rho", "weights"), "weights.rho")
    coords = _numbers(_require(raw, "coords", "weights"), "weights.coords")
    if n is not None and len(coords) != n:
        raise ConfigError(f"weights.coords: expected {n} entries, got {len(coords)}")
    try:
        return ScalingWeights(r, rho, tuple(coords))
    except ValueError as err:
        raise ConfigError(f"weights: {err}") from err


def _flow(raw: Any, n: int | None) -> FlowParams:
    if not isinstance(raw, dict):
        raise ConfigError("flow: expected an object")
    fp = FlowParams()
    if "C" in raw:
        fp.C = _number(raw["C"], "flow.C")
    if "dt" in raw:
        fp.dt = _number(raw["dt"], "flow.dt")
        if not fp.dt > 0:
            raise ConfigError("flow.dt: must be positive")
    if "t_end" in raw:
        fp.t_end = _number(raw["t_end"], "flow.t_end")
        if fp.t_end < 0:
            raise ConfigError("flow.t_end: must be non-negative")
    if "q0" in raw:
        fp.q0 = _numbers(raw["q0"], "flow.q0")
        if n is not None and len(fp.q0) != n:
            raise ConfigError(f"flow.q0: expected {n} entries")
    if "Z0" in raw:
        fp.Z0 = _number(raw["Z0"], "flow.Z0")
        if not fp.Z0 > 0:
            raise ConfigError("flow.Z0: must be positive")
    if "state0" in raw:
        s = raw["state0"]
        if not isinstance(s, dict):
            raise ConfigError("flow.state0: expected an object")
        try:
            fp.state0 = ExtendedState(
                _number(_require(s, "Z", "flow.state0"), "flow.state0.Z"),
                _number(_require(s, "mu", "flow.state0"), "flow.state0.mu"),
                tuple(_numbers(_require(s, "Q", "flow.state0"), "flow.state0.Q")),
                tuple(_numbers(_require(s, "P", "flow.state0"), "flow.state0.P")))
        except ValueError as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(f"flow.state0: {err}") from err
        if n is not None and fp.state0.n != n:
            raise ConfigError(f"flow.state0: expected {n} coordinates")
    return fp


def parse_config(doc: Any, source: str | None = None) -> SystemConfig:
    """Validate a decoded JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    name = _require(doc, "name")
    if not isinstance(name, str) or not name:
        raise ConfigError("name: expected a non-empty string")
    kind = _require(doc, "kind")
    if kind not in KINDS:
        raise ConfigError(f"kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    cfg = SystemConfig(name=name, kind=kind, source=source)

    constants = doc.get("constants", {})
    if not isinstance(constants, dict):
        raise ConfigError("constants: expected an object")
    cfg.constants = {k: _number(v, f"constants.{k}") for k, v in constants.items()}
    if "variables" in doc:
        cfg.variables = _variables(doc["variables"])
    clash = set(cfg.names) & set(cfg.constants)
    if clash:
        raise ConfigError(f"{sorted(clash)[0]!r} is both a variable and a constant")
    known = set(cfg.names) | set(cfg.constants)

    builtin = doc.get("builtin")
    if builtin is not None:
        allowed = blackhole.BUILTIN_MODELS if kind == "blackhole" else eos.BUILTIN_SYSTEMS
        if kind == "generating-function" or builtin not in allowed:
            raise ConfigError(f"builtin: unknown id {builtin!r} for kind {kind}")
        cfg.builtin = builtin

    n: int | None = len(cfg.variables) or None
    if kind == "constraint-system":
        if builtin is None:
            if not cfg.variables:
                raise ConfigError("config: missing field 'variables'")
            fns = _require(doc, "state_functions")
            if not isinstance(fns, list) or len(fns) != n:
                raise ConfigError(f"state_functions: expected {n} expressions")
            cfg.state_functions = [_expression(s, f"state_functions[{k}]", known)
                                   for k, s in enumerate(fns)]
            if "energy" in doc:
                cfg.energy = _expression(doc["energy"], "energy", known)
        else:
            n = 2
            if cfg.variables and len(cfg.variables) != 2:
                raise ConfigError("variables: built-in systems have two variables")
    elif kind == "generating-function":
        if not cfg.variables:
            raise ConfigError("config: missing field 'variables'")
        cfg.energy = _expression(_require(doc, "energy"), "energy", known)
    else:
        n = 1
        if "entropies" in doc:
            cfg.entropies = _numbers(doc["entropies"], "entropies")
            if not cfg.entropies or any(s <= 0 for s in cfg.entropies):
                raise ConfigError("entropies: need positive values")

    if "weights" in doc:
        if kind == "blackhole":
            raise ConfigError("weights: black-hole weights follow from D and Delta")
        cfg.weights = _weights(doc["weights"], n)
    if "tolerance" in doc:
        cfg.tolerance = _number(doc["tolerance"], "tolerance")
        if not cfg.tolerance > 0:
            raise ConfigError("tolerance: must be positive")
    if "grid" in doc:
        cfg.grid = _integer(doc["grid"], "grid", 2)
    if "seed" in doc:
        cfg.seed = _integer(doc["seed"], "seed", 0)
    if "samples" in doc:
        cfg.samples = _integer(doc["samples"], "samples", 1)
    if "flow" in doc:
        cfg.flow = _flow(doc["flow"], n)

    # surface construction errors (bad constants, constant subexpressions
    # outside their domain) as config errors rather than at check time
    try:
        if kind == "blackhole":
            cfg.model()
        else:
            cfg.constraint_system()
    except (ValueError, KeyError, DomainError, ResolutionError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"{name}: {err}") from err
    return cfg


def fixture_path(name: str):
    return resources.files("symthermo") / "fixtures" / f"{name}.json"


def load_config(path: str | Path) -> SystemConfig:
    """Read a config file; bare fixture names resolve to the shipped copies."""
    p = Path(path)
    if p.exists():
        text, source = p.read_text(encoding="utf-8"), str(p)
    else:
        stem = p.name[:-5] if p.name.endswith(".json") else p.name
        if p.parent != Path(".") or stem not in FIXTURES:
            raise ConfigError(f"config file not found: {path}")
        text, source = fixture_path(stem).read_text(encoding="utf-8"), f"fixture:{stem}"
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: malformed JSON: {err}") from err
    return parse_config(doc, source)
