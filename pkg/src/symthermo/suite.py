"""Run the checks that apply to a config and write flow trajectories."""
from __future__ import annotations

import io
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import blackhole, contact, eos
from .calculus import canonical_omega, grid_points, jacobian
from .config import ConfigError, SystemConfig
from .hyperdual import real
from .ode import FlowDomainError
from .report import DEFAULT_TOLERANCE, CheckReport, Report, reduce_residuals
from .scaling import (
    ExtendedEnergy,
    apply_dilation,
    charge_function,
    charge_vector_field,
    dilation_vector_field,
    euler_residual,
    gauge_fix,
    gauge_pullback_residual,
    hamiltonian_flow,
    hamiltonian_homogeneity_residual,
    homogeneity_residual,
    invariant_functions,
    process_hamiltonian,
    process_hamiltonian_function,
    random_states,
    source_form,
    symplectization_map,
)
from .symplectic import (
    CanonicalChart,
    hamiltonian_vector_field,
    lie_bracket,
    lie_derivative_closed_two_form,
    poisson_bracket,
    symplectomorphism_residuals,
)

Check = Callable[[], CheckReport]


@dataclass
class Overrides:
    tolerance: float | None = None
    seed: int | None = None
    grid: int | None = None


class _Context:
    def __init__(self, cfg: SystemConfig, overrides: Overrides | None):
        o = overrides or Overrides()
        self.cfg = cfg
        self.name = cfg.name
        self.forced = o.tolerance if o.tolerance is not None else cfg.tolerance
        self.seed = o.seed if o.seed is not None else cfg.seed
        self.grid = o.grid if o.grid is not None else cfg.grid

    def tol(self, default: float = DEFAULT_TOLERANCE) -> float:
        return self.forced if self.forced is not None else default

    def reduce(self, check: str, pairs: Iterable, default: float = DEFAULT_TOLERANCE):
        return reduce_residuals(self.name, check, pairs, self.tol(default))


# -- constraint systems ---------------------------------------------------

def _constraint_checks(ctx: _Context, sys: eos.ConstraintSystem) -> list[tuple[str, Check]]:
    g = ctx.grid
    checks = [
        ("involutivity", lambda: eos.involutivity_report(sys, grid=g, tolerance=ctx.tol())),
        ("maxwell", lambda: eos.maxwell_isotropy_report(sys, grid=g, tolerance=ctx.tol())),
        ("path-independence", lambda: eos.path_independence_report(sys, tolerance=ctx.tol())),
        ("energy-gradient",
         lambda: eos.energy_gradient_report(sys, grid=g, tolerance=ctx.tol(1e-8))),
    ]
    if sys.energy is not None:
        checks.append(("legendre-transform", lambda: _legendre_transform(ctx, sys)))
    return checks


def _legendre_transform(ctx: _Context, sys: eos.ConstraintSystem) -> CheckReport:
    points = grid_points(sys.box, ctx.grid)
    worst = None
    for i in range(sys.n):
        res = eos.legendre_canonical_transform(sys, i, points)
        rep = CheckReport(ctx.name, "legendre-transform", len(points), res.max_residual,
                          ctx.tol(), (float(i),))
        if worst is None or rep.max_residual > worst.max_residual:
            worst = rep
    return worst


def _vdw_checks(ctx: _Context) -> list[tuple[str, Check]]:
    c = ctx.cfg.constants
    params = eos.VdwParams(c.get("A", 1.0), c.get("b", 1.0))
    psi, pulled = eos.map_ideal_to_vdw(params)
    ideal = eos.ideal_gas(eos.IdealGasParams(params.A))
    box = ctx.cfg.box or pulled.box
    g = ctx.grid

    def symplecto():
        # q' over the vdW box, p' around the on-shell values
        pts = grid_points(list(box) + [(0.0, 2.0), (-2.0, 0.0)], g)
        return ctx.reduce("symplectomorphism", symplectomorphism_residuals(psi, pts))

    def pullback():
        mine = eos.involutivity_report(pulled, box=box, grid=g)
        ref = eos.involutivity_report(ideal, grid=g)
        excess = max(0.0, mine.max_residual - ref.max_residual)
        return CheckReport(ctx.name, "pullback-involutivity", mine.samples, excess,
                           ctx.tol(1e-10), mine.worst_point)

    def tangent():
        return eos.tangent_map_identity_check(params, box=box, grid=g, tolerance=ctx.tol())

    return [("symplectomorphism", symplecto), ("pullback-involutivity", pullback),
            ("tangent-map-identity", tangent)]


# -- Legendre submanifold and restricted flow -----------------------------

def _legendre_checks(ctx: _Context, u: Callable, box) -> list[tuple[str, Check]]:
    n = len(box)
    lam = contact.legendre_from_generating(u, n, box)
    g = ctx.grid

    def roundtrip():
        def pairs():
            for q in grid_points(box, g):
                point = lam.embed(q)
                back = lam.lift(lam.project(point))
                yield q, float(np.max(np.abs(back - point)))
        return ctx.reduce("lift-roundtrip", pairs(), 0.0)

    return [
        ("contact-structure", lambda: _contact_structure(ctx, n)),
        ("legendre", lambda: contact.verify_legendre(lam, grid=g, tolerance=ctx.tol(1e-12),
                                                     system=ctx.name)),
        ("projection-isotropy",
         lambda: contact.project_to_lagrangian(lam, grid=g, tolerance=ctx.tol(1e-12),
                                               system=ctx.name)),
        ("lift-roundtrip", roundtrip),
    ]


def _contact_structure(ctx: _Context, n: int) -> CheckReport:
    cc = contact.ContactChart(CanonicalChart(n))
    rng = np.random.default_rng(ctx.seed)
    pts = rng.uniform(-2.0, 2.0, size=(10, cc.dim)).tolist()
    return ctx.reduce("contact-structure", ((x, cc.structure_residual(x)) for x in pts), 1e-12)


def _restricted_checks(ctx: _Context, u: Callable, box) -> list[tuple[str, Check]]:
    cfg = ctx.cfg
    fp = cfg.flow
    if fp is None or fp.q0 is None or cfg.weights is None:
        return []
    lam = contact.legendre_from_generating(u, len(box), box)
    state: dict = {}

    def records():
        if "records" not in state:
            state["records"] = contact.restricted_flow(lam, cfg.weights, fp.q0, fp.C,
                                                       fp.t_end, fp.dt)
        return state["records"]

    def u_drift():
        recs = records()
        return CheckReport(ctx.name, "restricted-energy-drift", len(recs),
                           contact.energy_drift(recs), ctx.tol(1e-8), tuple(recs[-1].q))

    def p_drift():
        recs = records()
        return CheckReport(ctx.name, "restricted-legendre-drift", len(recs),
                           contact.legendre_drift(lam, recs), ctx.tol(1e-6), tuple(recs[-1].q))

    return [("restricted-energy-drift", u_drift), ("restricted-legendre-drift", p_drift)]


# -- symplectization ------------------------------------------------------

def _scaling_checks(ctx: _Context, U: ExtendedEnergy) -> list[tuple[str, Check]]:
    cfg, w = ctx.cfg, U.weights
    count = cfg.samples
    on = random_states(U, count, ctx.seed, on_graph=True)
    off = random_states(U, count, ctx.seed + 1, on_graph=False)
    omega = canonical_omega(w.n + 1)
    G = charge_function(w)
    H = process_hamiltonian_function(U)
    Xr = dilation_vector_field(w)
    XG = charge_vector_field(w)
    XH = hamiltonian_vector_field(H, "-df")

    def euler():
        return ctx.reduce("euler", ((x.vector(), euler_residual(x, U)) for x in on), 1e-10)

    def homogeneity():
        return ctx.reduce("homogeneity", ((x.vector(), homogeneity_residual(U, x, lam))
                                          for x in on for lam in (0.5, 2.0, 3.0)), 1e-10)

    def charge_commutation():
        qs, _ = invariant_functions(w)

        def pairs():
            for x in off:
                v = x.vector()
                yield v, max(abs(real(poisson_bracket(f, G, v))) for f in qs)
        return ctx.reduce("charge-commutation", pairs(), 1e-12)

    def momentum_charge():
        # the invariant momenta are rescaled by the charge flow: {p_i, G} = -r p_i
        _, ps = invariant_functions(w)

        def pairs():
            for x in off:
                v = x.vector()
                yield v, max(abs(real(poisson_bracket(f, G, v)) + w.r * real(f(v)))
                             for f in ps)
        return ctx.reduce("momentum-charge", pairs(), 1e-12)

    def conformal():
        def pairs():
            for x in off:
                L = lie_derivative_closed_two_form(Xr, lambda y: omega, x.vector())
                yield x.vector(), float(np.max(np.abs(L - w.r * omega)))
        return ctx.reduce("conformal-dilation", pairs(), 1e-12)

    def charge_symmetry():
        def pairs():
            for x in off:
                L = lie_derivative_closed_two_form(XG, lambda y: omega, x.vector())
                yield x.vector(), float(np.max(np.abs(L)))
        return ctx.reduce("charge-symmetry", pairs(), 1e-12)

    def symplectization():
        box = U.box or [(0.5, 4.0)] * w.n
        rng = np.random.default_rng(ctx.seed)
        smap = symplectization_map(w)
        form = source_form(w)
        pts = []
        for _ in range(count):
            t = rng.uniform(-0.5, 0.5)
            u = rng.uniform(-1.0, 1.0)
            q = [rng.uniform(lo, hi) for lo, hi in box]
            p = rng.uniform(-2.0, 2.0, size=w.n).tolist()
            pts.append([t, u, *q, *p])

        def pairs():
            for y in pts:
                J = jacobian(smap, y)
                yield y, float(np.max(np.abs(J.T @ omega @ J - form(y))))
        return ctx.reduce("symplectization-map", pairs())

    def h_on_graph():
        return ctx.reduce("hamiltonian-on-graph",
                          ((x.vector(), abs(process_hamiltonian(x, U))) for x in on), 1e-10)

    def h_homogeneity():
        return ctx.reduce("hamiltonian-homogeneity",
                          ((x.vector(), hamiltonian_homogeneity_residual(x, U)) for x in off))

    def h_charge():
        return ctx.reduce("hamiltonian-charge",
                          ((x.vector(), abs(real(poisson_bracket(H, G, x.vector()))))
                           for x in off))

    def commutator():
        def pairs():
            for x in off:
                b = lie_bracket(Xr, XH, x.vector())
                yield x.vector(), float(np.max(np.abs(b.components)))
        return ctx.reduce("dilation-commutator", pairs())

    checks = [("euler", euler), ("homogeneity", homogeneity),
              ("charge-commutation", charge_commutation), ("momentum-charge", momentum_charge),
              ("conformal-dilation", conformal),
              ("charge-symmetry", charge_symmetry), ("symplectization-map", symplectization),
              ("hamiltonian-on-graph", h_on_graph),
              ("hamiltonian-homogeneity", h_homogeneity),
              ("hamiltonian-charge", h_charge), ("dilation-commutator", commutator)]

    if w.r != 0:
        Z0 = cfg.flow.Z0 if cfg.flow is not None else 1.0

        def gauge_orbit():
            def pairs():
                for x in off:
                    a = gauge_fix(x, Z0, w).contact_point
                    b = gauge_fix(apply_dilation(x, 3.0, w), Z0, w).contact_point
                    yield x.vector(), float(np.max(np.abs(a - b)))
            return ctx.reduce("gauge-orbit", pairs(), 1e-12)

        def gauge_pullback():
            def pairs():
                for x in off:
                    y = gauge_fix(x, Z0, w).contact_point
                    yield y, gauge_pullback_residual(y, Z0, w)
            return ctx.reduce("gauge-pullback", pairs())

        checks += [("gauge-orbit", gauge_orbit), ("gauge-pullback", gauge_pullback)]

    if cfg.flow is not None and cfg.flow.state0 is not None:
        fp = cfg.flow

        def g_drift():
            recs = hamiltonian_flow(fp.state0, "X_H", U, fp.t_end, fp.dt)
            drift = max(abs(r.G - recs[0].G) for r in recs)
            return CheckReport(ctx.name, "charge-drift", len(recs), drift, ctx.tol(1e-8),
                               tuple(recs[-1].state.vector()))

        checks.append(("charge-drift", g_drift))
    return checks


# -- black holes ----------------------------------------------------------

def _blackhole_checks(ctx: _Context, model: blackhole.BlackHoleModel) -> list[tuple[str, Check]]:
    S_values = ctx.cfg.entropies
    U = model.extended_energy()

    def smarr():
        return ctx.reduce("smarr", (([S], blackhole.blackhole_state(model, S).smarr_residual)
                                    for S in S_values), 1e-12)

    def barrow():
        return ctx.reduce("generalized-smarr",
                          (([S], blackhole.blackhole_state(model, S).barrow_residual)
                           for S in S_values), 1e-12)

    def temperature():
        # mu on the graph of the extended energy is the temperature
        def pairs():
            for S in S_values:
                x = U.graph_state([1.0], S)
                yield [S], abs(x.mu - blackhole.blackhole_state(model, S).T)
        return ctx.reduce("temperature-match", pairs(), 1e-12)

    def isothermal():
        flag = blackhole.isothermal_obstruction_check(model)
        expected = abs(model.r - model.rho) <= 1e-12
        return CheckReport(ctx.name, "isothermal-obstruction", 1,
                           0.0 if flag == expected else 1.0, ctx.tol(0.0),
                           (model.r, model.rho))

    return [("smarr", smarr), ("generalized-smarr", barrow),
            ("temperature-match", temperature), ("isothermal-obstruction", isothermal)]


# -- orchestration --------------------------------------------------------

def plan_checks(cfg: SystemConfig, overrides: Overrides | None = None) -> list[tuple[str, Check]]:
    ctx = _Context(cfg, overrides)
    if cfg.kind == "blackhole":
        model = cfg.model()
        return _blackhole_checks(ctx, model) + _scaling_checks(ctx, model.extended_energy())
    sys = cfg.constraint_system()
    checks = _constraint_checks(ctx, sys)
    if cfg.builtin == "paper-vdw":
        checks += _vdw_checks(ctx)
    if sys.energy is not None:
        checks += _legendre_checks(ctx, sys.energy, sys.box)
        checks += _restricted_checks(ctx, sys.energy, sys.box)
    U = cfg.extended_energy()
    if U is not None:
        checks += _scaling_checks(ctx, U)
    return checks


def run_check_suite(cfg: SystemConfig, overrides: Overrides | None = None) -> Report:
    """Run every applicable check; a check that raises is recorded as failed."""
    report = Report(cfg.name)
    tol = _Context(cfg, overrides).tol()
    for name, check in plan_checks(cfg, overrides):
        start = time.perf_counter()
        try:
            result = check()
        except Exception as err:  # noqa: BLE001 - any failure becomes a failed check
            result = CheckReport(cfg.name, name, 0, None, tol, None,
                                 f"{type(err).__name__}: {err}")
        report.checks.append(result)
        report.wall_times[name] = time.perf_counter() - start
    return report


# -- flows ----------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class FlowResult:
    rows: int
    drift_name: str
    drift: float
    error: FlowDomainError | None = None

    def summary(self) -> str:
        line = f"# {self.drift_name}-drift {_fmt(self.drift)} over {self.rows} rows"
        if self.error is not None:
            line += f"; stopped: {self.error}"
        return line


def _restricted_rows(cfg: SystemConfig):
    fp = cfg.flow
    if cfg.weights is None or fp.q0 is None:
        raise ConfigError("restricted flow needs weights and flow.q0")
    u = cfg.energy_field()
    if u is None:
        raise ConfigError("restricted flow needs an energy")
    n = len(fp.q0)
    lam = contact.legendre_from_generating(u, n, cfg.box)
    header = ["step", "t", "u"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]
    try:
        recs, err = contact.restricted_flow(lam, cfg.weights, fp.q0, fp.C, fp.t_end, fp.dt), None
    except FlowDomainError as e:
        recs, err = e.records, e
    rows = [[r.step, r.t, r.u, *r.q, *r.p] for r in recs]
    drift = contact.energy_drift(recs) if recs else 0.0
    return header, rows, "u", drift, err


def _extended_rows(cfg: SystemConfig, generator: str):
    fp = cfg.flow
    U = cfg.extended_energy()
    if U is None:
        raise ConfigError("extended flows need an energy and weights")
    x0 = fp.state0
    if x0 is None:
        if fp.q0 is not None:
            x0 = U.graph_state_from_invariants(fp.q0, fp.Z0)
        else:
            raise ConfigError("extended flows need flow.state0 or flow.q0")
    n = x0.n
    header = (["step", "t", "Z", "mu"] + [f"Q{i + 1}" for i in range(n)]
              + [f"P{i + 1}" for i in range(n)] + ["G", "H", "U"])
    try:
        recs, err = hamiltonian_flow(x0, generator, U, fp.t_end, fp.dt), None
    except FlowDomainError as e:
        recs, err = e.records, e
    rows = [[r.step, r.t, r.state.Z, r.state.mu, *r.state.Q, *r.state.P, r.G, r.H, r.U]
            for r in recs]
    drift = max(abs(r.G - recs[0].G) for r in recs) if recs else 0.0
    return header, rows, "G", drift, err


def run_flow(cfg: SystemConfig, generator: str, out: str | Path) -> FlowResult:
    """Integrate the named flow and write the trajectory as CSV.

    On a domain exit the rows computed so far are still written and the
    returned result carries the error.
    """
    if cfg.flow is None:
        raise ConfigError(f"config {cfg.name!r} has no flow section")
    if generator == "restricted":
        header, rows, name, drift, err = _restricted_rows(cfg)
    elif generator in ("X_G", "X_H"):
        header, rows, name, drift, err = _extended_rows(cfg, generator)
    else:
        raise ValueError(f"unknown generator {generator!r}")
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join([str(row[0])] + [_fmt(v) for v in row[1:]]) + "\n")
    result = FlowResult(len(rows), name, drift, err)
    buf.write(result.summary() + "\n")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())
    return result
