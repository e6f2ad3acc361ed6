"""Scenario execution and CSV serialization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import asymptotics, observables, scattering, wigner
from .config import NegativeFluxSection, ScenarioConfig, ScenarioKind
from .errors import ComputationError, ConfigError
from .oscquad import choose_grid
from .packets import (
    Direction,
    GaussianComponent,
    MomentumAmplitude,
    PhysicalConstants,
    WavePacketSpec,
    build_amplitude,
)


@dataclass
class ScenarioResult:
    columns: list[str]
    rows: list[Sequence[Any]]
    diagnostics: list[tuple[str, Any]] = field(default_factory=list)
    resolved: list[tuple[str, Any]] = field(default_factory=list)


def constants_of(cfg: ScenarioConfig) -> PhysicalConstants:
    return PhysicalConstants(cfg.constants.hbar, cfg.constants.mass)


def spec_of(cfg: ScenarioConfig) -> WavePacketSpec:
    comps = [
        GaussianComponent(c.weight, c.center, c.spread, c.origin) for c in cfg.components.values()
    ]
    try:
        return WavePacketSpec(tuple(comps), Direction(cfg.packet.direction), cfg.tolerances.tail_tol)
    except ValueError as exc:
        raise ConfigError(f"packet: {exc}", field="packet") from exc


def _tau_window(cfg: ScenarioConfig, spec: WavePacketSpec, c: PhysicalConstants) -> tuple[float, float]:
    lo, hi = cfg.tau.lo, cfg.tau.hi
    if lo is None or hi is None:
        auto_lo, auto_hi = observables.suggest_tau_window(spec, cfg.scenario.detector, c)
        lo = auto_lo if lo is None else lo
        hi = auto_hi if hi is None else hi
    if not hi > lo:
        raise ConfigError(f"tau: window [{lo:g}, {hi:g}] is empty", field="tau")
    return lo, hi


def _amplitude(cfg: ScenarioConfig, spec: WavePacketSpec, c: PhysicalConstants,
               tau_max: float) -> MomentumAmplitude:
    grid = choose_grid(spec, tau_max, cfg.scenario.detector, c, n_min=cfg.tolerances.grid_min)
    return build_amplitude(spec, grid, c)


def _two_packet(cfg: ScenarioConfig, spec: WavePacketSpec, c: PhysicalConstants) -> asymptotics.TwoPacketParams:
    comps = sorted(spec.components, key=lambda comp: comp.center)
    if len(comps) != 2 or spec.direction is not Direction.PLUS:
        raise ConfigError("negative_flux needs exactly two components moving in direction +1")
    first, second = comps
    if first.spread != second.spread or first.origin != second.origin:
        raise ConfigError("negative_flux components must share spread and origin")
    norm = math.hypot(first.weight, second.weight)
    try:
        return asymptotics.TwoPacketParams(
            first.weight / norm, second.weight / norm, first.center, second.center,
            first.spread, first.origin, c,
        )
    except ValueError as exc:
        raise ConfigError(f"negative_flux: {exc}") from exc


def run_scenario(cfg: ScenarioConfig, workers: int = 1) -> ScenarioResult:
    c = constants_of(cfg)
    spec = spec_of(cfg)
    X = cfg.scenario.detector
    kind = cfg.scenario.kind
    resolved = cfg.flat_items()
    diags: list[tuple[str, Any]] = []

    if kind is ScenarioKind.NEGATIVE_FLUX:
        params = _two_packet(cfg, spec, c)
        nf = cfg.negative_flux or NegativeFluxSection()
        if cfg.tau.lo is not None and cfg.tau.hi is not None:
            lo, hi = cfg.tau.lo, cfg.tau.hi
            count = cfg.tau.count
        else:
            lo, hi, count = 0.0, nf.periods * params.period, nf.count
        taus = np.linspace(lo, hi, count)
        a = _amplitude(cfg, spec, c, max(abs(lo), abs(hi)))
        exact = observables.current_series(a, taus, X, workers=workers)
        j_asym = asymptotics.asym_current(params, taus, X)
        jp_asym = asymptotics.asym_positive_current(params, taus, X)
        d = asymptotics.negative_flux_condition(params, nf.margin)
        diags += [
            ("ratio1", d.ratio1), ("ratio2", d.ratio2), ("satisfied", d.satisfied),
            ("min_current_estimate", d.min_current_estimate), ("period", params.period),
            ("min_j_exact", float(exact.j_values.min())),
            ("tau_at_min_j_exact", float(taus[np.argmin(exact.j_values)])),
            ("min_j_plus_exact", float(exact.jplus_values.min())),
            ("tau_at_min_j_asym", float(taus[np.argmin(j_asym)])),
        ]
        resolved.append(("tau.window", f"{lo!r}, {hi!r}, {count}"))
        rows = list(zip(taus, j_asym, jp_asym, exact.j_values, exact.jplus_values))
        return ScenarioResult(["tau", "j_asym", "j_plus_asym", "j_exact", "j_plus_exact"],
                              rows, diags, resolved)

    if kind is ScenarioKind.SEMICLASSICAL:
        if cfg.semiclassical is None:
            raise ConfigError("semiclassical scenario needs a [semiclassical] section")
        tau = cfg.semiclassical.tau
        a = _amplitude(cfg, spec, c, abs(tau))
        scan = asymptotics.semiclassical_scan(a, tau, X, cfg.semiclassical.scales)
        failed = [row for row in scan if row.error]
        if failed:
            raise ComputationError(f"hbar scale {failed[0].scale:g}: {failed[0].error}")
        rows = [(r.scale, r.exact_density, r.asym_density, r.abs_error) for r in scan]
        return ScenarioResult(["scale", "exact_density", "asym_density", "abs_error"],
                              rows, diags, resolved)

    if kind is ScenarioKind.WIGNER_CHECK:
        if cfg.wigner is None:
            raise ConfigError("wigner_check scenario needs a [wigner] section")
        taus = cfg.wigner.taus
        a = _amplitude(cfg, spec, c, max(abs(t) for t in taus))
        rows = []
        for tau in taus:
            direct = observables.current_expectation(a, tau, X)
            phase_space = wigner.wigner_current_check(a, tau, X)
            rows.append((tau, direct, phase_space, abs(direct - phase_space)))
        return ScenarioResult(["tau", "current_direct", "current_wigner", "abs_diff"],
                              rows, diags, resolved)

    lo, hi = _tau_window(cfg, spec, c)
    resolved.append(("tau.window", f"{lo!r}, {hi!r}, {cfg.tau.count}"))
    a = _amplitude(cfg, spec, c, max(abs(lo), abs(hi)))
    n_tau = cfg.tau.count
    p_tol = cfg.tolerances.p_tol

    if kind is ScenarioKind.BARRIER:
        b = cfg.barrier
        if b is None:
            raise ConfigError("barrier scenario needs a [barrier] section")
        if b.model == "delta":
            model = scattering.delta_barrier(b.strength, c)
        elif b.model == "rectangular":
            if b.height is None or b.width is None:
                raise ConfigError("rectangular barrier needs height and width")
            model = scattering.rectangular_barrier(b.height, b.width, c)
        else:
            model = scattering.free()
        if spec.direction is not Direction.PLUS:
            raise ConfigError("barrier scenario needs a packet moving in direction +1")
        out = scattering.transmit(a, model)
        a = out.amplitude
        diags.append(("transmitted_norm", out.transmitted_norm))
        kind = ScenarioKind.DENSITY

    if kind is ScenarioKind.DENSITY:
        d = observables.arrival_distribution(a, (lo, hi), n_tau, X, workers=workers)
        diags += [("density_integral", d.integral), ("tail", d.tail)]
        rows = list(zip(d.tau_nodes, d.amplitudes.real, d.amplitudes.imag, d.densities))
        return ScenarioResult(["tau", "re_amplitude", "im_amplitude", "density"],
                              rows, diags, resolved)

    if kind is ScenarioKind.CURRENTS:
        taus = observables.tau_grid((lo, hi), n_tau)
        s = observables.current_series(a, taus, X, workers=workers)
        diags += [
            ("j_integral", float(np.trapezoid(s.j_values, taus))),
            ("j_plus_integral", float(np.trapezoid(s.jplus_values, taus))),
        ]
        return ScenarioResult(["tau", "j", "j_plus"],
                              list(zip(taus, s.j_values, s.jplus_values)), diags, resolved)

    if kind is ScenarioKind.MEANS:
        d = observables.arrival_distribution(a, (lo, hi), n_tau, X, workers=workers)
        spectral = observables.mean_time_spectral(d, p_tol)
        routes = [
            ("spectral", spectral),
            ("current", observables.mean_time_current(a, (lo, hi), n_tau, X, p_tol, workers=workers)),
            ("aharonov_bohm", observables.mean_time_ab_operator(a, X)),
            ("grot_rovelli_tate", observables.mean_time_grt_operator(a, X)),
        ]
        diags.append(("inverse_momentum_mean", observables.inverse_momentum_mean(a)))
        rows = [(name, value, (value - spectral) / spectral) for name, value in routes]
        return ScenarioResult(["route", "value", "deviation_from_spectral"], rows, diags, resolved)

    raise ConfigError(f"unsupported scenario kind {kind}")


def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise ComputationError("refusing to serialize a non-finite value")
        return f"{v:.17g}"
    if isinstance(value, (list, tuple)):
        return ", ".join(_fmt(v) for v in value)
    if value is None:
        return "none"
    return str(value)


def render_csv(result: ScenarioResult) -> str:
    lines = ["# toa scenario output"]
    lines += [f"# config.{key} = {_fmt(value)}" for key, value in result.resolved]
    lines += [f"# diagnostic.{key} = {_fmt(value)}" for key, value in result.diagnostics]
    lines.append(",".join(result.columns))
    lines += [",".join(_fmt(v) for v in row) for row in result.rows]
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, result: ScenarioResult) -> Path:
    path = Path(path)
    text = render_csv(result)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
