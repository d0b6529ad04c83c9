"""Run orchestration and deterministic result emission.

One process drives one of four run kinds: a single finite-eps
simulation, a single limit simulation, an eps-sweep convergence study,
or a kinetic closure check. Time series go to CSV (one column per
tracked quantity, 17 significant digits), run summaries to JSON with
sorted keys. Identical configurations produce byte-identical files;
wall time is therefore reported on the console only, never written to
the output files.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (
    energy,
    error_fields,
    fit_rate,
    gamma_bound_check,
    hypothesis_deviation,
    well_prepared_init,
)
from .config import RunConfig, build_limit_initial, build_shapes
from .errors import DegenerateFit
from .kinetic import KineticField, make_ordinates, moment_system_check, p1_projection_residual
from .radiation import RadiationMoments, limit_I0, limit_closure_residual, limit_q
from .spectral import grad, sobolev_norm
from .stepping import StepControl, cfl_dt, step_eps, step_limit

__all__ = ["RunSummary", "run", "emit_series", "emit_summary"]

_LAND_TOL = 1e-12


@dataclass
class RunSummary:
    """Everything a completed run reports.

    wall_time_s is console-only; emit_summary excludes it so repeated
    runs produce byte-identical files.
    """

    mode: str
    config: dict
    wall_time_s: float
    rate_fits: dict
    gamma: dict
    hypothesis: dict
    conservation: dict
    closure: dict | None
    bounds_report: list[dict]
    exit_status: int

    def to_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("wall_time_s")
        return d


def emit_series(path, header: list[str], rows) -> None:
    """Write a CSV time series: header row, LF endings, %.16e floats."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format(v, ".16e") for v in row) + "\n")


def emit_summary(summary: RunSummary, path) -> None:
    """Write the run summary as sorted-key JSON (volatile fields dropped)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(summary.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sample_times(t_end: float, interval: float) -> list[float]:
    times = [0.0]
    i = 0
    while times[-1] < t_end - _LAND_TOL:
        i += 1
        times.append(min(i * interval, t_end))
    return times


def _advance(state, stepper, params, config: RunConfig, t_target: float, eps=None):
    """March to t_target landing exactly, obeying the CFL bounds."""
    while t_target - state.time > _LAND_TOL:
        control = StepControl(
            t_end=t_target,
            dt=config.dt_max,
            cfl_advective=config.cfl_advective,
            cfl_diffusive=config.cfl_diffusive,
        )
        dt_stable = cfl_dt(state, params, control, eps)
        remaining = t_target - state.time
        n_sub = max(1, math.ceil(remaining / dt_stable - 1e-9))
        state = stepper(state, remaining / n_sub)
    assert abs(state.time - t_target) < 1e-9
    return dataclasses.replace(state, time=t_target)


def _integrate_sampled(initial, stepper, params, config: RunConfig, eps=None):
    """States at every output time, including t = 0."""
    times = _sample_times(config.t_end, config.output_interval)
    states = [initial]
    state = initial
    for t in times[1:]:
        state = _advance(state, stepper, params, config, t, eps)
        states.append(state)
    return states


def _mass(state) -> float:
    return state.fluid.rho.mean * state.grid.volume


def _relative_drift(states) -> float:
    start = _mass(states[0])
    return max(abs(_mass(s) - start) for s in states) / abs(start)


def _state_norm_header(config: RunConfig, with_radiation: bool, extra=()) -> list[str]:
    header = ["time"]
    for s in config.sobolev_indices:
        header += [f"rho_h{s}", f"u_h{s}", f"theta_h{s}"]
        if with_radiation:
            header += [f"I0_h{s}", f"I1_h{s}"]
    return header + list(extra)


def _limit_rows(states, config: RunConfig):
    rows = []
    residuals = []
    for st in states:
        row = [st.time]
        for s in config.sobolev_indices:
            row += [
                sobolev_norm(st.fluid.rho, s),
                sobolev_norm(st.fluid.u, s),
                sobolev_norm(st.fluid.theta, s),
            ]
        res = limit_closure_residual(st.fluid.theta, limit_q(st.fluid.theta))
        residuals.append(res)
        rows.append(row + [res])
    return rows, residuals


def _eps_state_rows(states, config: RunConfig):
    rows = []
    for st in states:
        row = [st.time]
        for s in config.sobolev_indices:
            row += [
                sobolev_norm(st.fluid.rho, s),
                sobolev_norm(st.fluid.u, s),
                sobolev_norm(st.fluid.theta, s),
                sobolev_norm(st.rad.I0, s),
                sobolev_norm(st.rad.I1, s),
            ]
        rows.append(row)
    return rows


def _error_header(config: RunConfig) -> list[str]:
    header = ["time"]
    for s in config.sobolev_indices:
        header += [f"fluid_err_h{s}", f"rad_err_h{s}"]
    return header + ["fluid_energy", "full_energy", "gamma"]


def _error_rows(eps_states, limit_states, config: RunConfig, eps: float):
    """Error-norm rows plus the per-family sup-in-time and energy records."""
    s_acc = config.acceptance_index
    rows = []
    records = []
    sup = {f"fluid_s{s}": 0.0 for s in config.sobolev_indices}
    sup.update({f"radiation_s{s}": 0.0 for s in config.sobolev_indices})
    for es, ls in zip(eps_states, limit_states):
        err = error_fields(es, ls)
        row = [err.time]
        for s in config.sobolev_indices:
            fluid = math.sqrt(
                sobolev_norm(err.rho, s) ** 2
                + sobolev_norm(err.u, s) ** 2
                + sobolev_norm(err.theta, s) ** 2
            )
            rad = math.sqrt(
                sobolev_norm(err.I0, s) ** 2 + sobolev_norm(err.I1, s) ** 2
            )
            sup[f"fluid_s{s}"] = max(sup[f"fluid_s{s}"], fluid)
            sup[f"radiation_s{s}"] = max(sup[f"radiation_s{s}"], rad)
            row += [fluid, rad]
        record = energy(err, s_acc, eps)
        records.append(record)
        rows.append(row + [record.fluid_energy, record.full_energy, record.gamma])
    return rows, records, sup


def _spread(values) -> float:
    """max/min ratio; values indistinguishable from zero count as equal."""
    floor = 1e-12
    if max(values) < floor:
        return 1.0
    lo = min(values)
    if lo < floor:
        return math.inf
    return max(values) / lo


def _halving_ratio(values) -> float:
    """Worst ratio between consecutive sweep entries (either direction).

    The sweep is ordered by decreasing eps; with errors decaying like a
    power of eps, stability is judged per halving, not end to end.
    """
    floor = 1e-12
    worst = 1.0
    for a, b in zip(values, values[1:]):
        if a < floor and b < floor:
            continue
        if min(a, b) < floor:
            return math.inf
        r = a / b
        worst = max(worst, r, 1.0 / r)
    return worst


def _eps_tag(eps: float) -> str:
    return format(eps, "g")


def _run_convergence(config: RunConfig, out_dir: str, threads: int):
    params = config.params
    base = build_limit_initial(config)
    shapes = build_shapes(config)
    s_acc = config.acceptance_index

    limit_states = _integrate_sampled(
        base, lambda st, dt: step_limit(st, params, dt), params, config
    )
    limit_rows, closure_residuals = _limit_rows(limit_states, config)
    emit_series(
        os.path.join(out_dir, "limit_series.csv"),
        _state_norm_header(config, with_radiation=False, extra=("closure_residual",)),
        limit_rows,
    )

    def one_eps(eps: float):
        eps_init, _ = well_prepared_init(base, eps, config.perturbation_amp, shapes)
        lhs = hypothesis_deviation(eps_init, base, s_acc, eps)
        eps_states = _integrate_sampled(
            eps_init,
            lambda st, dt: step_eps(st, params, eps, dt),
            params,
            config,
            eps=eps,
        )
        rows, records, sup = _error_rows(eps_states, limit_states, config, eps)
        gamma_worst, gamma_pass = gamma_bound_check(
            records, eps, config.bounds["gamma_limit"]
        )
        return {
            "eps": eps,
            "rows": rows,
            "sup": sup,
            "hypothesis_lhs_over_eps": lhs / eps,
            "gamma_over_eps2": gamma_worst,
            "gamma_pass": gamma_pass,
            "mass_drift": _relative_drift(eps_states),
        }

    sweep = list(config.eps_list)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_eps, sweep))
    else:
        results = [one_eps(eps) for eps in sweep]
    results.sort(key=lambda r: -r["eps"])

    for r in results:
        emit_series(
            os.path.join(out_dir, f"errors_eps_{_eps_tag(r['eps'])}.csv"),
            _error_header(config),
            r["rows"],
        )

    rate_fits = {}
    for s in config.sobolev_indices:
        for family in ("fluid", "radiation"):
            pairs = [(r["eps"], r["sup"][f"{family}_s{s}"]) for r in results]
            try:
                fit = fit_rate(pairs)
                rate_fits[f"{family}_s{s}"] = {
                    "eps_values": list(fit.eps_values),
                    "errors": list(fit.errors),
                    "slope": fit.slope,
                    "intercept": fit.intercept,
                    "r_squared": fit.r_squared,
                }
            except DegenerateFit as exc:
                rate_fits[f"{family}_s{s}"] = {"error": str(exc)}

    gamma = {
        "per_eps": {
            _eps_tag(r["eps"]): r["gamma_over_eps2"] for r in results
        },
        "max_halving_ratio": _halving_ratio([r["gamma_over_eps2"] for r in results]),
        "limit": config.bounds["gamma_limit"],
    }
    hypothesis = {
        "per_eps": {
            _eps_tag(r["eps"]): r["hypothesis_lhs_over_eps"] for r in results
        },
        "spread": _spread([r["hypothesis_lhs_over_eps"] for r in results]),
        "amp": config.perturbation_amp,
    }
    conservation = {
        "per_eps": {_eps_tag(r["eps"]): r["mass_drift"] for r in results},
        "limit_run": _relative_drift(limit_states),
    }

    b = config.bounds
    acc = f"_s{s_acc}"
    fluid_fit = rate_fits["fluid" + acc]
    rad_fit = rate_fits["radiation" + acc]
    bounds_report = [
        _bound("fluid_slope", fluid_fit.get("slope"), b["fluid_slope"]),
        _bound("fluid_r_squared", fluid_fit.get("r_squared"), [b["r_squared_min"], math.inf]),
        _bound("radiation_slope", rad_fit.get("slope"), b["radiation_slope"]),
        _bound(
            "gamma_over_eps2_max",
            max(r["gamma_over_eps2"] for r in results),
            [0.0, b["gamma_limit"]],
        ),
        _bound("gamma_halving_ratio", gamma["max_halving_ratio"], [0.0, b["gamma_spread_max"]]),
        _bound("hypothesis_spread", hypothesis["spread"], [0.0, b["hypothesis_spread_max"]]),
        _bound("closure_residual", max(closure_residuals), [0.0, b["closure_residual_max"]]),
        _bound(
            "mass_drift",
            max(max(r["mass_drift"] for r in results), conservation["limit_run"]),
            [0.0, b["mass_drift_max"]],
        ),
    ]
    return rate_fits, gamma, hypothesis, conservation, None, bounds_report


def _bound(name: str, value, window) -> dict:
    lo, hi = window
    passed = value is not None and lo <= value <= hi
    return {
        "name": name,
        "value": value,
        "window": [lo, None if hi == math.inf else hi],
        "passed": bool(passed),
    }


def _run_simulate_eps(config: RunConfig, out_dir: str):
    params = config.params
    eps = config.eps
    base = build_limit_initial(config)
    shapes = build_shapes(config)
    eps_init, _ = well_prepared_init(base, eps, config.perturbation_amp, shapes)

    limit_states = _integrate_sampled(
        base, lambda st, dt: step_limit(st, params, dt), params, config
    )
    eps_states = _integrate_sampled(
        eps_init, lambda st, dt: step_eps(st, params, eps, dt), params, config, eps=eps
    )

    emit_series(
        os.path.join(out_dir, "eps_series.csv"),
        _state_norm_header(config, with_radiation=True),
        _eps_state_rows(eps_states, config),
    )
    rows, records, sup = _error_rows(eps_states, limit_states, config, eps)
    emit_series(os.path.join(out_dir, "errors_series.csv"), _error_header(config), rows)

    gamma_worst, gamma_pass = gamma_bound_check(records, eps, config.bounds["gamma_limit"])
    drift = _relative_drift(eps_states)
    gamma = {"per_eps": {_eps_tag(eps): gamma_worst}, "limit": config.bounds["gamma_limit"]}
    conservation = {"per_eps": {_eps_tag(eps): drift}}
    bounds_report = [
        _bound("gamma_over_eps2_max", gamma_worst, [0.0, config.bounds["gamma_limit"]]),
        _bound("mass_drift", drift, [0.0, config.bounds["mass_drift_max"]]),
    ]
    return {}, gamma, {}, conservation, None, bounds_report


def _run_simulate_limit(config: RunConfig, out_dir: str):
    params = config.params
    base = build_limit_initial(config)
    states = _integrate_sampled(
        base, lambda st, dt: step_limit(st, params, dt), params, config
    )
    rows, residuals = _limit_rows(states, config)
    emit_series(
        os.path.join(out_dir, "limit_series.csv"),
        _state_norm_header(config, with_radiation=False, extra=("closure_residual",)),
        rows,
    )
    drift = _relative_drift(states)
    conservation = {"limit_run": drift}
    bounds_report = [
        _bound("closure_residual", max(residuals), [0.0, config.bounds["closure_residual_max"]]),
        _bound("mass_drift", drift, [0.0, config.bounds["mass_drift_max"]]),
    ]
    return {}, {}, {}, conservation, None, bounds_report


def _run_closure_check(config: RunConfig, out_dir: str):
    base = build_limit_initial(config)
    theta = base.fluid.theta
    ords = make_ordinates(config.n_dims, config.ordinates)
    i0 = limit_I0(theta)
    rad = RadiationMoments(I0=i0, I1=-grad(i0))
    field = KineticField.from_p1(rad, ords)
    eps = config.eps if config.eps is not None else 1.0

    n = ords.n_dims
    measure = 2.0 if n == 1 else 2.0 * math.pi
    weight_defect = abs(ords.weights.sum() - measure)
    odd_defect = float(np.abs(ords.weights @ ords.directions).max())
    second = np.einsum("j,ji,jk->ik", ords.weights, ords.directions, ords.directions)
    second_defect = float(np.abs(second - (measure / n) * np.eye(n)).max())

    per_pair = {}
    worst = 0.0
    for sigma_a, sigma_s in config.sigma_pairs:
        r0, r1 = moment_system_check(field, theta, eps, sigma_a, sigma_s)
        per_pair[f"sigma_a={sigma_a:g},sigma_s={sigma_s:g}"] = {"r0": r0, "r1": r1}
        worst = max(worst, r0, r1)

    closure = {
        "ordinates": config.ordinates,
        "eps": eps,
        "quadrature": {
            "weight_sum_defect": weight_defect,
            "odd_moment_defect": odd_defect,
            "second_moment_defect": second_defect,
        },
        "p1_projection_residual": p1_projection_residual(field, ords),
        "moment_residuals": per_pair,
    }
    bounds_report = [
        _bound("moment_residual", worst, [0.0, config.bounds["moment_residual_max"]]),
        _bound("quadrature_defect", max(weight_defect, odd_defect, second_defect), [0.0, 1e-12]),
    ]
    return {}, {}, {}, {}, closure, bounds_report


def run(config: RunConfig, out_dir: str | None = None, threads: int = 1) -> RunSummary:
    """Execute a run and write its outputs under out_dir.

    Returns the summary; the caller decides how exit_status maps to a
    process exit code (strict mode).
    """
    out_dir = out_dir if out_dir is not None else config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    started = _time.perf_counter()

    if config.mode == "convergence-study":
        parts = _run_convergence(config, out_dir, threads)
    elif config.mode == "simulate-eps":
        parts = _run_simulate_eps(config, out_dir)
    elif config.mode == "simulate-limit":
        parts = _run_simulate_limit(config, out_dir)
    elif config.mode == "closure-check":
        parts = _run_closure_check(config, out_dir)
    else:  # pragma: no cover - parse_config rejects unknown modes
        raise ValueError(f"unknown mode {config.mode!r}")

    rate_fits, gamma, hypothesis, conservation, closure, bounds_report = parts
    exit_status = 0 if all(b["passed"] for b in bounds_report) else 1
    summary = RunSummary(
        mode=config.mode,
        config=config.echo,
        wall_time_s=_time.perf_counter() - started,
        rate_fits=rate_fits,
        gamma=gamma,
        hypothesis=hypothesis,
        conservation=conservation,
        closure=closure,
        bounds_report=bounds_report,
        exit_status=exit_status,
    )
    emit_summary(summary, os.path.join(out_dir, "summary.json"))
    return summary
