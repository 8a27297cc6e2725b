"""Running planners on scenario files and writing their results."""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend, ci, gm
from .detection import covertness_gap, detection_report, simulate_radiometer
from .gm import PlanResult
from .model import CovertnessViolation, Scenario, ScenarioError, SlotCoefficients, slot_coefficients
from .scenario_io import ParsedScenario, scenario_to_dict

SCHEMA_VERSION = 1
WRITE_GAP_TOL = 1e-9
METHODS = ("gm", "ci")
SWEEP_PARAMS = ("T", "epsilon", "p_hat_u", "q_w", "q_b")
RUNTIME_KEYS = ("runtime_trajectory_s", "runtime_power_s", "runtime_total_s")


def _fmt(x) -> str:
    """Shortest round-trip text for a float; stable across runs."""
    return repr(float(x))


def _header(kind: str) -> str:
    return f"# uavcovert {kind} schema v{SCHEMA_VERSION}\n"


def methods_from(spec: str | list) -> list:
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    items = [m.strip() for m in items if m.strip()]
    if not items:
        raise ScenarioError("method list is empty")
    out = []
    for m in items:
        for name in METHODS if m == "both" else (m,):
            if name not in METHODS:
                raise ScenarioError(f"unknown method {name!r}; expected gm, ci or both")
            if name not in out:
                out.append(name)
    return out


def run_method(scenario: Scenario, method: str, options: dict | None = None, ci_config: ci.CiConfig | None = None) -> PlanResult:
    options = options or {}
    if method == "gm":
        return gm.plan(scenario, options.get("return_rule", "intersection"))
    if method == "ci":
        return ci.bcd_solve(scenario, ci_config or ci.CiConfig())
    raise ScenarioError(f"unknown method {method!r}")


def validate_result(result: PlanResult, scenario: Scenario) -> None:
    """Re-check covertness and flight constraints right before anything is written."""
    coeffs = slot_coefficients(scenario, result.trajectory)
    gaps = covertness_gap(result.power.p_a, coeffs)
    bad = np.nonzero(gaps > scenario.epsilon + WRITE_GAP_TOL)[0]
    if bad.size:
        raise CovertnessViolation(bad + 1, gaps[bad], scenario.epsilon)
    problems = result.trajectory.violations(scenario)
    if problems:
        raise RuntimeError(f"{result.method} trajectory infeasible: {problems}")


def write_trajectory_csv(path, result: PlanResult, scenario: Scenario) -> None:
    validate_result(result, scenario)
    coeffs = slot_coefficients(scenario, result.trajectory)
    report = _safe_report(result.power.p_a, coeffs)
    wp = result.trajectory.waypoints
    with open(path, "w", newline="") as fh:
        fh.write(_header("trajectory"))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "x", "y", "p_a_W", "R_b_bps_hz", "xi_star", "covertness_gap"])
        w.writerow([0, _fmt(wp[0, 0]), _fmt(wp[0, 1]), "", "", "", ""])
        for n in range(1, wp.shape[0]):
            i = n - 1
            xi = report[i]
            w.writerow([
                n, _fmt(wp[n, 0]), _fmt(wp[n, 1]), _fmt(result.power.p_a[i]), _fmt(result.rates[i]),
                "" if xi is None else _fmt(xi), _fmt(result.power.gap[i]),
            ])


def _safe_report(p_a, coeffs: SlotCoefficients) -> list:
    """Minimum detection error per slot; None where Willie sees no jamming."""
    jammed = coeffs.gamma_w > 0
    out = [None] * len(coeffs)
    if np.any(jammed):
        xi = detection_report(np.asarray(p_a)[jammed], coeffs[jammed]).min_error
        for i, v in zip(np.nonzero(jammed)[0], np.atleast_1d(xi)):
            out[i] = float(v)
    return out


def write_iterations_csv(path, result: PlanResult) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_header("ci_iterations"))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "objective", "max_constraint_violation"])
        for it, obj, viol in result.diagnostics["trace"]:
            w.writerow([it, _fmt(obj), _fmt(viol)])


def summary_dict(result: PlanResult, parsed: ParsedScenario, seed: int, extra: dict | None = None) -> dict:
    diag = {k: v for k, v in result.diagnostics.items() if k != "trace" and k not in RUNTIME_KEYS}
    out = {
        "schema_version": SCHEMA_VERSION,
        "method": result.method,
        "average_rate_bps_hz": result.average_rate,
        "hover_slot": result.diagnostics.get("hover_slot"),
        "runtimes_s": {k: v for k, v in result.diagnostics.items() if k in RUNTIME_KEYS},
        "seed": seed,
        "backend": _backend.get_backend(),
        "diagnostics": diag,
        "scenario": scenario_to_dict(parsed.scenario),
        "options": parsed.options,
        "config_echo": parsed.echo,
        "source": parsed.source,
    }
    if extra:
        out.update(extra)
    return out


def write_json(path, data: dict) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_scenario(
    parsed: ParsedScenario,
    methods,
    out_dir,
    seed: int = 0,
    ci_config: ci.CiConfig | None = None,
) -> dict:
    """Plan with each method and write ``{method}_trajectory.csv`` / ``{method}_summary.json``."""
    methods = methods_from(methods)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = ci_config or ci.CiConfig()
    results = {}
    for method in methods:
        res = run_method(parsed.scenario, method, parsed.options, cfg)
        write_trajectory_csv(out_dir / f"{method}_trajectory.csv", res, parsed.scenario)
        extra = {}
        if method == "ci":
            write_iterations_csv(out_dir / "ci_iterations.csv", res)
            extra["ci_config"] = cfg.__dict__.copy()
        write_json(out_dir / f"{method}_summary.json", summary_dict(res, parsed, seed, extra))
        results[method] = res
    return results


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    methods: tuple = METHODS
    seed: int = 0

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ScenarioError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {self.param!r}")
        if not self.values:
            raise ScenarioError("sweep value list is empty")
        object.__setattr__(self, "methods", tuple(methods_from(list(self.methods))))
        object.__setattr__(self, "values", tuple(self.values))


def apply_param(scenario: Scenario, param: str, value) -> Scenario:
    if param == "T":
        ratio = float(value) / scenario.sigma_t
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ScenarioError(f"T = {value} is not a whole number of slots")
        changes = {"N": int(round(ratio))}
        if np.unique(scenario.p_hat_u).size == 1:
            changes["p_hat_u"] = float(scenario.p_hat_u[0])
        return scenario.replace(**changes)
    if param in ("q_w", "q_b"):
        return scenario.replace(**{param: tuple(float(v) for v in value)})
    return scenario.replace(**{param: float(value)})


def _value_text(value) -> str:
    if isinstance(value, (tuple, list, np.ndarray)):
        return " ".join(_fmt(v) for v in value)
    return _fmt(value)


def _sweep_job(job):
    scenario, param, value, method, options, cfg = job
    row = {"param": param, "value": _value_text(value), "method": method}
    t0 = time.perf_counter()
    try:
        sc = apply_param(scenario, param, value)
        res = run_method(sc, method, options, cfg)
        validate_result(res, sc)
        row.update(avg_rate=res.average_rate, status="ok", error="")
    except Exception as exc:  # recorded per run; the sweep carries on
        row.update(avg_rate=math.nan, status="failed", error=f"{type(exc).__name__}: {exc}")
    row["runtime_s"] = time.perf_counter() - t0
    return row


def run_sweep(spec: SweepSpec, parsed: ParsedScenario, workers: int = 1, ci_config: ci.CiConfig | None = None) -> list:
    cfg = ci_config or ci.CiConfig()
    jobs = [(parsed.scenario, spec.param, v, m, parsed.options, cfg) for v in spec.values for m in spec.methods]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_job, jobs))
    else:
        rows = [_sweep_job(j) for j in jobs]
    by_value = {}
    for row in rows:
        by_value.setdefault(row["value"], {})[row["method"]] = row["avg_rate"]
    for row in rows:
        rates = by_value[row["value"]]
        delta = rates.get("gm", math.nan) - rates.get("ci", math.nan)
        row["gm_minus_ci"] = delta
    return rows


def write_sweep_csv(path, rows: list) -> None:
    cols = ["param", "value", "method", "avg_rate", "runtime_s", "gm_minus_ci", "status", "error"]
    with open(path, "w", newline="") as fh:
        fh.write(_header("sweep"))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([
                _fmt(row[c]) if isinstance(row[c], float) and not math.isnan(row[c])
                else ("" if isinstance(row[c], float) else row[c])
                for c in cols
            ])


# ---------------------------------------------------------------------------
# detector simulation
# ---------------------------------------------------------------------------
def simulate_detector(
    parsed: ParsedScenario,
    out_dir,
    seed: int = 0,
    slot: int | None = None,
    p_a: float | None = None,
    m=None,
    samples: int = 1_000_000,
) -> dict:
    """Monte Carlo radiometer at one slot of the GM plan against the closed forms."""
    sc = parsed.scenario
    plan = gm.plan(sc, parsed.options.get("return_rule", "intersection"))
    if slot is None:
        slot = plan.hover_slot or max(1, sc.N // 2)
    if not 1 <= slot <= sc.N:
        raise ScenarioError(f"slot must be in 1..{sc.N}, got {slot}")
    coeffs = slot_coefficients(sc, plan.trajectory)[slot - 1 : slot]
    if not float(coeffs.gamma_w[0]) > 0:
        raise ScenarioError(f"slot {slot} has no jamming power; detector statistics are degenerate")
    power = float(plan.power.p_a[slot - 1]) if p_a is None else float(p_a)
    if not power > 0:
        raise ScenarioError("p_a must be > 0")
    emp = simulate_radiometer(sc, coeffs, power, m=m, samples=samples, seed=seed)
    rep = detection_report(np.array([power]), coeffs)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "detector.csv", "w", newline="") as fh:
        fh.write(_header("detector"))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "threshold", "false_alarm", "miss_detection", "total"])
        for t, fa, md in zip(emp.thresholds, emp.false_alarm, emp.miss_detection):
            w.writerow(["grid", _fmt(t), _fmt(fa), _fmt(md), _fmt(fa + md)])
        i = emp.argmin
        w.writerow(["empirical_min", _fmt(emp.thresholds[i]), _fmt(emp.false_alarm[i]), _fmt(emp.miss_detection[i]), _fmt(emp.min_total)])
        w.writerow([
            "closed_form", _fmt(rep.optimal_threshold[0]), _fmt(rep.false_alarm[0]),
            _fmt(rep.miss_detection[0]), _fmt(rep.min_error[0]),
        ])
    summary = {
        "schema_version": SCHEMA_VERSION,
        "slot": slot,
        "p_a_W": power,
        "m": None if m is None else float(m),
        "samples": samples,
        "seed": seed,
        "empirical_min_total": emp.min_total,
        "empirical_best_threshold": emp.best_threshold,
        "closed_form_min_total": float(rep.min_error[0]),
        "closed_form_threshold": float(rep.optimal_threshold[0]),
        "abs_difference": abs(emp.min_total - float(rep.min_error[0])),
        "config_echo": parsed.echo,
    }
    write_json(out_dir / "detector_summary.json", summary)
    return summary


# ---------------------------------------------------------------------------
# scaling benchmark
# ---------------------------------------------------------------------------
def _best_time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def loglog_slope(ns, times) -> float | None:
    ns = np.asarray(ns, dtype=float)
    times = np.asarray(times, dtype=float)
    if ns.size < 2:
        return None
    return float(np.polyfit(np.log(ns), np.log(times), 1)[0])


@dataclass
class BenchTable:
    rows: list = field(default_factory=list)  # dicts with N and timings
    slopes: dict = field(default_factory=dict)
    backend: str = ""


def bench_scaling(
    N_list,
    base: Scenario | None = None,
    methods=METHODS,
    repeats: int = 5,
    ci_repeats: int = 1,
    ci_config: ci.CiConfig | None = None,
) -> BenchTable:
    """Runtime per N with the flight period fixed (the slot length shrinks as N grows)."""
    N_list = [int(n) for n in N_list]
    if N_list != sorted(N_list):
        raise ScenarioError("N_list must be ascending")
    methods = methods_from(list(methods))
    base = base or Scenario.paper_default()
    T = base.T
    cfg = ci_config or ci.CiConfig()
    # compile / warm caches outside the timed region
    warm = base.replace(sigma_t=T / 10, N=10, p_hat_u=float(base.p_hat_u[0]))
    gm.plan(warm)
    if "ci" in methods:
        ci.bcd_solve(warm, cfg)
    table = BenchTable(backend=_backend.get_backend())
    for N in N_list:
        sc = base.replace(sigma_t=T / N, N=N, p_hat_u=float(base.p_hat_u[0]))
        row = {"N": N}
        if "gm" in methods:
            row["gm_trajectory_s"] = _best_time(lambda: gm.plan_trajectory(sc), repeats)
            row["gm_total_s"] = _best_time(lambda: gm.plan(sc), repeats)
        if "ci" in methods:
            row["ci_total_s"] = _best_time(lambda: ci.bcd_solve(sc, cfg), ci_repeats)
        table.rows.append(row)
    for key in ("gm_trajectory_s", "gm_total_s", "ci_total_s"):
        if all(key in r for r in table.rows):
            table.slopes[key] = loglog_slope([r["N"] for r in table.rows], [r[key] for r in table.rows])
    return table


def write_bench_csv(path, table: BenchTable) -> None:
    keys = [k for k in ("gm_trajectory_s", "gm_total_s", "ci_total_s") if table.rows and k in table.rows[0]]
    with open(path, "w", newline="") as fh:
        fh.write(_header("bench"))
        fh.write(f"# backend = {table.backend}\n")
        for k in keys:
            slope = table.slopes.get(k)
            fh.write(f"# slope {k} = {'' if slope is None else _fmt(slope)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N"] + keys)
        for r in table.rows:
            w.writerow([r["N"]] + [_fmt(r[k]) for k in keys])


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
