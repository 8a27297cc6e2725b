"""Benchmark planner: fly over Willie, then alternate power and trajectory updates.

Both updates replace the convex part of the covertness gap
g(x) = x - h(x), h(x) = x exp(-1/x), by its tangent at the current point.
The resulting constraint is affine in x and lies above g, so every iterate
stays covert.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .detection import covertness_gap, gap_root
from .gm import PlanResult, PowerSchedule
from .model import Scenario, ScenarioError, Trajectory, rate_bound, slot_coefficients

log = logging.getLogger(__name__)

ANGLE_RULES = ("origin", "printed")


@dataclass(frozen=True)
class CiConfig:
    bcd_tolerance: float = 1e-6  # stop when the average rate moves less than this
    max_bcd_iters: int = 50
    cccp_tolerance: float = 1e-10
    cccp_max_iters: int = 100
    max_sweeps: int = 2000
    move_tolerance: float = 1e-9  # m, sweep convergence
    feasibility_tolerance: float = 1e-6
    init_power_scale: float = 0.5
    angle: str = "origin"

    def __post_init__(self):
        for name in ("bcd_tolerance", "cccp_tolerance", "move_tolerance", "feasibility_tolerance"):
            if not getattr(self, name) > 0:
                raise ScenarioError(f"{name} must be > 0")
        for name in ("max_bcd_iters", "cccp_max_iters", "max_sweeps"):
            if getattr(self, name) < 1:
                raise ScenarioError(f"{name} must be >= 1")
        if not 0 < self.init_power_scale <= 1:
            raise ScenarioError("init_power_scale must be in (0, 1]")
        if self.angle not in ANGLE_RULES:
            raise ScenarioError(f"angle must be one of {ANGLE_RULES}")


def _unit(v) -> np.ndarray:
    n = float(np.linalg.norm(v))
    return np.asarray(v, dtype=float) / n if n > 0 else np.zeros(2)


def turn_slot(scenario: Scenario, angle: str = "origin") -> int:
    """Number of full-speed slots toward Willie before turning for q_uF.

    ``angle="origin"`` uses the angle at q_u0 between the headings to Willie
    and to q_uF, which guarantees q_uF stays reachable.  ``"printed"`` uses
    the angle between the headings q_u0 -> q_w and q_w -> q_uF, reduced if
    needed until q_uF is reachable.
    """
    s, N = scenario.step, scenario.N
    q0, qF, qw = scenario.q_u0, scenario.q_uF, scenario.q_w
    L = float(np.linalg.norm(qF - q0))
    to_w = _unit(qw - q0)
    if angle == "origin":
        cos_b = float(to_w @ _unit(qF - q0))
    elif angle == "printed":
        cos_b = float(to_w @ _unit(qF - qw))
    else:
        raise ScenarioError(f"angle must be one of {ANGLE_RULES}")
    num = (N * s) ** 2 - L * L
    den = 2.0 * s * (N * s - L * cos_b)
    n4 = 0 if num <= 0 or den <= 0 else math.floor(num / den)
    n4 = min(n4, math.floor(float(np.linalg.norm(qw - q0)) / s), N)
    while n4 > 0 and np.linalg.norm(qF - (q0 + n4 * s * to_w)) > (N - n4) * s * (1 + 1e-12):
        n4 -= 1
    return int(n4)


def init_trajectory(scenario: Scenario, angle: str = "origin") -> Trajectory:
    s, N = scenario.step, scenario.N
    q0, qF, qw = scenario.q_u0, scenario.q_uF, scenario.q_w
    L2 = float(np.linalg.norm(qw - q0))
    L3 = float(np.linalg.norm(qF - qw))
    n2 = math.ceil(L2 / s - 1e-12)
    n3 = N - math.ceil(L3 / s - 1e-12)
    wp = np.empty((N + 1, 2))
    if n2 <= n3:
        # enough time to reach Willie, loiter above him and still get home
        th2, th3 = _unit(qw - q0), _unit(qF - qw)
        n = np.arange(N + 1)
        wp[:] = qw
        out = n < n2
        wp[out] = q0 + (n[out] * s)[:, None] * th2
        back = n >= n3
        wp[back] = qw + ((n[back] - n3) * s)[:, None] * th3
    else:
        n4 = turn_slot(scenario, angle)
        th2 = _unit(qw - q0)
        n = np.arange(n4 + 1)
        wp[: n4 + 1] = q0 + (n * s)[:, None] * th2
        q_e = wp[n4]
        gap = float(np.linalg.norm(qF - q_e))
        heading = _unit(qF - q_e)
        k = np.arange(1, N - n4 + 1)
        wp[n4 + 1 :] = q_e + np.minimum(k * s, gap)[:, None] * heading
    wp[0] = q0
    wp[N] = qF
    return Trajectory(wp)


def _h(x):
    return x * np.exp(-1.0 / x)


def _h_slope(x):
    return np.exp(-1.0 / x) * (1.0 + 1.0 / x)


def _tangent_max(x_j, epsilon):
    """Largest x allowed by the tangent-linearised constraint at x_j."""
    slope = 1.0 - _h_slope(x_j)
    if np.any(slope <= 0):
        raise FloatingPointError("linearised covertness constraint has non-positive slope")
    return (epsilon + _h(x_j) - _h_slope(x_j) * x_j) / slope


@dataclass
class PowerStepInfo:
    iterations: int
    converged: bool
    history: list = field(default_factory=list)  # per-iteration power arrays


def power_step(
    trajectory: Trajectory,
    p_prev,
    scenario: Scenario,
    cfg: CiConfig = CiConfig(),
    keep_history: bool = False,
):
    """CCCP power update for a fixed trajectory; returns (PowerSchedule, PowerStepInfo)."""
    coeffs = slot_coefficients(scenario, trajectory)
    p = np.array(getattr(p_prev, "p_a", p_prev), dtype=float)
    active = coeffs.p_hat_u > 0
    if p.shape != active.shape:
        raise ValueError(f"expected {active.size} powers, got shape {p.shape}")
    if np.any(p[active] <= 0):
        raise ValueError("power_step needs a strictly positive starting power on active slots")
    tau = coeffs.tau[active]
    cap = math.inf if scenario.p_a_max is None else scenario.p_a_max
    x = p[active] * tau
    history = [p.copy()] if keep_history else []
    converged = False
    it = 0
    for it in range(1, cfg.cccp_max_iters + 1):
        x_new = np.minimum(_tangent_max(x, scenario.epsilon), cap * tau)
        done = np.all(np.abs(x_new - x) <= cfg.cccp_tolerance * x_new)
        x = x_new
        p_iter = np.zeros_like(p)
        p_iter[active] = x / tau
        if keep_history:
            history.append(p_iter)
        if done:
            converged = True
            break
    p_out = np.zeros_like(p)
    p_out[active] = x / tau
    if not converged:
        log.warning("power_step: CCCP did not converge in %d iterations", cfg.cccp_max_iters)
    return PowerSchedule(p_a=p_out, gap=covertness_gap(p_out, coeffs)), PowerStepInfo(it, converged, history)


def covertness_radii(trajectory: Trajectory, power, scenario: Scenario) -> np.ndarray:
    """Planar radius around Willie allowed by the linearised covertness constraint.

    Indexed by waypoint (entry 0 unused).  Slots without power get +inf.
    """
    p = np.asarray(getattr(power, "p_a", power), dtype=float)
    coeffs = slot_coefficients(scenario, trajectory)
    radii = np.full(trajectory.N + 1, np.inf)
    act = (p > 0) & (coeffs.p_hat_u > 0)
    scale = p[act] / (coeffs.p_hat_u[act] * coeffs.d_aw_alpha)  # x = scale * d_uw^2
    x_j = scale * coeffs.d_uw2[act]
    d_max = _tangent_max(x_j, scenario.epsilon) / scale
    radii[1:][act] = np.sqrt(np.maximum(d_max - scenario.H**2, 0.0))
    return radii


def _objective(trajectory: Trajectory, p_a, scenario: Scenario) -> float:
    return float(np.mean(rate_bound(p_a, slot_coefficients(scenario, trajectory))))


def max_covertness_violation(trajectory: Trajectory, p_a, scenario: Scenario) -> float:
    gaps = covertness_gap(np.asarray(p_a, dtype=float), slot_coefficients(scenario, trajectory))
    return float(max(0.0, np.max(gaps - scenario.epsilon)))


@dataclass
class TrajectoryStepInfo:
    iterations: int
    sweeps: int
    converged: bool
    objectives: list = field(default_factory=list)


def trajectory_step(power, q_prev_traj: Trajectory, scenario: Scenario, cfg: CiConfig = CiConfig()):
    """CCCP trajectory update for fixed power; returns (Trajectory, TrajectoryStepInfo).

    Each round linearises covertness at the current waypoints, which turns it
    into a disk around Willie per slot, then moves every waypoint to the
    farthest point from Bob inside its covertness disk and the two speed
    disks of its neighbours (red-black sweeps until nothing moves).
    """
    p = np.asarray(getattr(power, "p_a", power), dtype=float)
    traj = q_prev_traj
    active = np.zeros(traj.N + 1, dtype=bool)
    active[1:] = p > 0
    obj = _objective(traj, p, scenario)
    objectives = [obj]
    total_sweeps = 0
    converged = False
    it = 0
    for it in range(1, cfg.cccp_max_iters + 1):
        radii = covertness_radii(traj, p, scenario)
        Q, sweeps, move = kernels.ci_sweeps(
            traj.waypoints, radii, active, scenario.q_w, scenario.q_b, scenario.step, cfg.max_sweeps, cfg.move_tolerance
        )
        total_sweeps += sweeps
        if move > cfg.move_tolerance:
            log.warning("trajectory_step: sweeps stopped with residual move %.3g m", move)
        cand = Trajectory(Q)
        new_obj = _objective(cand, p, scenario)
        if new_obj < obj - cfg.feasibility_tolerance:
            log.warning("trajectory_step: objective fell from %.12g to %.12g; keeping previous iterate", obj, new_obj)
            break
        gain = new_obj - obj
        traj, obj = cand, new_obj
        objectives.append(obj)
        if gain <= cfg.cccp_tolerance * max(1.0, abs(obj)):
            converged = True
            break
    return traj, TrajectoryStepInfo(it, total_sweeps, converged, objectives)


def bcd_solve(scenario: Scenario, cfg: CiConfig = CiConfig()) -> PlanResult:
    t0 = time.perf_counter()
    traj = init_trajectory(scenario, cfg.angle)
    coeffs = slot_coefficients(scenario, traj)
    active = coeffs.p_hat_u > 0
    p0 = np.zeros(traj.N)
    p0[active] = cfg.init_power_scale * gap_root(scenario.epsilon) / coeffs.tau[active]
    if scenario.p_a_max is not None:
        p0 = np.minimum(p0, scenario.p_a_max)
    p_a = p0
    prev = _objective(traj, p_a, scenario)
    trace = [(0, prev, max_covertness_violation(traj, p_a, scenario))]
    converged = False
    power = None
    for it in range(1, cfg.max_bcd_iters + 1):
        power, _ = power_step(traj, p_a, scenario, cfg)
        p_a = power.p_a
        traj, _ = trajectory_step(power, traj, scenario, cfg)
        obj = _objective(traj, p_a, scenario)
        trace.append((it, obj, max_covertness_violation(traj, p_a, scenario)))
        if abs(obj - prev) <= cfg.bcd_tolerance:
            converged = True
            break
        prev = obj
    if not converged:
        log.warning("bcd_solve: no convergence within %d iterations", cfg.max_bcd_iters)
    coeffs = slot_coefficients(scenario, traj)
    power = PowerSchedule(p_a=p_a, gap=covertness_gap(p_a, coeffs))
    rates = np.asarray(rate_bound(p_a, coeffs), dtype=float)
    t1 = time.perf_counter()
    diag = {
        "iterations": len(trace) - 1,
        "converged": converged,
        "trace": trace,
        "inactive_slots": (np.nonzero(~active)[0] + 1).tolist(),
        "runtime_total_s": t1 - t0,
    }
    return PlanResult("ci", traj, power, rates, float(np.mean(rates)), diag)
