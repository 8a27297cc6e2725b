"""Greedy per-slot planner: steer toward the best distance ratio, then spend the covert budget."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .detection import covertness_gap, gap_root
from .geometry import hover_point
from .model import Scenario, ScenarioError, Trajectory, rate_bound, slot_coefficients

RETURN_RULES = ("intersection", "paper")
HOVER_TOL = 1e-6


@dataclass(frozen=True)
class PowerSchedule:
    p_a: np.ndarray  # per slot, W
    gap: np.ndarray  # covertness gap per slot

    def __post_init__(self):
        for name in ("p_a", "gap"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.p_a.size

    @property
    def active(self) -> np.ndarray:
        return self.p_a > 0


@dataclass
class PlanResult:
    method: str
    trajectory: Trajectory
    power: PowerSchedule
    rates: np.ndarray
    average_rate: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def hover_slot(self):
        return self.diagnostics.get("hover_slot")


def plan_trajectory(scenario: Scenario, return_rule: str = "intersection") -> Trajectory:
    """Waypoints q[0..N], each chosen greedily for the next slot.

    ``return_rule="intersection"`` maximises the slot objective over the part
    of the one-slot disk from which q_uF is still reachable.  ``"paper"``
    takes the unconstrained greedy point when it keeps q_uF reachable and
    otherwise flies straight at q_uF.
    """
    if return_rule not in RETURN_RULES:
        raise ScenarioError(f"unknown return_rule {return_rule!r}; expected one of {RETURN_RULES}")
    hover = hover_point(scenario.q_b, scenario.q_w, scenario.H)
    wp = kernels.gm_waypoints(
        scenario.q_u0,
        scenario.q_uF,
        scenario.q_b,
        scenario.q_w,
        scenario.H,
        hover,
        scenario.step,
        scenario.N,
        paper_rule=return_rule == "paper",
    )
    return Trajectory(wp)


def solve_power(trajectory: Trajectory, scenario: Scenario) -> PowerSchedule:
    """Largest per-slot power meeting the covertness constraint with equality.

    Slots without jamming power (P_hat_u = 0) get zero power.
    """
    x_star = gap_root(scenario.epsilon)
    coeffs = slot_coefficients(scenario, trajectory)
    active = coeffs.p_hat_u > 0
    p_a = np.zeros(len(coeffs))
    p_a[active] = x_star / coeffs.tau[active]
    if scenario.p_a_max is not None:
        p_a = np.minimum(p_a, scenario.p_a_max)
    return PowerSchedule(p_a=p_a, gap=covertness_gap(p_a, coeffs))


def hovering_slots(trajectory: Trajectory, scenario: Scenario, tol: float = HOVER_TOL) -> np.ndarray:
    """Slot indices (1-based) whose waypoint sits on the hover point."""
    hover = hover_point(scenario.q_b, scenario.q_w, scenario.H)
    d = np.linalg.norm(trajectory.waypoints[1:] - hover, axis=1)
    return np.nonzero(d <= tol)[0] + 1


def hover_slot(trajectory: Trajectory, scenario: Scenario, tol: float = HOVER_TOL):
    """First hovering slot, or None."""
    hits = hovering_slots(trajectory, scenario, tol)
    return int(hits[0]) if hits.size else None


def plan(scenario: Scenario, return_rule: str = "intersection") -> PlanResult:
    t0 = time.perf_counter()
    traj = plan_trajectory(scenario, return_rule)
    t1 = time.perf_counter()
    power = solve_power(traj, scenario)
    coeffs = slot_coefficients(scenario, traj)
    rates = np.asarray(rate_bound(power.p_a, coeffs), dtype=float)
    t2 = time.perf_counter()
    hovering = hovering_slots(traj, scenario)
    diag = {
        "return_rule": return_rule,
        "hover_slot": int(hovering[0]) if hovering.size else None,
        "hover_slots": int(hovering.size),
        "inactive_slots": (np.nonzero(coeffs.p_hat_u <= 0)[0] + 1).tolist(),
        "runtime_trajectory_s": t1 - t0,
        "runtime_power_s": t2 - t1,
        "runtime_total_s": t2 - t0,
    }
    return PlanResult("gm", traj, power, rates, float(np.mean(rates)), diag)
