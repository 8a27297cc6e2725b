"""Trajectory and power planning for a jamming UAV that shields covert transmissions."""
from ._backend import available_backends, get_backend, set_backend, use_backend
from .ci import CiConfig, bcd_solve, init_trajectory, power_step, trajectory_step
from .gm import PlanResult, PowerSchedule, plan, plan_trajectory, solve_power
from .model import (
    CovertnessViolation,
    InfeasibleScenario,
    Scenario,
    ScenarioError,
    SlotCoefficients,
    Trajectory,
    average_covert_rate,
    outage_probability,
    rate_bound,
    slot_coefficients,
)
from .scenario_io import load_scenario, parse_scenario_text

__version__ = "0.1.0"
