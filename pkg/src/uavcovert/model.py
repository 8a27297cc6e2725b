"""Scenario definition, channel gains, outage and the covert-rate bound.

All powers, gains and noise levels are linear (Watts / ratios).  Conversion
from dB happens once, in :mod:`uavcovert.scenario_io`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SPEED_SLACK = 1e-9
COVERTNESS_FLAG_TOL = 1e-6


class ScenarioError(ValueError):
    """Invalid scenario parameters."""


class InfeasibleScenario(ScenarioError):
    """The UAV cannot reach its final position within the flight period."""

    def __init__(self, message: str, *, distance: float, reach: float):
        super().__init__(message)
        self.distance = distance
        self.reach = reach


class CovertnessViolation(RuntimeError):
    def __init__(self, slots, gaps, epsilon):
        self.slots = list(slots)
        self.gaps = list(gaps)
        super().__init__(
            f"covertness exceeded (epsilon={epsilon}) at slots {self.slots[:10]}"
            + (" ..." if len(self.slots) > 10 else "")
        )


def _vec2(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(-1)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{name} must be a finite 2-vector, got {value!r}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Scenario:
    q_a: np.ndarray
    q_b: np.ndarray
    q_w: np.ndarray
    q_u0: np.ndarray
    q_uF: np.ndarray
    H: float
    v_max: float
    sigma_t: float
    N: int
    beta_0: float
    sigma_b2: float
    sigma_w2: float
    rho_b: float
    epsilon: float
    p_hat_u: np.ndarray = field(default=0.01)  # scalar or per-slot, normalised to shape (N,)
    alpha: float = 3.0
    p_a_max: Optional[float] = None

    def __post_init__(self):
        for name in ("q_a", "q_b", "q_w", "q_u0", "q_uF"):
            object.__setattr__(self, name, _vec2(getattr(self, name), name))
        n = self.N
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ScenarioError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(n))
        for name in ("H", "v_max", "sigma_t", "beta_0", "alpha"):
            val = float(getattr(self, name))
            if not (math.isfinite(val) and val > 0):
                raise ScenarioError(f"{name} must be positive, got {getattr(self, name)!r}")
            object.__setattr__(self, name, val)
        for name in ("sigma_b2", "sigma_w2"):
            val = float(getattr(self, name))
            if not (math.isfinite(val) and val >= 0):
                raise ScenarioError(f"{name} must be non-negative, got {val!r}")
            object.__setattr__(self, name, val)
        for name in ("rho_b", "epsilon"):
            val = float(getattr(self, name))
            if not 0.0 < val < 1.0:
                raise ScenarioError(f"{name} must lie in (0, 1), got {val!r}")
            object.__setattr__(self, name, val)
        p_hat = np.array(self.p_hat_u, dtype=float).reshape(-1)
        if p_hat.size == 1:
            p_hat = np.full(self.N, p_hat[0])
        if p_hat.shape != (self.N,):
            raise ScenarioError(f"p_hat_u needs 1 or N={self.N} values, got {p_hat.size}")
        if np.any(~np.isfinite(p_hat)) or np.any(p_hat < 0):
            raise ScenarioError("p_hat_u values must be finite and >= 0")
        p_hat.setflags(write=False)
        object.__setattr__(self, "p_hat_u", p_hat)
        if self.p_a_max is not None:
            cap = float(self.p_a_max)
            if not cap > 0:
                raise ScenarioError(f"p_a_max must be positive, got {cap!r}")
            object.__setattr__(self, "p_a_max", cap)
        if np.allclose(self.q_b, self.q_w):
            raise ScenarioError("q_b and q_w must differ")
        distance = float(np.linalg.norm(self.q_uF - self.q_u0))
        reach = self.N * self.step
        if distance > reach * (1 + SPEED_SLACK):
            raise InfeasibleScenario(
                f"final position is {distance:.6g} m away but only {reach:.6g} m are reachable "
                f"in N={self.N} slots",
                distance=distance,
                reach=reach,
            )

    # -- derived quantities -------------------------------------------------
    @property
    def step(self) -> float:
        """Maximum distance covered in one slot."""
        return self.v_max * self.sigma_t

    @property
    def T(self) -> float:
        return self.N * self.sigma_t

    @property
    def d_ab(self) -> float:
        return float(np.linalg.norm(self.q_a - self.q_b))

    @property
    def d_aw(self) -> float:
        return float(np.linalg.norm(self.q_a - self.q_w))

    @property
    def phi(self) -> float:
        return self.beta_0 / self.d_aw**self.alpha

    @property
    def eta(self) -> float:
        return -math.log1p(-self.rho_b) * self.d_ab ** (-self.alpha)

    def replace(self, **changes) -> "Scenario":
        kwargs = {f: getattr(self, f) for f in self.__dataclass_fields__}
        if "N" in changes and "p_hat_u" not in changes:
            p_hat = np.unique(self.p_hat_u)
            if p_hat.size != 1:
                raise ScenarioError("cannot change N with a per-slot p_hat_u; pass p_hat_u too")
            kwargs["p_hat_u"] = float(p_hat[0])
        kwargs.update(changes)
        return Scenario(**kwargs)

    @classmethod
    def paper_default(
        cls,
        T: float = 350.0,
        epsilon: float = 0.1,
        p_hat_u: float = 0.01,
        alpha: float = 3.0,
        sigma_t: float = 0.5,
        **overrides,
    ) -> "Scenario":
        """The two-dimensional layout used throughout the numerical study."""
        beta_0 = 1e-6  # -60 dB
        noise = beta_0 / 1e8  # beta_0 / sigma^2 = 80 dB
        N = round(T / sigma_t)
        kwargs = dict(
            q_a=(0.0, 0.0),
            q_b=(200.0, 0.0),
            q_w=(200.0, 200.0),
            q_u0=(-100.0, 100.0),
            q_uF=(500.0, 100.0),
            H=100.0,
            v_max=3.0,
            sigma_t=sigma_t,
            N=N,
            beta_0=beta_0,
            sigma_b2=noise,
            sigma_w2=noise,
            rho_b=0.1,
            epsilon=epsilon,
            p_hat_u=p_hat_u,
            alpha=alpha,
        )
        kwargs.update(overrides)
        return cls(**kwargs)


@dataclass(frozen=True)
class Trajectory:
    waypoints: np.ndarray  # (N+1, 2)

    def __post_init__(self):
        wp = np.array(self.waypoints, dtype=float)
        if wp.ndim != 2 or wp.shape[1] != 2 or wp.shape[0] < 2:
            raise ValueError(f"waypoints must have shape (N+1, 2), got {wp.shape}")
        wp.setflags(write=False)
        object.__setattr__(self, "waypoints", wp)

    @property
    def N(self) -> int:
        return self.waypoints.shape[0] - 1

    def step_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.waypoints, axis=0), axis=1)

    def violations(self, scenario: Scenario) -> dict:
        """Per-constraint feasibility report; empty dict means feasible."""
        out = {}
        if self.N != scenario.N:
            out["N"] = (self.N, scenario.N)
            return out
        start = float(np.linalg.norm(self.waypoints[0] - scenario.q_u0))
        end = float(np.linalg.norm(self.waypoints[-1] - scenario.q_uF))
        if start > 1e-9:
            out["start"] = start
        if end > 1e-9:
            out["end"] = end
        steps = self.step_lengths()
        bad = np.nonzero(steps > scenario.step * (1 + SPEED_SLACK))[0]
        if bad.size:
            out["speed"] = (bad + 1).tolist()
        return out

    def is_feasible(self, scenario: Scenario) -> bool:
        return not self.violations(scenario)


@dataclass(frozen=True)
class SlotCoefficients:
    """Per-slot channel coefficients for UAV positions q_u[1..N].

    Array fields have one entry per slot; scalar fields are shared by all
    slots.  Indexing returns the coefficients of a subset of slots.
    """

    d_ub2: np.ndarray
    d_uw2: np.ndarray
    gain_ub: np.ndarray
    gain_uw: np.ndarray
    p_hat_u: np.ndarray
    gamma_w: np.ndarray
    tau: np.ndarray
    psi: np.ndarray
    kappa: np.ndarray
    phi: float
    eta: float
    beta_0: float
    d_ab_alpha: float
    d_aw_alpha: float
    sigma_b2: float
    sigma_w2: float
    rho_b: float

    _ARRAYS = ("d_ub2", "d_uw2", "gain_ub", "gain_uw", "p_hat_u", "gamma_w", "tau", "psi", "kappa")

    @classmethod
    def at(cls, scenario: Scenario, positions, p_hat_u=None) -> "SlotCoefficients":
        pos = np.asarray(positions, dtype=float)
        p_hat = scenario.p_hat_u if p_hat_u is None else np.asarray(p_hat_u, dtype=float)
        h2 = scenario.H**2
        d_ub2 = np.sum((pos - scenario.q_b) ** 2, axis=-1) + h2
        d_uw2 = np.sum((pos - scenario.q_w) ** 2, axis=-1) + h2
        if p_hat_u is None and p_hat.shape != d_ub2.shape:
            # positions other than the N waypoints: only a constant P_hat_u is meaningful
            if np.unique(p_hat).size != 1:
                raise ValueError("per-slot p_hat_u needs one position per slot")
            p_hat = p_hat[0]
        p_hat = np.broadcast_to(p_hat, d_ub2.shape).astype(float)
        gain_ub = scenario.beta_0 / d_ub2
        gain_uw = scenario.beta_0 / d_uw2
        d_ab_alpha = scenario.d_ab**scenario.alpha
        d_aw_alpha = scenario.d_aw**scenario.alpha
        eta = scenario.eta
        with np.errstate(divide="ignore"):
            tau = d_uw2 / (p_hat * d_aw_alpha)
            kappa = eta * d_aw_alpha / p_hat
        psi = eta * scenario.beta_0 / (p_hat * gain_ub + scenario.sigma_b2)
        return cls(
            d_ub2=d_ub2,
            d_uw2=d_uw2,
            gain_ub=gain_ub,
            gain_uw=gain_uw,
            p_hat_u=p_hat,
            gamma_w=p_hat * gain_uw,
            tau=tau,
            psi=psi,
            kappa=kappa,
            phi=scenario.phi,
            eta=eta,
            beta_0=scenario.beta_0,
            d_ab_alpha=d_ab_alpha,
            d_aw_alpha=d_aw_alpha,
            sigma_b2=scenario.sigma_b2,
            sigma_w2=scenario.sigma_w2,
            rho_b=scenario.rho_b,
        )

    def __getitem__(self, idx) -> "SlotCoefficients":
        kwargs = {f: getattr(self, f) for f in self.__dataclass_fields__}
        for name in self._ARRAYS:
            kwargs[name] = np.asarray(kwargs[name])[idx]
        return SlotCoefficients(**kwargs)

    def __len__(self) -> int:
        return int(np.size(self.d_ub2))

    def psi_bar(self, p_a) -> np.ndarray:
        """Negative trajectory-objective coefficient; zero when p_a = 0."""
        return math.log1p(-self.rho_b) * np.asarray(p_a, dtype=float) * self.beta_0 / self.d_ab_alpha

    def nu(self, p_a, p_u, rate) -> np.ndarray:
        p_a = np.asarray(p_a, dtype=float)
        return (
            np.expm1(np.asarray(rate, dtype=float) * math.log(2.0))
            * (np.asarray(p_u, dtype=float) * self.gain_ub + self.sigma_b2)
            / (p_a * self.beta_0 / self.d_ab_alpha)
        )


def slot_coefficients(scenario: Scenario, trajectory: Trajectory) -> SlotCoefficients:
    """Coefficients for slots n = 1..N (waypoint 0 carries no transmission)."""
    return SlotCoefficients.at(scenario, trajectory.waypoints[1:])


def uav_gain(q_u, q_ground, H: float, beta_0: float):
    q_u = np.asarray(q_u, dtype=float)
    q_ground = np.asarray(q_ground, dtype=float)
    if H <= 0:
        raise ValueError("H must be positive")
    return beta_0 / (np.sum((q_u - q_ground) ** 2, axis=-1) + H * H)


def outage_probability(p_a, p_u, rate, coeffs: SlotCoefficients, scenario: Scenario | None = None):
    """Probability that Bob's capacity does not support ``rate`` for jamming power ``p_u``."""
    p_a = np.asarray(p_a, dtype=float)
    if np.any(p_a <= 0):
        raise ValueError("outage probability needs p_a > 0")
    return -np.expm1(-coeffs.nu(p_a, p_u, rate))


def rate_bound(p_a, coeffs: SlotCoefficients, scenario: Scenario | None = None):
    """Largest rate whose outage stays below rho_b for every jamming power in [0, P_hat_u]."""
    p_a = np.asarray(p_a, dtype=float)
    if np.any(p_a < 0):
        raise ValueError("p_a must be >= 0")
    return np.log1p(coeffs.psi * p_a) / math.log(2.0)


def average_covert_rate(trajectory: Trajectory, power, scenario: Scenario, *, check: bool = True) -> float:
    """Mean of the per-slot rate bound over slots 1..N.

    ``power`` is a :class:`~uavcovert.gm.PowerSchedule` or an array of N
    powers.  With ``check`` set, slots whose covertness gap exceeds epsilon by
    more than 1e-6 raise :class:`CovertnessViolation`.
    """
    from .detection import covertness_gap

    p_a = np.asarray(getattr(power, "p_a", power), dtype=float)
    coeffs = slot_coefficients(scenario, trajectory)
    if p_a.shape != (len(coeffs),):
        raise ValueError(f"expected {len(coeffs)} powers, got shape {p_a.shape}")
    if check:
        gaps = covertness_gap(p_a, coeffs)
        bad = np.nonzero(gaps > scenario.epsilon + COVERTNESS_FLAG_TOL)[0]
        if bad.size:
            raise CovertnessViolation(bad + 1, gaps[bad], scenario.epsilon)
    return float(np.mean(rate_bound(p_a, coeffs, scenario)))
