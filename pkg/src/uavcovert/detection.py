"""Willie's radiometer: closed-form error rates and a Monte Carlo detector.

Under the large-m limit the average received power at Willie is
``sigma_w2 + U`` without a transmission and ``sigma_w2 + phi*P_a*Z + U`` with
one, where ``U ~ Uniform[0, Gamma]`` is the jamming contribution and
``Z ~ Exp(1)`` the Rayleigh fading gain of Alice's link.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Scenario, SlotCoefficients

SERIES_CUTOFF = 1e-8
THRESHOLD_GRID_POINTS = 2000


def _loadings(p_a, coeffs: SlotCoefficients):
    """x = P_a * tau, the quantity the covertness gap depends on."""
    with np.errstate(invalid="ignore"):  # 0 * inf where P_hat_u = 0
        return np.asarray(p_a, dtype=float) * coeffs.tau


def gap_function(x):
    """g(x) = x (1 - exp(-1/x)), extended by g(0) = 0."""
    x = np.asarray(x, dtype=float)
    out = np.array(x, dtype=float, copy=True)
    big = x >= SERIES_CUTOFF
    with np.errstate(divide="ignore", over="ignore"):
        out[big] = -x[big] * np.expm1(-1.0 / x[big])
    return out if out.ndim else float(out)


def gap_slope(x):
    """g'(x) = 1 - exp(-1/x) (1 + 1/x); positive for every x > 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inv = 1.0 / x
        # 1 - e^{-u}(1+u) = -expm1(-u) - u e^{-u}, accurate for small u
        slope = -np.expm1(-inv) - inv * np.exp(-inv)
    slope = np.where(x < SERIES_CUTOFF, 1.0, slope)
    return slope if slope.ndim else float(slope)


def gap_root(epsilon: float, tol: float = 1e-15) -> float:
    """Unique x with g(x) = epsilon, by bisection on [epsilon, 1/(2(1-epsilon))].

    Returns the lower end of the final bracket so that g(x) <= epsilon.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"covertness tolerance must be in (0, 1), got {epsilon!r}")
    lo, hi = epsilon, 1.0 / (2.0 * (1.0 - epsilon))
    # g(x) < x and g(x) > 1 - 1/(2x) bracket the root
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= tol * hi:
            break
        if gap_function(mid) <= epsilon:
            lo = mid
        else:
            hi = mid
    return lo


def false_alarm(threshold, coeffs: SlotCoefficients, scenario: Scenario | None = None):
    t = np.asarray(threshold, dtype=float) - coeffs.sigma_w2
    gamma = coeffs.gamma_w
    with np.errstate(divide="ignore", invalid="ignore"):
        mid = 1.0 - t / gamma
    out = np.where(t <= 0, 1.0, np.where(t <= gamma, mid, 0.0))
    return out if out.ndim else float(out)


def miss_detection(threshold, p_a, coeffs: SlotCoefficients, scenario: Scenario | None = None):
    p_a = np.asarray(p_a, dtype=float)
    if np.any(p_a <= 0):
        raise ValueError("miss detection needs p_a > 0")
    t = np.asarray(threshold, dtype=float) - coeffs.sigma_w2
    gamma = coeffs.gamma_w
    s = coeffs.phi * p_a  # mean received power of Alice's signal at Willie
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lam = s / gamma * np.expm1(-t / s) + t / gamma
        omega = 1.0 - s / gamma * (np.exp(-(t - gamma) / s) - np.exp(-t / s))
    out = np.where(t <= 0, 0.0, np.where(t <= gamma, lam, omega))
    return out if out.ndim else float(out)


def optimal_threshold(coeffs: SlotCoefficients):
    return coeffs.gamma_w + coeffs.sigma_w2


def min_error_rate(p_a, coeffs: SlotCoefficients):
    """Minimum of false alarm + miss detection over the radiometer threshold."""
    p_a = np.asarray(p_a, dtype=float)
    gamma = np.asarray(coeffs.gamma_w, dtype=float)
    if np.any(gamma <= 0):
        raise ValueError("minimum detection error needs an active jammer (Gamma > 0)")
    if np.any(p_a < 0):
        raise ValueError("p_a must be >= 0")
    ratio = coeffs.phi * p_a / gamma
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = 1.0 + np.expm1(-1.0 / ratio) * ratio
    out = np.where(ratio < SERIES_CUTOFF, 1.0 - ratio, out)
    return out if out.ndim else float(out)


def covertness_gap(p_a, coeffs: SlotCoefficients):
    """G = x(1 - e^{-1/x}) with x = P_a tau; covertness holds iff G <= epsilon."""
    p_a = np.asarray(p_a, dtype=float)
    if np.any(p_a < 0):
        raise ValueError("p_a must be >= 0")
    x = _loadings(p_a, coeffs)
    x = np.where(p_a == 0, 0.0, x)  # P_hat_u = 0 gives tau = inf
    return gap_function(x)


@dataclass(frozen=True)
class DetectionReport:
    """Closed-form per-slot detection figures at the optimal threshold."""

    false_alarm: np.ndarray
    miss_detection: np.ndarray
    min_error: np.ndarray
    optimal_threshold: np.ndarray
    covertness_gap: np.ndarray


def detection_report(p_a, coeffs: SlotCoefficients) -> DetectionReport:
    p_a = np.asarray(p_a, dtype=float)
    thr = optimal_threshold(coeffs)
    fa = np.broadcast_to(false_alarm(thr, coeffs), p_a.shape).astype(float)
    # at the optimal threshold the miss-detection rate equals the minimum error
    p_safe = np.where(p_a > 0, p_a, 1.0)
    md = np.where(p_a > 0, miss_detection(thr, p_safe, coeffs), 1.0)
    return DetectionReport(
        false_alarm=fa,
        miss_detection=md,
        min_error=np.asarray(min_error_rate(p_a, coeffs)),
        optimal_threshold=np.asarray(thr),
        covertness_gap=np.asarray(covertness_gap(p_a, coeffs)),
    )


@dataclass(frozen=True)
class EmpiricalDetection:
    thresholds: np.ndarray
    false_alarm: np.ndarray
    miss_detection: np.ndarray
    m: float
    samples: int
    seed: int | None

    @property
    def total(self) -> np.ndarray:
        return self.false_alarm + self.miss_detection

    @property
    def argmin(self) -> int:
        return int(np.argmin(self.total))

    @property
    def min_total(self) -> float:
        return float(self.total[self.argmin])

    @property
    def best_threshold(self) -> float:
        return float(self.thresholds[self.argmin])


def threshold_grid(coeffs: SlotCoefficients, points: int = THRESHOLD_GRID_POINTS) -> np.ndarray:
    gamma = np.ravel(coeffs.gamma_w)
    if gamma.size != 1:
        raise ValueError("threshold grid is defined for one slot")
    gamma = float(gamma[0])
    return coeffs.sigma_w2 + np.linspace(0.0, 3.0 * gamma, points)


def _power_scale(rng: np.random.Generator, m, size: int) -> np.ndarray:
    """Radiometer average of m unit-power complex Gaussian samples."""
    if m is None or math.isinf(m):
        return np.ones(size)
    return rng.gamma(shape=float(m), scale=1.0 / float(m), size=size)


def simulate_radiometer(
    scenario: Scenario,
    slot: SlotCoefficients,
    p_a: float,
    m=None,
    samples: int = 1_000_000,
    seed: int | None = 0,
    thresholds=None,
    chunk: int = 250_000,
) -> EmpiricalDetection:
    """Monte Carlo false-alarm / miss-detection rates over a threshold grid.

    ``slot`` holds the coefficients of a single slot.  ``m=None`` (or inf)
    uses the large-m statistic.  Sampling is split into fixed-size chunks,
    each drawn from its own child of one seed sequence, so results depend
    only on ``seed`` and ``samples``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if m is not None and not math.isinf(m) and m < 1:
        raise ValueError("m must be >= 1")
    if len(slot) != 1:
        raise ValueError("simulate_radiometer needs the coefficients of exactly one slot")
    if np.ndim(slot.d_ub2):
        slot = slot[0]
    gamma = float(slot.gamma_w)
    sigma2 = float(slot.sigma_w2)
    signal = float(slot.phi) * float(p_a)
    thr = threshold_grid(slot) if thresholds is None else np.asarray(thresholds, dtype=float)

    n_chunks = -(-samples // chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    h0_parts, h1_parts = [], []
    for i, child in enumerate(children):
        size = min(chunk, samples - i * chunk)
        rng = np.random.default_rng(child)
        jam0 = rng.uniform(0.0, gamma, size)
        jam1 = rng.uniform(0.0, gamma, size)
        fade = rng.exponential(1.0, size)
        h0_parts.append((sigma2 + jam0) * _power_scale(rng, m, size))
        h1_parts.append((sigma2 + signal * fade + jam1) * _power_scale(rng, m, size))
    h0 = np.sort(np.concatenate(h0_parts))
    h1 = np.sort(np.concatenate(h1_parts))
    fa = 1.0 - np.searchsorted(h0, thr, side="right") / samples
    md = np.searchsorted(h1, thr, side="left") / samples
    return EmpiricalDetection(thr, fa, md, math.inf if m is None else float(m), samples, seed)
