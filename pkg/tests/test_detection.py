import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from uavcovert.detection import (
    covertness_gap,
    detection_report,
    false_alarm,
    gap_function,
    gap_root,
    gap_slope,
    miss_detection,
    min_error_rate,
    optimal_threshold,
    simulate_radiometer,
    threshold_grid,
)
from uavcovert.model import SlotCoefficients


def slot(paper, x=150.0, y=260.0, p_hat=None):
    return SlotCoefficients.at(paper, [[x, y]], p_hat_u=p_hat)


def power_for(c, x):
    """p_a giving loading x = p_a * tau."""
    return x / c.tau[0]


def test_gap_root_against_brentq():
    for eps in (1e-4, 0.01, 0.05, 0.1, 0.3, 0.7, 0.99):
        ref = brentq(lambda x: x * (1 - math.exp(-1 / x)) - eps, 1e-12, 1e6, xtol=1e-15, rtol=1e-15)
        x = gap_root(eps)
        assert x == pytest.approx(ref, rel=1e-12)
        assert gap_function(x) <= eps


def test_gap_root_example():
    x = gap_root(0.1)
    assert x == pytest.approx(0.100005, abs=1e-6)
    assert abs(gap_function(x) - 0.1) <= 1e-9


@pytest.mark.parametrize("eps", [0.0, 1.0, 1.5, -0.1])
def test_gap_root_rejects_unsolvable(eps):
    with pytest.raises(ValueError):
        gap_root(eps)


def test_gap_function_values():
    assert gap_function(0.0) == 0.0
    assert gap_function(0.1) == pytest.approx(0.1 * (1 - math.exp(-10)), rel=1e-15)
    assert gap_function(0.1) == pytest.approx(0.0999955, abs=1e-7)
    assert gap_function(1e-10) == 1e-10  # series branch
    assert gap_function(1e6) == pytest.approx(1 - 1 / (2 * 1e6), abs=1e-6)


@settings(max_examples=1000)
@given(x=st.floats(1e-6, 1e4))
def test_gap_strictly_increasing(x):
    h = 1e-6 * x
    assert gap_function(x + h) > gap_function(x)
    assert gap_slope(x) > 0


def test_gap_slope_matches_finite_difference(rng):
    x = rng.uniform(0.05, 50, 200)
    h = 1e-6 * x
    fd = (gap_function(x + h) - gap_function(x - h)) / (2 * h)
    np.testing.assert_allclose(gap_slope(x), fd, rtol=1e-6)


def test_false_alarm_branches(paper):
    c = slot(paper)
    s2, g = c.sigma_w2, c.gamma_w[0]
    assert false_alarm(s2, c) == 1.0
    assert false_alarm(s2 + g, c) == pytest.approx(0.0, abs=1e-15)
    assert false_alarm(s2 + g / 2, c) == pytest.approx(0.5)
    assert false_alarm(s2 + 2 * g, c) == 0.0


def test_miss_detection_branches_and_continuity(paper, rng):
    for _ in range(50):
        c = slot(paper, *rng.uniform(-300, 600, 2), p_hat=rng.uniform(1e-3, 0.1))
        p = power_for(c, rng.uniform(0.02, 5))
        s2, g = c.sigma_w2, c.gamma_w[0]
        assert miss_detection(s2, p, c) == 0.0
        assert miss_detection(s2 * 0.5, p, c) == 0.0
        s = c.phi * p
        t = g
        lam = (s / g) * (math.exp(-t / s) - 1) + t / g
        omega = 1 - (s / g) * (math.exp(-(t - g) / s) - math.exp(-t / s))
        assert lam == pytest.approx(omega, abs=1e-10)
        below = miss_detection(s2 + g * (1 - 1e-12), p, c)
        above = miss_detection(s2 + g * (1 + 1e-12), p, c)
        assert below == pytest.approx(above, abs=1e-10)


def test_miss_detection_rejects_zero_power(paper):
    with pytest.raises(ValueError):
        miss_detection(1e-13, 0.0, slot(paper))


@settings(max_examples=200)
@given(x=st.floats(0.01, 10), a=st.floats(0, 3), b=st.floats(0, 3))
def test_error_rates_monotone_in_threshold(paper, x, a, b):
    c = slot(paper)
    p = power_for(c, x)
    lo, hi = sorted((a, b))
    t_lo = c.sigma_w2 + lo * c.gamma_w[0]
    t_hi = c.sigma_w2 + hi * c.gamma_w[0]
    assert false_alarm(t_hi, c) <= false_alarm(t_lo, c)
    assert miss_detection(t_hi, p, c) >= miss_detection(t_lo, p, c) - 1e-15


def test_min_error_examples(paper):
    c = slot(paper)
    g = c.gamma_w[0]
    p = 0.1 * g / c.phi  # phi p / Gamma = 0.1
    assert min_error_rate(p, c) == pytest.approx(0.9000045, abs=1e-7)
    assert min_error_rate(0.0, c) == 1.0
    assert min_error_rate(1e-30, c) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        min_error_rate(1.0, slot(paper, p_hat=0.0))


def test_total_error_minimised_at_optimal_threshold(paper, rng):
    for _ in range(50):
        c = slot(paper, *rng.uniform(-300, 600, 2), p_hat=rng.uniform(1e-3, 0.1))
        p = power_for(c, rng.uniform(0.02, 5))
        grid = c.sigma_w2 + np.linspace(0, 3 * c.gamma_w[0], 10_000)
        total = false_alarm(grid, c) + miss_detection(grid, p, c)
        xi = min_error_rate(p, c)[0]
        assert np.all(total >= xi - 1e-12)
        assert total.min() - xi <= 1e-4
        thr = optimal_threshold(c)[0]
        assert false_alarm(thr, c) + miss_detection(thr, p, c) == pytest.approx(xi, abs=1e-12)


def test_gap_and_min_error_identity(paper, rng):
    xs = rng.uniform(-300, 600, (1000, 2))
    c = SlotCoefficients.at(paper, xs)
    p = rng.uniform(1e-3, 20, 1000)
    np.testing.assert_allclose(1 - covertness_gap(p, c), min_error_rate(p, c), atol=1e-12)


def test_covertness_gap_zero_power(paper):
    c = slot(paper)
    assert covertness_gap(0.0, c)[0] == 0.0
    assert covertness_gap(0.0, slot(paper, p_hat=0.0))[0] == 0.0


def test_detection_report_consistency(paper, rng):
    c = SlotCoefficients.at(paper, rng.uniform(-300, 600, (20, 2)))
    p = rng.uniform(0, 10, 20)
    p[3] = 0.0
    rep = detection_report(p, c)
    np.testing.assert_allclose(rep.optimal_threshold, c.gamma_w + c.sigma_w2)
    np.testing.assert_allclose(rep.min_error, 1 - rep.covertness_gap, atol=1e-12)
    np.testing.assert_allclose(rep.false_alarm + rep.miss_detection, rep.min_error, atol=1e-12)
    for arr in (rep.false_alarm, rep.miss_detection, rep.min_error):
        assert np.all((arr >= 0) & (arr <= 1))


def test_false_alarm_monte_carlo(paper):
    c = slot(paper)
    g = c.gamma_w[0]
    thr = c.sigma_w2 + g / 2
    emp = simulate_radiometer(paper, c, power_for(c, 0.5), samples=1_000_000, seed=3, thresholds=[thr])
    assert emp.false_alarm[0] == pytest.approx(0.5, abs=0.005)


def test_miss_detection_monte_carlo(paper, rng):
    for seed in range(3):
        c = slot(paper, *rng.uniform(-300, 600, 2))
        p = power_for(c, rng.uniform(0.05, 3))
        thr = c.sigma_w2 + c.gamma_w[0]
        emp = simulate_radiometer(paper, c, p, samples=1_000_000, seed=seed, thresholds=[thr])
        assert emp.miss_detection[0] == pytest.approx(miss_detection(thr, p, c), abs=0.005)


def test_radiometer_minimum_matches_closed_form(paper):
    c = slot(paper)
    p = power_for(c, gap_root(0.1))
    emp = simulate_radiometer(paper, c, p, samples=1_000_000, seed=11)
    assert abs(emp.min_total - min_error_rate(p, c)[0]) <= 0.01
    emp = simulate_radiometer(paper, c, p, m=1e6, samples=200_000, seed=11)
    assert abs(emp.min_total - min_error_rate(p, c)[0]) <= 0.01


def test_radiometer_without_signal_cannot_detect(paper):
    c = slot(paper)
    emp = simulate_radiometer(paper, c, 0.0, samples=200_000, seed=5)
    assert np.all(emp.total >= 0.99)


def test_radiometer_is_reproducible(paper):
    c = slot(paper)
    a = simulate_radiometer(paper, c, 1.0, samples=300_000, seed=42, chunk=100_000)
    b = simulate_radiometer(paper, c, 1.0, samples=300_000, seed=42, chunk=100_000)
    np.testing.assert_array_equal(a.false_alarm, b.false_alarm)
    np.testing.assert_array_equal(a.miss_detection, b.miss_detection)
    c2 = simulate_radiometer(paper, c, 1.0, samples=300_000, seed=43, chunk=100_000)
    assert not np.array_equal(a.miss_detection, c2.miss_detection)


def test_radiometer_argument_checks(paper):
    c = slot(paper)
    with pytest.raises(ValueError):
        simulate_radiometer(paper, c, 1.0, samples=0)
    with pytest.raises(ValueError):
        simulate_radiometer(paper, c, 1.0, m=0.5)
    with pytest.raises(ValueError):
        simulate_radiometer(paper, SlotCoefficients.at(paper, [[0, 0], [1, 1]]), 1.0)


def test_threshold_grid_span(paper):
    c = slot(paper)
    grid = threshold_grid(c)
    assert grid.size == 2000
    assert grid[0] == c.sigma_w2
    assert grid[-1] == pytest.approx(c.sigma_w2 + 3 * c.gamma_w[0])
