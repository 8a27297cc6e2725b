"""Distance-ratio geometry for the jammer's per-slot move.

The per-slot objective is the ratio of the UAV's (3-D) distance to Bob over
its distance to Willie.  Level sets of that ratio are Apollonius spheres;
their traces in the flight plane are circles.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels

log = logging.getLogger(__name__)

CASE_TOL = 1e-9


def _pt(q) -> np.ndarray:
    return np.asarray(q, dtype=float).reshape(2)


def distance_ratio(q, q_b, q_w, H: float):
    """sqrt((|q-q_b|^2 + H^2) / (|q-q_w|^2 + H^2)); vectorised over leading axes."""
    q = np.asarray(q, dtype=float)
    h2 = H * H
    num = np.sum((q - _pt(q_b)) ** 2, axis=-1) + h2
    den = np.sum((q - _pt(q_w)) ** 2, axis=-1) + h2
    return np.sqrt(num / den)


def ratio_gradient(q, q_b, q_w, H: float) -> np.ndarray:
    """Gradient of the squared ratio with respect to the planar position."""
    q = _pt(q)
    h2 = H * H
    a = np.sum((q - q_b) ** 2) + h2
    b = np.sum((q - q_w) ** 2) + h2
    return 2.0 * ((q - q_b) * b - (q - q_w) * a) / (b * b)


@dataclass(frozen=True)
class ApolloniusLocus:
    """Points whose distance ratio to (q_b, q_w) is k.

    ``kind == "sphere"``: centre/radius of the sphere (centre lies in the
    ground plane).  ``kind == "bisector_plane"``: ``normal . p = offset``.
    """

    k: float
    kind: str
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    normal: Optional[np.ndarray] = None
    offset: Optional[float] = None

    def planar_radius2(self, H: float) -> float:
        """Squared radius of the trace circle in the plane at altitude H (may be < 0)."""
        if self.kind != "sphere":
            raise ValueError("bisector locus has no radius")
        return self.radius**2 - H * H

    def sample(self, count: int, H: float | None = None, rng=None) -> np.ndarray:
        """Points on the locus: 3-D sphere points, or the trace at altitude H as (x, y, H)."""
        rng = np.random.default_rng(rng)
        if self.kind == "sphere":
            if H is None:
                v = rng.normal(size=(count, 3))
                v /= np.linalg.norm(v, axis=1, keepdims=True)
                return np.concatenate([self.center, [0.0]]) + self.radius * v
            r2 = self.planar_radius2(H)
            if r2 < 0:
                raise ValueError("locus does not reach altitude H")
            t = rng.uniform(0, 2 * math.pi, count)
            xy = self.center + math.sqrt(r2) * np.stack([np.cos(t), np.sin(t)], axis=1)
            return np.column_stack([xy, np.full(count, H)])
        n = self.normal / np.linalg.norm(self.normal)
        base = n * self.offset / np.linalg.norm(self.normal)
        along = np.array([-n[1], n[0]])
        s = rng.uniform(-1e3, 1e3, count)
        z = rng.uniform(0, 1e3, count) if H is None else np.full(count, H)
        xy = base + s[:, None] * along
        return np.column_stack([xy, z])


def apollonius_locus(k: float, q_b, q_w) -> ApolloniusLocus:
    if not k > 0:
        raise ValueError("k must be positive")
    q_b = _pt(q_b)
    q_w = _pt(q_w)
    c = float(np.linalg.norm(q_b - q_w))
    if k == 1.0:
        normal = q_w - q_b
        offset = 0.5 * float((q_w + q_b) @ (q_w - q_b))
        return ApolloniusLocus(k=k, kind="bisector_plane", normal=normal, offset=offset)
    k2 = k * k
    center = (k2 * q_w - q_b) / (k2 - 1.0)
    radius = k * c / abs(k2 - 1.0)
    return ApolloniusLocus(k=k, kind="sphere", center=center, radius=radius)


def apollonius_radius(k: float, c: float) -> float:
    return k * c / abs(k * k - 1.0)


def bisector_projection(q_prev, q_b, q_w):
    """Foot of the perpendicular from q_prev onto the Bob/Willie bisector, and its distance."""
    q_prev = _pt(q_prev)
    q_b = _pt(q_b)
    q_w = _pt(q_w)
    row = (q_w - q_b).reshape(1, 2)
    if not np.any(row):
        raise ValueError("q_b and q_w must differ")
    b_hat = 0.5 * float((q_w + q_b) @ (q_w - q_b))
    x_tilde = q_prev - (row.T @ np.linalg.solve(row @ row.T, row @ q_prev - b_hat)).reshape(2)
    return x_tilde, float(np.linalg.norm(q_prev - x_tilde))


def hover_point(q_b, q_w, H: float) -> np.ndarray:
    """Global maximiser of the distance ratio over the flight plane.

    On the line q_b + t (q_w - q_b) stationarity reduces to t (t - 1) = H^2/|q_w - q_b|^2;
    the maximiser is the root beyond Willie.
    """
    q_b = _pt(q_b)
    q_w = _pt(q_w)
    L2 = float(np.sum((q_w - q_b) ** 2))
    if L2 == 0.0:
        raise ValueError("q_b and q_w must differ")
    t = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * H * H / L2))
    return q_b + t * (q_w - q_b)


def slot_argmax(q_prev, q_b, q_w, H: float, step: float):
    """Best reachable position for one slot and the distance ratio it achieves."""
    if not step > 0:
        raise ValueError("step must be positive")
    q_prev = _pt(q_prev)
    hover = hover_point(q_b, q_w, H)
    if np.linalg.norm(hover - q_prev) <= step:
        q_next = hover
    else:
        q_next, _ = kernels.circle_argmax(q_prev, step, q_b, q_w, H)
    return q_next, float(distance_ratio(q_next, q_b, q_w, H))


def slot_argmax_constrained(q_prev, step: float, q_final, reach: float, q_b, q_w, H: float):
    """Best position inside both the one-slot disk and the return-feasibility disk."""
    hover = hover_point(q_b, q_w, H)
    q_next, _ = kernels.two_disk_argmax(_pt(q_prev), step, _pt(q_final), reach, _pt(q_b), _pt(q_w), H, hover)
    return q_next, float(distance_ratio(q_next, q_b, q_w, H))


@dataclass(frozen=True)
class ClosedFormK:
    k: float
    case: int
    consistent: bool
    discriminant: float
    tangency_residual: float
    note: str = ""


def theorem5_k(q_prev, q_b, q_w, H: float, step: float) -> ClosedFormK:
    """Three-case closed form for the tangency ratio, constants taken as printed.

    Used only as a cross-check of :func:`slot_argmax`.  ``consistent`` is set
    when the discriminant is non-negative, k is real and positive, and the
    locus circle for k is tangent to the reachable disk (relative residual
    <= 1e-6).  Everything else is reported through ``note``.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    q_prev = _pt(q_prev)
    q_b = _pt(q_b)
    q_w = _pt(q_w)
    _, d1 = bisector_projection(q_prev, q_b, q_w)
    d2 = float(np.linalg.norm(q_prev - q_b))
    d3 = float(np.linalg.norm(q_prev - q_w))
    c = float(np.linalg.norm(q_b - q_w))
    U = float(q_prev @ q_prev) - step**2 + H**2
    S = float(q_w @ q_w - q_w @ q_prev)
    V = float(q_b @ q_b - q_b @ q_prev)
    k0 = (U + S) ** 2 + 4 * step**2 * H**2
    k1 = (2 * S * V - 2 * U**2 - 2 * U * S + 2 * U * V - 4 * step) ** 2 * (c**2 + H**2)
    k2 = (U + V) ** 2 + 4 * step**2 * H**2
    disc = k1**2 - 4 * k0 * k2

    closer_to_bob = d2 < d3 - CASE_TOL
    if abs(d1 - step) <= CASE_TOL and closer_to_bob:
        return ClosedFormK(1.0, 2, True, disc, 0.0)
    case = 1 if (d1 > step + CASE_TOL and closer_to_bob) else 3
    if disc < 0:
        note = "closed-form inconsistent here: negative discriminant"
        log.info("theorem5_k: %s (q_prev=%s)", note, q_prev.tolist())
        return ClosedFormK(math.nan, case, False, disc, math.nan, note)
    root = math.sqrt(disc)
    k_sq = (k1 - root) / (2 * k0) if case == 1 else (k1 + root) / (2 * k0)
    if not k_sq > 0:
        note = "closed-form inconsistent here: non-positive k^2"
        log.info("theorem5_k: %s (q_prev=%s)", note, q_prev.tolist())
        return ClosedFormK(math.nan, case, False, disc, math.nan, note)
    k = math.sqrt(k_sq)
    residual = _tangency_residual(k, q_prev, q_b, q_w, H, step)
    consistent = residual <= 1e-6
    note = "" if consistent else f"closed-form inconsistent here: tangency residual {residual:.3g}"
    if not consistent:
        log.info("theorem5_k: %s (q_prev=%s, k=%.6g)", note, q_prev.tolist(), k)
    return ClosedFormK(k, case, consistent, disc, residual, note)


def _tangency_residual(k, q_prev, q_b, q_w, H, step) -> float:
    if abs(k - 1.0) < 1e-12:
        return math.inf
    locus = apollonius_locus(k, q_b, q_w)
    r2 = locus.planar_radius2(H)
    if r2 < 0:
        return math.inf
    rho = math.sqrt(r2)
    dist = float(np.linalg.norm(q_prev - locus.center))
    # external tangency (k > 1) or internal tangency (k < 1)
    return min(abs(rho + step - dist), abs(abs(rho - step) - dist)) / max(dist, step)
