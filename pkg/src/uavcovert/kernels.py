"""Hot loops: ratio maximisation on circles and disk intersections, the GM
waypoint recursion and the CI waypoint sweeps.

Every kernel exists as an explicit-loop function (``*_loop``, compiled with
numba when available) and a vectorised numpy function (``*_np``).  The public
wrappers at the bottom dispatch on :func:`uavcovert._backend.get_backend`.
Both paths evaluate the same candidates in the same order and apply the same
tie rules, so they agree to rounding.
"""
from __future__ import annotations

import math

import numpy as np

from . import _backend
from ._backend import jit

GOLDEN = 0.6180339887498949
N_STARTS = 16
GOLDEN_ITERS = 40
POLISH_ITERS = 60
TIE_REL = 1e-13
MEMBER_REL = 1e-13
IMPROVE_REL = 1e-13


# ---------------------------------------------------------------------------
# loop kernels (numba)
# ---------------------------------------------------------------------------
@jit
def ratio_loop(x, y, bx, by, wx, wy, h2):
    return ((x - bx) ** 2 + (y - by) ** 2 + h2) / ((x - wx) ** 2 + (y - wy) ** 2 + h2)


@jit
def _circle_ratio(t, cx, cy, r, bx, by, wx, wy, h2):
    return ratio_loop(cx + r * math.cos(t), cy + r * math.sin(t), bx, by, wx, wy, h2)


@jit
def _circle_slope(t, cx, cy, r, bx, by, wx, wy, h2):
    # numerator of d(ratio)/dt; same sign as the derivative
    ux = math.cos(t)
    uy = math.sin(t)
    x = cx + r * ux
    y = cy + r * uy
    num = (x - bx) ** 2 + (y - by) ** 2 + h2
    den = (x - wx) ** 2 + (y - wy) ** 2 + h2
    dnum = -(x - bx) * uy + (y - by) * ux
    dden = -(x - wx) * uy + (y - wy) * ux
    return dnum * den - num * dden


@jit
def circle_argmax_loop(cx, cy, r, bx, by, wx, wy, h2):
    """Maximise the ratio over the circle of radius r around (cx, cy)."""
    best_x = cx + r
    best_y = cy
    best_f = -1.0
    best_dw = 0.0
    width = 2.0 * math.pi / N_STARTS
    for i in range(N_STARTS):
        a = i * width
        b = a + width
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        fc = _circle_ratio(c, cx, cy, r, bx, by, wx, wy, h2)
        fd = _circle_ratio(d, cx, cy, r, bx, by, wx, wy, h2)
        for _ in range(GOLDEN_ITERS):
            if fc > fd:
                b = d
                d = c
                fd = fc
                c = b - GOLDEN * (b - a)
                fc = _circle_ratio(c, cx, cy, r, bx, by, wx, wy, h2)
            else:
                a = c
                c = d
                fc = fd
                d = a + GOLDEN * (b - a)
                fd = _circle_ratio(d, cx, cy, r, bx, by, wx, wy, h2)
        sa = _circle_slope(a, cx, cy, r, bx, by, wx, wy, h2)
        sb = _circle_slope(b, cx, cy, r, bx, by, wx, wy, h2)
        if sa > 0.0 and sb < 0.0:
            for _ in range(POLISH_ITERS):
                mid = 0.5 * (a + b)
                if mid <= a or mid >= b:
                    break
                if _circle_slope(mid, cx, cy, r, bx, by, wx, wy, h2) > 0.0:
                    a = mid
                else:
                    b = mid
        t = 0.5 * (a + b)
        x = cx + r * math.cos(t)
        y = cy + r * math.sin(t)
        f = ratio_loop(x, y, bx, by, wx, wy, h2)
        dw = (x - wx) ** 2 + (y - wy) ** 2
        if best_f < 0.0 or f > best_f * (1.0 + TIE_REL):
            best_x, best_y, best_f, best_dw = x, y, f, dw
        elif f >= best_f * (1.0 - TIE_REL) and dw < best_dw:
            best_x, best_y, best_f, best_dw = x, y, f, dw
    return best_x, best_y, best_f


@jit
def _take_better(x, y, f, bx_, by_, bf, wx, wy):
    """Tie rule: larger ratio wins; near-ties go to the point closer to Willie."""
    if bf < 0.0 or f > bf * (1.0 + TIE_REL):
        return x, y, f
    if f >= bf * (1.0 - TIE_REL):
        if (x - wx) ** 2 + (y - wy) ** 2 < (bx_ - wx) ** 2 + (by_ - wy) ** 2:
            return x, y, f
    return bx_, by_, bf


@jit
def disk_argmax_loop(cx, cy, r, bx, by, wx, wy, h2, hx, hy):
    """Maximise the ratio over the closed disk; hover point if it is inside."""
    if math.hypot(hx - cx, hy - cy) <= r:
        return hx, hy, ratio_loop(hx, hy, bx, by, wx, wy, h2)
    return circle_argmax_loop(cx, cy, r, bx, by, wx, wy, h2)


@jit
def two_disk_argmax_loop(c1x, c1y, r1, c2x, c2y, r2, bx, by, wx, wy, h2, hx, hy):
    """Maximise the ratio over the intersection of two closed disks.

    Falls back to the point of disk 1 closest to the centre of disk 2 when the
    intersection is numerically empty.
    """
    tol = MEMBER_REL * (1.0 + abs(c1x) + abs(c1y) + abs(c2x) + abs(c2y) + r1 + r2)
    if math.hypot(hx - c1x, hy - c1y) <= r1 + tol and math.hypot(hx - c2x, hy - c2y) <= r2 + tol:
        return hx, hy, ratio_loop(hx, hy, bx, by, wx, wy, h2)
    d = math.hypot(c2x - c1x, c2y - c1y)
    if d + r1 <= r2 + tol:
        return circle_argmax_loop(c1x, c1y, r1, bx, by, wx, wy, h2)
    if d + r2 <= r1 + tol:
        return circle_argmax_loop(c2x, c2y, r2, bx, by, wx, wy, h2)
    best_x = c1x
    best_y = c1y
    best_f = -1.0
    x, y, f = circle_argmax_loop(c1x, c1y, r1, bx, by, wx, wy, h2)
    if math.hypot(x - c2x, y - c2y) <= r2 + tol:
        best_x, best_y, best_f = _take_better(x, y, f, best_x, best_y, best_f, wx, wy)
    x, y, f = circle_argmax_loop(c2x, c2y, r2, bx, by, wx, wy, h2)
    if math.hypot(x - c1x, y - c1y) <= r1 + tol:
        best_x, best_y, best_f = _take_better(x, y, f, best_x, best_y, best_f, wx, wy)
    if d > 0.0 and d <= r1 + r2 + tol:
        a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
        hh = math.sqrt(max(r1 * r1 - a * a, 0.0))
        ex = (c2x - c1x) / d
        ey = (c2y - c1y) / d
        px = c1x + a * ex
        py = c1y + a * ey
        for sgn in (1.0, -1.0):
            x = px - sgn * hh * ey
            y = py + sgn * hh * ex
            f = ratio_loop(x, y, bx, by, wx, wy, h2)
            best_x, best_y, best_f = _take_better(x, y, f, best_x, best_y, best_f, wx, wy)
    if best_f < 0.0:
        s = min(r1, d)
        if d > 0.0:
            best_x = c1x + s * (c2x - c1x) / d
            best_y = c1y + s * (c2y - c1y) / d
        best_f = ratio_loop(best_x, best_y, bx, by, wx, wy, h2)
    return best_x, best_y, best_f


@jit
def gm_waypoints_loop(q0x, q0y, qfx, qfy, bx, by, wx, wy, h2, hx, hy, step, N, paper_rule):
    out = np.empty((N + 1, 2))
    out[0, 0] = q0x
    out[0, 1] = q0y
    px = q0x
    py = q0y
    for n in range(1, N):
        rho = (N - n) * step
        if paper_rule:
            x, y, f = disk_argmax_loop(px, py, step, bx, by, wx, wy, h2, hx, hy)
            if math.hypot(x - qfx, y - qfy) > rho * (1.0 + 1e-12):
                dist = math.hypot(qfx - px, qfy - py)
                s = min(step, dist)
                x = px + s * (qfx - px) / dist
                y = py + s * (qfy - py) / dist
        else:
            x, y, f = two_disk_argmax_loop(px, py, step, qfx, qfy, rho, bx, by, wx, wy, h2, hx, hy)
        out[n, 0] = x
        out[n, 1] = y
        px = x
        py = y
    out[N, 0] = qfx
    out[N, 1] = qfy
    return out


@jit
def _inside(x, y, cx, cy, r, tol):
    return math.hypot(x - cx, y - cy) <= r + tol


@jit
def far_point_loop(px, py, cxs, cys, rs, bx, by):
    """Farthest point from (bx, by) in the intersection of three disks.

    The current point (px, py) is kept unless a candidate is strictly farther.
    Candidates, in order: the far point of each circle, then the pairwise
    circle intersections (0-1, 0-2, 1-2; "+" side first).
    """
    scale = 1.0 + abs(px) + abs(py)
    for k in range(3):
        scale += abs(cxs[k]) + abs(cys[k]) + rs[k]
    tol = MEMBER_REL * scale
    best_x = px
    best_y = py
    best_d = (px - bx) ** 2 + (py - by) ** 2
    thresh = best_d * (1.0 + IMPROVE_REL)
    for i in range(3):
        dx = cxs[i] - bx
        dy = cys[i] - by
        dn = math.hypot(dx, dy)
        if dn > 0.0:
            ux = dx / dn
            uy = dy / dn
        else:
            ux = 1.0
            uy = 0.0
        x = cxs[i] + rs[i] * ux
        y = cys[i] + rs[i] * uy
        ok = True
        for k in range(3):
            if k != i and not _inside(x, y, cxs[k], cys[k], rs[k], tol):
                ok = False
        d2 = (x - bx) ** 2 + (y - by) ** 2
        if ok and d2 > thresh and d2 > best_d:
            best_x, best_y, best_d = x, y, d2
    for i in range(3):
        for j in range(i + 1, 3):
            k = 3 - i - j
            d = math.hypot(cxs[j] - cxs[i], cys[j] - cys[i])
            if d == 0.0 or d > rs[i] + rs[j] + tol or d < abs(rs[i] - rs[j]) - tol:
                continue
            a = (rs[i] * rs[i] - rs[j] * rs[j] + d * d) / (2.0 * d)
            hh = math.sqrt(max(rs[i] * rs[i] - a * a, 0.0))
            ex = (cxs[j] - cxs[i]) / d
            ey = (cys[j] - cys[i]) / d
            mx = cxs[i] + a * ex
            my = cys[i] + a * ey
            for sgn in (1.0, -1.0):
                x = mx - sgn * hh * ey
                y = my + sgn * hh * ex
                if not _inside(x, y, cxs[k], cys[k], rs[k], tol):
                    continue
                d2 = (x - bx) ** 2 + (y - by) ** 2
                if d2 > thresh and d2 > best_d:
                    best_x, best_y, best_d = x, y, d2
    return best_x, best_y


@jit
def ci_sweeps_loop(Q, radii, active, wx, wy, bx, by, step, max_sweeps, move_tol):
    """Red-black block-coordinate ascent of the waypoints (in place).

    Each free waypoint moves to the point farthest from Bob inside its two
    speed disks and its covertness disk.  Returns (sweeps, last max move).
    """
    N = Q.shape[0] - 1
    cxs = np.empty(3)
    cys = np.empty(3)
    rs = np.empty(3)
    sweeps = 0
    max_move = 0.0
    for sweep in range(max_sweeps):
        max_move = 0.0
        for start in (1, 2):
            for n in range(start, N, 2):
                if not active[n]:
                    continue
                cxs[0] = Q[n - 1, 0]
                cys[0] = Q[n - 1, 1]
                rs[0] = step
                cxs[1] = Q[n + 1, 0]
                cys[1] = Q[n + 1, 1]
                rs[1] = step
                cxs[2] = wx
                cys[2] = wy
                rs[2] = radii[n]
                x, y = far_point_loop(Q[n, 0], Q[n, 1], cxs, cys, rs, bx, by)
                mv = math.hypot(x - Q[n, 0], y - Q[n, 1])
                if mv > max_move:
                    max_move = mv
                Q[n, 0] = x
                Q[n, 1] = y
        sweeps = sweep + 1
        if max_move <= move_tol:
            break
    return sweeps, max_move


# ---------------------------------------------------------------------------
# numpy kernels
# ---------------------------------------------------------------------------
def ratio_np(x, y, bx, by, wx, wy, h2):
    return ((x - bx) ** 2 + (y - by) ** 2 + h2) / ((x - wx) ** 2 + (y - wy) ** 2 + h2)


def _circle_ratio_np(t, cx, cy, r, bx, by, wx, wy, h2):
    return ratio_np(cx + r * np.cos(t), cy + r * np.sin(t), bx, by, wx, wy, h2)


def _circle_slope_np(t, cx, cy, r, bx, by, wx, wy, h2):
    ux = np.cos(t)
    uy = np.sin(t)
    x = cx + r * ux
    y = cy + r * uy
    num = (x - bx) ** 2 + (y - by) ** 2 + h2
    den = (x - wx) ** 2 + (y - wy) ** 2 + h2
    dnum = -(x - bx) * uy + (y - by) * ux
    dden = -(x - wx) * uy + (y - wy) * ux
    return dnum * den - num * dden


def circle_argmax_np(cx, cy, r, bx, by, wx, wy, h2):
    """Vectorised over the multistart brackets; same steps as the loop kernel."""
    args = (cx, cy, r, bx, by, wx, wy, h2)
    width = 2.0 * math.pi / N_STARTS
    a = np.arange(N_STARTS) * width
    b = a + width
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = _circle_ratio_np(c, *args)
    fd = _circle_ratio_np(d, *args)
    for _ in range(GOLDEN_ITERS):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - GOLDEN * (b - a), d)
        new_d = np.where(left, c, a + GOLDEN * (b - a))
        f_new = _circle_ratio_np(np.where(left, new_c, new_d), *args)
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = new_c, new_d
    sa = _circle_slope_np(a, *args)
    sb = _circle_slope_np(b, *args)
    polish = (sa > 0.0) & (sb < 0.0)
    if polish.any():
        pa = a[polish]
        pb = b[polish]
        done = np.zeros(pa.shape, dtype=bool)
        for _ in range(POLISH_ITERS):
            mid = 0.5 * (pa + pb)
            done |= (mid <= pa) | (mid >= pb)
            if done.all():
                break
            up = _circle_slope_np(mid, *args) > 0.0
            pa = np.where(~done & up, mid, pa)
            pb = np.where(~done & ~up, mid, pb)
        a = a.copy()
        b = b.copy()
        a[polish] = pa
        b[polish] = pb
    t = 0.5 * (a + b)
    xs = cx + r * np.cos(t)
    ys = cy + r * np.sin(t)
    fs = ratio_np(xs, ys, bx, by, wx, wy, h2)
    dws = (xs - wx) ** 2 + (ys - wy) ** 2
    best = 0
    for i in range(1, N_STARTS):
        f = fs[i]
        bf = fs[best]
        if f > bf * (1.0 + TIE_REL) or (f >= bf * (1.0 - TIE_REL) and dws[i] < dws[best]):
            best = i
    return float(xs[best]), float(ys[best]), float(fs[best])


def _take_better_np(x, y, f, bx_, by_, bf, wx, wy):
    if bf < 0.0 or f > bf * (1.0 + TIE_REL):
        return x, y, f
    if f >= bf * (1.0 - TIE_REL) and (x - wx) ** 2 + (y - wy) ** 2 < (bx_ - wx) ** 2 + (by_ - wy) ** 2:
        return x, y, f
    return bx_, by_, bf


def disk_argmax_np(cx, cy, r, bx, by, wx, wy, h2, hx, hy):
    if math.hypot(hx - cx, hy - cy) <= r:
        return hx, hy, float(ratio_np(hx, hy, bx, by, wx, wy, h2))
    return circle_argmax_np(cx, cy, r, bx, by, wx, wy, h2)


def two_disk_argmax_np(c1x, c1y, r1, c2x, c2y, r2, bx, by, wx, wy, h2, hx, hy):
    tol = MEMBER_REL * (1.0 + abs(c1x) + abs(c1y) + abs(c2x) + abs(c2y) + r1 + r2)
    if math.hypot(hx - c1x, hy - c1y) <= r1 + tol and math.hypot(hx - c2x, hy - c2y) <= r2 + tol:
        return hx, hy, float(ratio_np(hx, hy, bx, by, wx, wy, h2))
    d = math.hypot(c2x - c1x, c2y - c1y)
    if d + r1 <= r2 + tol:
        return circle_argmax_np(c1x, c1y, r1, bx, by, wx, wy, h2)
    if d + r2 <= r1 + tol:
        return circle_argmax_np(c2x, c2y, r2, bx, by, wx, wy, h2)
    best = (c1x, c1y, -1.0)
    x, y, f = circle_argmax_np(c1x, c1y, r1, bx, by, wx, wy, h2)
    if math.hypot(x - c2x, y - c2y) <= r2 + tol:
        best = _take_better_np(x, y, f, *best, wx, wy)
    x, y, f = circle_argmax_np(c2x, c2y, r2, bx, by, wx, wy, h2)
    if math.hypot(x - c1x, y - c1y) <= r1 + tol:
        best = _take_better_np(x, y, f, *best, wx, wy)
    if 0.0 < d <= r1 + r2 + tol:
        a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
        hh = math.sqrt(max(r1 * r1 - a * a, 0.0))
        ex = (c2x - c1x) / d
        ey = (c2y - c1y) / d
        px = c1x + a * ex
        py = c1y + a * ey
        for sgn in (1.0, -1.0):
            x = px - sgn * hh * ey
            y = py + sgn * hh * ex
            best = _take_better_np(x, y, float(ratio_np(x, y, bx, by, wx, wy, h2)), *best, wx, wy)
    if best[2] < 0.0:
        x, y = c1x, c1y
        if d > 0.0:
            s = min(r1, d)
            x = c1x + s * (c2x - c1x) / d
            y = c1y + s * (c2y - c1y) / d
        best = (x, y, float(ratio_np(x, y, bx, by, wx, wy, h2)))
    return best


def gm_waypoints_np(q0x, q0y, qfx, qfy, bx, by, wx, wy, h2, hx, hy, step, N, paper_rule):
    out = np.empty((N + 1, 2))
    out[0] = q0x, q0y
    px, py = q0x, q0y
    for n in range(1, N):
        rho = (N - n) * step
        if paper_rule:
            x, y, _ = disk_argmax_np(px, py, step, bx, by, wx, wy, h2, hx, hy)
            if math.hypot(x - qfx, y - qfy) > rho * (1.0 + 1e-12):
                dist = math.hypot(qfx - px, qfy - py)
                s = min(step, dist)
                x = px + s * (qfx - px) / dist
                y = py + s * (qfy - py) / dist
        else:
            x, y, _ = two_disk_argmax_np(px, py, step, qfx, qfy, rho, bx, by, wx, wy, h2, hx, hy)
        out[n] = x, y
        px, py = x, y
    out[N] = qfx, qfy
    return out


def far_points_np(P, C, R, b):
    """Vectorised :func:`far_point_loop` for M waypoints.

    P: (M, 2) current points, C: (M, 3, 2) disk centres, R: (M, 3) radii.
    """
    M = P.shape[0]
    scale = 1.0 + np.abs(P).sum(axis=1) + np.abs(C).sum(axis=(1, 2)) + R.sum(axis=1)
    tol = MEMBER_REL * scale
    best = P.copy()
    best_d = np.sum((P - b) ** 2, axis=1)
    thresh = best_d * (1.0 + IMPROVE_REL)

    def inside(X, k):
        return np.hypot(X[:, 0] - C[:, k, 0], X[:, 1] - C[:, k, 1]) <= R[:, k] + tol

    def consider(X, ok):
        nonlocal best, best_d
        d2 = np.sum((X - b) ** 2, axis=1)
        take = ok & (d2 > thresh) & (d2 > best_d)
        best = np.where(take[:, None], X, best)
        best_d = np.where(take, d2, best_d)

    for i in range(3):
        diff = C[:, i] - b
        dn = np.hypot(diff[:, 0], diff[:, 1])
        safe = np.where(dn > 0.0, dn, 1.0)
        u = np.where((dn > 0.0)[:, None], diff / safe[:, None], np.array([1.0, 0.0]))
        X = C[:, i] + R[:, i, None] * u
        ok = np.ones(M, dtype=bool)
        for k in range(3):
            if k != i:
                ok &= inside(X, k)
        consider(X, ok)
    for i in range(3):
        for j in range(i + 1, 3):
            k = 3 - i - j
            diff = C[:, j] - C[:, i]
            d = np.hypot(diff[:, 0], diff[:, 1])
            valid = (d > 0.0) & (d <= R[:, i] + R[:, j] + tol) & (d >= np.abs(R[:, i] - R[:, j]) - tol)
            ds = np.where(valid, d, 1.0)
            a = (R[:, i] ** 2 - R[:, j] ** 2 + ds * ds) / (2.0 * ds)
            hh = np.sqrt(np.maximum(R[:, i] ** 2 - a * a, 0.0))
            e = diff / ds[:, None]
            mid = C[:, i] + a[:, None] * e
            for sgn in (1.0, -1.0):
                X = np.stack([mid[:, 0] - sgn * hh * e[:, 1], mid[:, 1] + sgn * hh * e[:, 0]], axis=1)
                consider(X, valid & inside(X, k))
    return best


def ci_sweeps_np(Q, radii, active, wx, wy, bx, by, step, max_sweeps, move_tol):
    N = Q.shape[0] - 1
    b = np.array([bx, by])
    w = np.array([wx, wy])
    colours = [np.arange(s, N, 2) for s in (1, 2)]
    colours = [idx[active[idx]] for idx in colours]
    sweeps = 0
    max_move = 0.0
    for sweep in range(max_sweeps):
        max_move = 0.0
        for idx in colours:
            if idx.size == 0:
                continue
            C = np.stack([Q[idx - 1], Q[idx + 1], np.broadcast_to(w, (idx.size, 2))], axis=1)
            R = np.stack([np.full(idx.size, step), np.full(idx.size, step), radii[idx]], axis=1)
            new = far_points_np(Q[idx], C, R, b)
            mv = np.hypot(*(new - Q[idx]).T)
            if mv.size:
                max_move = max(max_move, float(mv.max()))
            Q[idx] = new
        sweeps = sweep + 1
        if max_move <= move_tol:
            break
    return sweeps, max_move


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------
def _use_numba() -> bool:
    return _backend.get_backend() == "numba"


def circle_argmax(c, r, b, w, H):
    fn = circle_argmax_loop if _use_numba() else circle_argmax_np
    x, y, f = fn(float(c[0]), float(c[1]), float(r), float(b[0]), float(b[1]), float(w[0]), float(w[1]), float(H) ** 2)
    return np.array([x, y]), float(f)


def two_disk_argmax(c1, r1, c2, r2, b, w, H, hover):
    fn = two_disk_argmax_loop if _use_numba() else two_disk_argmax_np
    x, y, f = fn(
        float(c1[0]), float(c1[1]), float(r1), float(c2[0]), float(c2[1]), float(r2),
        float(b[0]), float(b[1]), float(w[0]), float(w[1]), float(H) ** 2, float(hover[0]), float(hover[1]),
    )
    return np.array([x, y]), float(f)


def gm_waypoints(q0, qF, b, w, H, hover, step, N, paper_rule=False):
    fn = gm_waypoints_loop if _use_numba() else gm_waypoints_np
    return fn(
        float(q0[0]), float(q0[1]), float(qF[0]), float(qF[1]), float(b[0]), float(b[1]),
        float(w[0]), float(w[1]), float(H) ** 2, float(hover[0]), float(hover[1]),
        float(step), int(N), bool(paper_rule),
    )


def ci_sweeps(Q, radii, active, w, b, step, max_sweeps=500, move_tol=1e-9):
    """Run the waypoint sweeps on a copy of Q; returns (Q_new, sweeps, max_move)."""
    Q = np.array(Q, dtype=float, copy=True)
    radii = np.asarray(radii, dtype=float)
    active = np.asarray(active, dtype=np.bool_)
    fn = ci_sweeps_loop if _use_numba() else ci_sweeps_np
    sweeps, max_move = fn(
        Q, radii, active, float(w[0]), float(w[1]), float(b[0]), float(b[1]), float(step), int(max_sweeps), float(move_tol)
    )
    return Q, int(sweeps), float(max_move)
