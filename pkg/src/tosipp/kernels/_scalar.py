"""Scalar geometry primitives.

Everything here is written in the numba-compatible subset of Python: plain
floats, ``math`` and fixed-size numpy scratch arrays. The numba backend
compiles these functions verbatim; the numpy backend calls them as-is.
"""
import math

import numpy as np

EPS = 1e-9
# squared-distance slack for strict "closer than R" tests
EPS_D2 = 1e-9

INF = math.inf


def point_box_dist2(px, py, cx, cy, h):
    dx = abs(px - cx) - h
    dy = abs(py - cy) - h
    if dx < 0.0:
        dx = 0.0
    if dy < 0.0:
        dy = 0.0
    return dx * dx + dy * dy


def point_seg_dist2(px, py, x0, y0, x1, y1):
    dx = x1 - x0
    dy = y1 - y0
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        ex = px - x0
        ey = py - y0
        return ex * ex + ey * ey
    t = ((px - x0) * dx + (py - y0) * dy) / L2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    ex = x0 + t * dx - px
    ey = y0 + t * dy - py
    return ex * ex + ey * ey


def seg_hits_box(x0, y0, x1, y1, xmin, ymin, xmax, ymax):
    """Liang-Barsky clip: does the closed segment touch the closed box."""
    dx = x1 - x0
    dy = y1 - y0
    t0 = 0.0
    t1 = 1.0
    for k in range(4):
        if k == 0:
            p = -dx
            q = x0 - xmin
        elif k == 1:
            p = dx
            q = xmax - x0
        elif k == 2:
            p = -dy
            q = y0 - ymin
        else:
            p = dy
            q = ymax - y0
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            r = q / p
            if p < 0.0:
                if r > t0:
                    t0 = r
            else:
                if r < t1:
                    t1 = r
            if t0 > t1:
                return False
    return True


def seg_box_dist2(x0, y0, x1, y1, cx, cy, h):
    """Squared distance between segment and the square of half-side ``h``."""
    if seg_hits_box(x0, y0, x1, y1, cx - h, cy - h, cx + h, cy + h):
        return 0.0
    # disjoint convex sets in the plane: the minimum is attained at a vertex
    best = point_box_dist2(x0, y0, cx, cy, h)
    d = point_box_dist2(x1, y1, cx, cy, h)
    if d < best:
        best = d
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            d = point_seg_dist2(cx + sx * h, cy + sy * h, x0, y0, x1, y1)
            if d < best:
                best = d
    return best


def los_clear(blocked, x0, y0, x1, y1, r):
    """True when a disk of radius ``r`` swept along the segment stays out of
    every blocked cell interior. ``blocked`` is indexed ``[row, col]``."""
    H = blocked.shape[0]
    W = blocked.shape[1]
    lim = r - EPS
    if lim < 0.0:
        lim = 0.0
    lim2 = lim * lim
    xmin = min(x0, x1)
    xmax = max(x0, x1)
    c_lo = max(int(math.ceil(xmin - r - 0.5)), 0)
    c_hi = min(int(math.floor(xmax + r + 0.5)), W - 1)
    dx = x1 - x0
    dy = y1 - y0
    for cx in range(c_lo, c_hi + 1):
        # y-extent of the segment over the column slab inflated by r
        if dx == 0.0:
            ya = min(y0, y1)
            yb = max(y0, y1)
        else:
            sa = (cx - 0.5 - r - x0) / dx
            sb = (cx + 0.5 + r - x0) / dx
            if sa > sb:
                sa, sb = sb, sa
            if sa < 0.0:
                sa = 0.0
            if sb > 1.0:
                sb = 1.0
            if sa > sb:
                continue
            ya = y0 + sa * dy
            yb = y0 + sb * dy
            if ya > yb:
                ya, yb = yb, ya
        r_lo = max(int(math.ceil(ya - r - 0.5)), 0)
        r_hi = min(int(math.floor(yb + r + 0.5)), H - 1)
        for cy in range(r_lo, r_hi + 1):
            if blocked[cy, cx]:
                if seg_box_dist2(x0, y0, x1, y1, float(cx), float(cy), 0.5) < lim2:
                    return False
    return True


def vertex_window(vx, vy, px, py, qx, qy, slo, shi, R):
    """Open time window inside [slo, shi] during which the point moving as
    p + q (t - slo) is strictly closer than R to (vx, vy). Returns (nan, nan)
    when there is none."""
    cx = px - vx
    cy = py - vy
    a = qx * qx + qy * qy
    R2 = R * R
    if a == 0.0:
        if cx * cx + cy * cy < R2 - EPS_D2:
            return slo, shi
        return math.nan, math.nan
    b = 2.0 * (cx * qx + cy * qy)
    c = cx * cx + cy * cy - R2
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return math.nan, math.nan
    sq = math.sqrt(disc)
    s1 = (-b - sq) / (2.0 * a)
    s2 = (-b + sq) / (2.0 * a)
    lo = slo + s1
    hi = slo + s2
    if lo < slo:
        lo = slo
    if hi > shi:
        hi = shi
    if hi - lo <= 0.0:
        return math.nan, math.nan
    return lo, hi


def _phi(d, Ax, Ay, Bx, By, qx, qy, T, slo, shi):
    """Minimum squared separation over the traversal for departure ``d``;
    inf when the traversal and the obstacle window do not overlap."""
    tlo = slo - d
    if tlo < 0.0:
        tlo = 0.0
    thi = shi - d
    if thi > T:
        thi = T
    if tlo > thi:
        return INF
    Cx = Ax - qx * d
    Cy = Ay - qy * d
    B2 = Bx * Bx + By * By
    tau = tlo
    if B2 > 1e-18:
        tau = -(Cx * Bx + Cy * By) / B2
        if tau < tlo:
            tau = tlo
        elif tau > thi:
            tau = thi
    ex = Cx + Bx * tau
    ey = Cy + By * tau
    return ex * ex + ey * ey


def _push_roots(buf, n, Ex, Ey, Fx, Fy, R2):
    # roots in d of |E - F d|^2 = R^2
    a = Fx * Fx + Fy * Fy
    if a == 0.0:
        return n
    b = -2.0 * (Ex * Fx + Ey * Fy)
    c = Ex * Ex + Ey * Ey - R2
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return n
    sq = math.sqrt(disc)
    buf[n] = (-b - sq) / (2.0 * a)
    buf[n + 1] = (-b + sq) / (2.0 * a)
    return n + 2


def departure_window(ux, uy, wx, wy, T, px, py, qx, qy, slo, shi, R, buf):
    """Open interval of departure times d for which an agent leaving (ux, uy)
    at d with velocity (wx, wy) for duration T comes strictly within R of an
    obstacle moving as p + q (t - slo), t in [slo, shi].

    ``buf`` is float64 scratch of length >= 16. Returns (nan, nan) if empty.
    """
    Ax = ux - px + qx * slo
    Ay = uy - py + qy * slo
    Bx = wx - qx
    By = wy - qy
    R2 = R * R
    D0 = slo - T
    D1 = shi
    n = 0
    buf[n] = D0
    n += 1
    if D1 < INF:
        buf[n] = D1
        n += 1
    # window edges: tau = 0, tau = T, t = slo, t = shi
    n = _push_roots(buf, n, Ax, Ay, qx, qy, R2)
    n = _push_roots(buf, n, Ax + Bx * T, Ay + By * T, qx, qy, R2)
    n = _push_roots(buf, n, Ax + Bx * slo, Ay + By * slo, wx, wy, R2)
    if shi < INF:
        n = _push_roots(buf, n, Ax + Bx * shi, Ay + By * shi, wx, wy, R2)
    # interior minimum: distance from the line is affine in d
    B2 = Bx * Bx + By * By
    if B2 > 1e-18:
        Bn = math.sqrt(B2)
        c0 = Ax * By - Ay * Bx
        c1 = qx * By - qy * Bx
        if c1 != 0.0:
            buf[n] = (c0 - R * Bn) / c1
            buf[n + 1] = (c0 + R * Bn) / c1
            n += 2
    # keep candidates inside the domain, sorted
    m = 0
    for i in range(n):
        v = buf[i]
        if v >= D0 and v <= D1 and not math.isnan(v):
            buf[m] = v
            m += 1
    pts = np.sort(buf[:m])
    lo = math.nan
    hi = math.nan
    lim = R2 - EPS_D2
    for i in range(m - 1):
        a = pts[i]
        b = pts[i + 1]
        if b <= a:
            continue
        if _phi(0.5 * (a + b), Ax, Ay, Bx, By, qx, qy, T, slo, shi) < lim:
            if math.isnan(lo) or a < lo:
                lo = a
            if math.isnan(hi) or b > hi:
                hi = b
    if D1 == INF and m > 0:
        last = pts[m - 1]
        if _phi(last + 1.0, Ax, Ay, Bx, By, qx, qy, T, slo, shi) < lim:
            if math.isnan(lo) or last < lo:
                lo = last
            hi = INF
    return lo, hi
