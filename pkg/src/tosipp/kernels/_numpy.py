"""Pure numpy backend: grid-wide kernels vectorized, scalar ones interpreted."""
import math

import numpy as np

from ._scalar import EPS, INF, departure_window, los_clear, vertex_window

_CHUNK = 1 << 17


def _seg_box_dist2(x0, y0, x1, y1, cx, cy, h):
    # broadcasting twin of _scalar.seg_box_dist2
    dx = x1 - x0
    dy = y1 - y0
    t0 = np.zeros(np.broadcast(x0, y0, x1, y1, cx, cy).shape)
    t1 = np.ones_like(t0)
    miss = np.zeros(t0.shape, dtype=bool)
    bounds = ((-dx, x0 - (cx - h)), (dx, (cx + h) - x0),
              (-dy, y0 - (cy - h)), (dy, (cy + h) - y0))
    with np.errstate(divide="ignore", invalid="ignore"):
        for p, q in bounds:
            p = np.broadcast_to(p, t0.shape)
            q = np.broadcast_to(q, t0.shape)
            zero = p == 0.0
            miss |= zero & (q < 0.0)
            r = np.where(zero, 0.0, q / np.where(zero, 1.0, p))
            t0 = np.where(~zero & (p < 0.0), np.maximum(t0, r), t0)
            t1 = np.where(~zero & (p > 0.0), np.minimum(t1, r), t1)
    hits = ~miss & (t0 <= t1)

    def pbox(px, py):
        ex = np.maximum(np.abs(px - cx) - h, 0.0)
        ey = np.maximum(np.abs(py - cy) - h, 0.0)
        return ex * ex + ey * ey

    L2 = dx * dx + dy * dy
    safe_L2 = np.where(L2 == 0.0, 1.0, L2)
    best = np.minimum(pbox(x0, y0), pbox(x1, y1))
    for sx in (-h, h):
        for sy in (-h, h):
            px = cx + sx
            py = cy + sy
            t = np.clip(((px - x0) * dx + (py - y0) * dy) / safe_L2, 0.0, 1.0)
            t = np.where(L2 == 0.0, 0.0, t)
            ex = x0 + t * dx - px
            ey = y0 + t * dy - py
            best = np.minimum(best, ex * ex + ey * ey)
    return np.where(hits, 0.0, best)


def visible_from(blocked, sx, sy, r):
    H, W = blocked.shape
    out = np.zeros((H, W), dtype=bool)
    fy, fx = np.nonzero(~blocked)
    by, bx = np.nonzero(blocked)
    if by.size == 0:
        out[fy, fx] = True
        return out
    lim = max(r - EPS, 0.0)
    lim2 = lim * lim
    bxf = bx.astype(float)[None, :]
    byf = by.astype(float)[None, :]
    step = max(1, _CHUNK // by.size)
    for s in range(0, fx.size, step):
        tx = fx[s:s + step].astype(float)[:, None]
        ty = fy[s:s + step].astype(float)[:, None]
        d2 = _seg_box_dist2(float(sx), float(sy), tx, ty, bxf, byf, 0.5)
        clear = ~(d2 < lim2).any(axis=1)
        out[fy[s:s + step], fx[s:s + step]] = clear
    return out


def perfect_dist(blocked, gx, gy, r):
    H, W = blocked.shape
    dist = np.full((H, W), INF)
    done = blocked.copy()
    dist[gy, gx] = 0.0
    ys, xs = np.mgrid[0:H, 0:W]
    while True:
        masked = np.where(done, INF, dist)
        u = int(np.argmin(masked))
        uy, ux = divmod(u, W)
        if not math.isfinite(masked[uy, ux]):
            break
        done[uy, ux] = True
        vis = visible_from(blocked, ux, uy, r)
        cand = dist[uy, ux] + np.hypot(xs - ux, ys - uy)
        upd = vis & ~done & (cand < dist)
        dist[upd] = cand[upd]
    return dist


def earliest_departure(ux, uy, vx, vy, speed, g, src_hi, tlo, thi,
                       segs, bbox, agent_r, buf=None, wins=None):
    L = math.hypot(vx - ux, vy - uy)
    if L == 0.0:
        return INF
    T = L / speed
    wx = (vx - ux) / T
    wy = (vy - uy) / T
    dlo = max(g, tlo - T)
    dhi = min(src_hi, thi - T)
    if dlo > dhi + EPS:
        return INF
    dhi = max(dhi, dlo)
    R = agent_r + segs[:, 6]
    keep = ((segs[:, 4] <= dhi + T) & (segs[:, 5] >= dlo)
            & (bbox[:, 0] < max(ux, vx) + R) & (bbox[:, 2] > min(ux, vx) - R)
            & (bbox[:, 1] < max(uy, vy) + R) & (bbox[:, 3] > min(uy, vy) - R))
    if buf is None:
        buf = np.empty(16)
    found = []
    for i in np.flatnonzero(keep):
        s = segs[i]
        lo, hi = departure_window(ux, uy, wx, wy, T, s[0], s[1], s[2], s[3],
                                  s[4], s[5], R[i], buf)
        if math.isnan(lo) or hi <= dlo or lo >= dhi:
            continue
        found.append((lo, hi))
    d = dlo
    for a, b in sorted(found):
        if a + EPS >= d:
            break
        if d < b:
            d = b
    return INF if d > dhi + EPS else d


def earliest_departures(ux, uy, speed, g, src_hi, tx, ty, tlo, thi,
                        segs, bbox, agent_r):
    buf = np.empty(16)
    return np.array([
        earliest_departure(ux, uy, float(tx[i]), float(ty[i]), speed, g, src_hi,
                           float(tlo[i]), float(thi[i]), segs, bbox, agent_r, buf)
        for i in range(len(tx))
    ], dtype=float)


los_clear = los_clear
vertex_window = vertex_window
departure_window = departure_window
