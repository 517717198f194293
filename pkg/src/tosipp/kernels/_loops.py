"""Loop kernels over whole grids and obstacle segment tables.

Same numba-compatible subset as ``_scalar``. The numba backend compiles these;
the numpy backend replaces the grid-wide ones with vectorized versions.

Segment tables are float64 arrays with one row per obstacle motion piece:
``px, py, qx, qy, slo, shi, radius`` (position at ``slo``, velocity, time
window, obstacle radius). ``bbox`` rows hold ``xmin, ymin, xmax, ymax`` of the
swept centre.
"""
import math

import numpy as np

from ._scalar import EPS, INF, departure_window, los_clear


def visible_from(blocked, sx, sy, r):
    H = blocked.shape[0]
    W = blocked.shape[1]
    out = np.zeros((H, W), dtype=np.bool_)
    fx = float(sx)
    fy = float(sy)
    for y in range(H):
        for x in range(W):
            if blocked[y, x]:
                continue
            if los_clear(blocked, fx, fy, float(x), float(y), r):
                out[y, x] = True
    return out


def perfect_dist(blocked, gx, gy, r):
    """Backward Dijkstra over the any-angle visibility graph (lengths)."""
    H = blocked.shape[0]
    W = blocked.shape[1]
    V = H * W
    dist = np.full(V, INF)
    done = np.zeros(V, dtype=np.bool_)
    dist[gy * W + gx] = 0.0
    while True:
        best = INF
        u = -1
        for i in range(V):
            if not done[i] and dist[i] < best:
                best = dist[i]
                u = i
        if u < 0:
            break
        done[u] = True
        ux = u % W
        uy = u // W
        for y in range(H):
            for x in range(W):
                i = y * W + x
                if done[i] or blocked[y, x]:
                    continue
                nd = best + math.hypot(x - ux, y - uy)
                if nd < dist[i]:
                    if los_clear(blocked, float(ux), float(uy), float(x), float(y), r):
                        dist[i] = nd
    return dist.reshape((H, W))


def earliest_departure(ux, uy, vx, vy, speed, g, src_hi, tlo, thi,
                       segs, bbox, agent_r, buf, wins):
    """Earliest safe departure for the move (ux,uy)->(vx,vy), or inf.

    Departure must lie in [g, src_hi] and arrival in [tlo, thi].
    """
    dx = vx - ux
    dy = vy - uy
    L = math.sqrt(dx * dx + dy * dy)
    if L == 0.0:
        return INF
    T = L / speed
    wx = dx / T
    wy = dy / T
    dlo = max(g, tlo - T)
    dhi = min(src_hi, thi - T)
    if dlo > dhi + EPS:
        return INF
    if dhi < dlo:
        dhi = dlo
    t_end = dhi + T
    axmin = min(ux, vx)
    axmax = max(ux, vx)
    aymin = min(uy, vy)
    aymax = max(uy, vy)
    k = 0
    for i in range(segs.shape[0]):
        slo = segs[i, 4]
        shi = segs[i, 5]
        if slo > t_end or shi < dlo:
            continue
        R = agent_r + segs[i, 6]
        if (bbox[i, 0] >= axmax + R or bbox[i, 2] <= axmin - R
                or bbox[i, 1] >= aymax + R or bbox[i, 3] <= aymin - R):
            continue
        lo, hi = departure_window(ux, uy, wx, wy, T, segs[i, 0], segs[i, 1],
                                  segs[i, 2], segs[i, 3], slo, shi, R, buf)
        if math.isnan(lo):
            continue
        if hi <= dlo or lo >= dhi:
            continue
        wins[k, 0] = lo
        wins[k, 1] = hi
        k += 1
    d = dlo
    if k > 0:
        order = np.argsort(wins[:k, 0])
        for j in range(k):
            a = wins[order[j], 0]
            b = wins[order[j], 1]
            if a + EPS < d:
                if d < b:
                    d = b
            else:
                break
    if d > dhi + EPS:
        return INF
    return d


def earliest_departures(ux, uy, speed, g, src_hi, tx, ty, tlo, thi,
                        segs, bbox, agent_r):
    n = tx.shape[0]
    out = np.empty(n)
    buf = np.empty(16)
    wins = np.empty((segs.shape[0] + 1, 2))
    for i in range(n):
        out[i] = earliest_departure(ux, uy, tx[i], ty[i], speed, g, src_hi,
                                    tlo[i], thi[i], segs, bbox, agent_r, buf, wins)
    return out
