"""Radius-aware line of sight and exact continuous-time disk collisions.

Collision is strict: centres closer than the combined radius collide, exactly
touching is allowed. Unsafe sets are returned as sorted, disjoint, merged
lists of ``TimeInterval`` treated as open on both ends (a left end clipped to
0 is closed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .kernels import EPS, INF

if TYPE_CHECKING:
    from .world import GridMap, MotionPlan


class TimeInterval(NamedTuple):
    low: float
    high: float

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return self.low - tol <= t <= self.high + tol

    @property
    def length(self) -> float:
        return self.high - self.low


@dataclass(frozen=True)
class MotionSegment:
    """One linear piece ``origin + velocity * (t - window.low)``."""
    origin: tuple[float, float]
    velocity: tuple[float, float]
    window: TimeInterval

    def position(self, t: float) -> tuple[float, float]:
        s = t - self.window.low
        return (self.origin[0] + self.velocity[0] * s,
                self.origin[1] + self.velocity[1] * s)


def euclidean(u: Sequence[float], v: Sequence[float]) -> float:
    return math.hypot(v[0] - u[0], v[1] - u[1])


def los(u, v, radius: float, grid_map: "GridMap") -> bool:
    return bool(kernels.los_clear(grid_map.grid, float(u[0]), float(u[1]),
                                  float(v[0]), float(v[1]), float(radius)))


def decompose(plan: "MotionPlan") -> list[MotionSegment]:
    segs = []
    if not plan.actions:
        p = (float(plan.start[0]), float(plan.start[1]))
        return [MotionSegment(p, (0.0, 0.0), TimeInterval(0.0, INF))]
    first = plan.actions[0]
    if first.start > 0:
        p = (float(first.source[0]), float(first.source[1]))
        segs.append(MotionSegment(p, (0.0, 0.0), TimeInterval(0.0, first.start)))
    for a in plan.actions:
        p = (float(a.source[0]), float(a.source[1]))
        if a.kind == "move":
            vel = ((a.target[0] - a.source[0]) / a.duration,
                   (a.target[1] - a.source[1]) / a.duration)
        else:
            vel = (0.0, 0.0)
        segs.append(MotionSegment(p, vel, TimeInterval(a.start, a.end)))
    g = plan.goal
    segs.append(MotionSegment((float(g[0]), float(g[1])), (0.0, 0.0),
                              TimeInterval(plan.end_time, INF)))
    return segs


def segment_table(plans: Iterable["MotionPlan"]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pack obstacle plans into kernel arrays.

    Returns ``(segs, bbox, owner)``: rows of ``px, py, qx, qy, slo, shi,
    radius``, the swept-centre bounding boxes, and the obstacle index of each
    row.
    """
    rows = []
    owner = []
    for k, plan in enumerate(plans):
        for s in decompose(plan):
            rows.append((s.origin[0], s.origin[1], s.velocity[0], s.velocity[1],
                         s.window.low, s.window.high, plan.radius))
            owner.append(k)
    segs = np.array(rows, dtype=np.float64).reshape(-1, 7)
    bbox = np.empty((len(rows), 4))
    if rows:
        span = np.where(np.isinf(segs[:, 5]), 0.0, segs[:, 5] - segs[:, 4])
        ex = segs[:, 0] + segs[:, 2] * span
        ey = segs[:, 1] + segs[:, 3] * span
        bbox[:, 0] = np.minimum(segs[:, 0], ex)
        bbox[:, 1] = np.minimum(segs[:, 1], ey)
        bbox[:, 2] = np.maximum(segs[:, 0], ex)
        bbox[:, 3] = np.maximum(segs[:, 1], ey)
    return segs, bbox, np.array(owner, dtype=np.int64)


def merge_intervals(pieces: Iterable[tuple[float, float]], tol: float = EPS) -> list[TimeInterval]:
    out: list[list[float]] = []
    for lo, hi in sorted(pieces):
        if out and lo <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [TimeInterval(lo, hi) for lo, hi in out]


def _clip_nonneg(pieces):
    for lo, hi in pieces:
        if hi > 0:
            yield max(lo, 0.0), hi


def vertex_unsafe_intervals(v, obstacle: "MotionPlan", agent_radius: float) -> list[TimeInterval]:
    R = agent_radius + obstacle.radius
    pieces = []
    for s in decompose(obstacle):
        lo, hi = kernels.vertex_window(float(v[0]), float(v[1]), s.origin[0], s.origin[1],
                                       s.velocity[0], s.velocity[1],
                                       s.window.low, s.window.high, R)
        if not math.isnan(lo):
            pieces.append((lo, hi))
    return merge_intervals(_clip_nonneg(pieces))


def unsafe_departure_intervals(u, v, speed: float, obstacle: "MotionPlan",
                               agent_radius: float) -> list[TimeInterval]:
    L = euclidean(u, v)
    if L == 0:
        raise ValueError("departure intervals need distinct endpoints")
    T = L / speed
    wx = (v[0] - u[0]) / T
    wy = (v[1] - u[1]) / T
    R = agent_radius + obstacle.radius
    buf = np.empty(16)
    pieces = []
    for s in decompose(obstacle):
        lo, hi = kernels.departure_window(float(u[0]), float(u[1]), wx, wy, T,
                                          s.origin[0], s.origin[1],
                                          s.velocity[0], s.velocity[1],
                                          s.window.low, s.window.high, R, buf)
        if not math.isnan(lo):
            pieces.append((lo, hi))
    return merge_intervals(_clip_nonneg(pieces))
