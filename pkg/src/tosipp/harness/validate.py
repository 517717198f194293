"""Independent plan checker by dense time sampling.

Deliberately shares no collision code with ``geometry``: positions come from
``np.interp`` over each plan's breakpoints and clearances are plain distance
computations, so it can audit the closed-form machinery.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..world import MotionPlan, ProblemInstance

DT = 1e-3
SLACK = 1e-6
CONTIGUITY_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    kind: str                  # "collision", "los", "contiguity" or "endpoint"
    time: float
    message: str
    obstacle: Optional[int] = None
    distance: Optional[float] = None

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class ValidationReport:
    violation: Optional[Violation] = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self) -> bool:
        return self.ok


def _structure(plan: MotionPlan, instance: ProblemInstance) -> Optional[Violation]:
    if tuple(plan.start) != tuple(instance.start):
        return Violation("endpoint", 0.0, f"plan starts at {plan.start}, expected {instance.start}")
    if tuple(plan.goal) != tuple(instance.goal):
        return Violation("endpoint", plan.end_time,
                         f"plan ends at {plan.goal}, expected {instance.goal}")
    prev_v, prev_t = tuple(plan.start), 0.0
    for i, a in enumerate(plan.actions):
        if tuple(a.source) != prev_v:
            return Violation("contiguity", a.start, f"action {i} leaves {a.source}, agent is at {prev_v}")
        if i and abs(a.start - prev_t) > CONTIGUITY_TOL:
            return Violation("contiguity", a.start,
                             f"action {i} starts at {a.start}, previous ends at {prev_t}")
        if a.kind == "move":
            want = math.hypot(a.target[0] - a.source[0], a.target[1] - a.source[1]) / instance.speed
            if abs(a.duration - want) > CONTIGUITY_TOL:
                return Violation("contiguity", a.start, f"action {i} has duration {a.duration}, "
                                 f"distance/speed is {want}")
        prev_v, prev_t = tuple(a.target), a.end
    return None


def _box_dist(px, py, cx, cy):
    dx = np.maximum(np.abs(px - cx) - 0.5, 0.0)
    dy = np.maximum(np.abs(py - cy) - 0.5, 0.0)
    return np.hypot(dx, dy)


def _static(plan: MotionPlan, instance: ProblemInstance) -> Optional[Violation]:
    gm = instance.map
    r = instance.radius
    if not gm.blocked:
        return None
    cells = np.array(sorted(gm.blocked), dtype=float)
    for i, a in enumerate(plan.actions):
        if a.kind != "move":
            continue
        L = math.hypot(a.target[0] - a.source[0], a.target[1] - a.source[1])
        n = max(2, int(math.ceil(L / DT)) + 1)
        s = np.linspace(0.0, 1.0, n)
        px = a.source[0] + (a.target[0] - a.source[0]) * s
        py = a.source[1] + (a.target[1] - a.source[1]) * s
        lo_x, hi_x = min(a.source[0], a.target[0]) - 1.5, max(a.source[0], a.target[0]) + 1.5
        lo_y, hi_y = min(a.source[1], a.target[1]) - 1.5, max(a.source[1], a.target[1]) + 1.5
        near = cells[(cells[:, 0] >= lo_x) & (cells[:, 0] <= hi_x)
                     & (cells[:, 1] >= lo_y) & (cells[:, 1] <= hi_y)]
        if near.size == 0:
            continue
        d = _box_dist(px[:, None], py[:, None], near[None, :, 0], near[None, :, 1])
        k = np.unravel_index(int(np.argmin(d)), d.shape)
        if d[k] < r - SLACK:
            t = a.start + a.duration * s[k[0]]
            cell = tuple(int(c) for c in near[k[1]])
            return Violation("los", t, f"move {i} passes {d[k]:.6f} from blocked cell {cell} "
                             f"(radius {r}) at t={t:.6f}", distance=float(d[k]))
    return None


def validate_plan(plan: MotionPlan, instance: ProblemInstance, dt: float = DT,
                  slack: float = SLACK) -> ValidationReport:
    """Check contiguity, line of sight and clearance against every obstacle
    over ``[0, end + 1]`` where end is the last moment anything moves."""
    v = _structure(plan, instance) or _static(plan, instance)
    if v is not None:
        return ValidationReport(v)
    end = plan.end_time
    for ob in instance.obstacles:
        end = max(end, ob.end_time)
    times = np.arange(0.0, end + 1.0 + dt, dt)
    # breakpoints themselves are where contact is most likely
    extra = [plan.waypoints()[0]] + [ob.waypoints()[0] for ob in instance.obstacles]
    times = np.unique(np.concatenate([times] + extra))
    tw, xw, yw = plan.waypoints()
    ax = np.interp(times, tw, xw)
    ay = np.interp(times, tw, yw)
    for k, ob in enumerate(instance.obstacles):
        to, xo, yo = ob.waypoints()
        d = np.hypot(ax - np.interp(times, to, xo), ay - np.interp(times, to, yo))
        R = instance.radius + ob.radius
        j = int(np.argmin(d))
        if d[j] < R - slack:
            return ValidationReport(Violation(
                "collision", float(times[j]),
                f"agent within {d[j]:.6f} of obstacle {k} at t={times[j]:.6f} (needs {R})",
                obstacle=k, distance=float(d[j])))
    return ValidationReport()
