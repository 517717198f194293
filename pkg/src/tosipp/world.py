"""Static maps, motion plans, problem instances and their file formats.

Grid convention: cell ``(x, y)`` is the unit square centred on ``(x, y)``; its
vertex is the centre. ``x`` is the column, ``y`` the row counted from the top
line of the map file.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .geometry import euclidean, los

Vertex = tuple[int, int]

TOL = 1e-9
SCENARIO_VERSION = 1
PLAN_VERSION = 1

PASSABLE = frozenset(".G")


class ParseError(ValueError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class PlanValidationError(ValueError):
    """A motion plan breaks one of its structural invariants."""


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    blocked: frozenset = frozenset()

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"map dimensions must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "blocked", frozenset(self.blocked))
        for x, y in self.blocked:
            if not self.in_bounds((x, y)):
                raise ValueError(f"blocked cell {(x, y)} outside {self.width}x{self.height} map")

    @classmethod
    def from_array(cls, blocked: np.ndarray) -> "GridMap":
        """Build from a boolean ``[row, col]`` array."""
        ys, xs = np.nonzero(blocked)
        return cls(blocked.shape[1], blocked.shape[0],
                   frozenset(zip(xs.tolist(), ys.tolist())))

    @cached_property
    def grid(self) -> np.ndarray:
        g = np.zeros((self.height, self.width), dtype=np.bool_)
        for x, y in self.blocked:
            g[y, x] = True
        g.setflags(write=False)
        return g

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha1(f"{self.width}x{self.height}:".encode())
        h.update(np.ascontiguousarray(self.grid).tobytes())
        return h.hexdigest()

    def in_bounds(self, v: Vertex) -> bool:
        return 0 <= v[0] < self.width and 0 <= v[1] < self.height

    def is_free(self, v: Vertex) -> bool:
        return self.in_bounds(v) and v not in self.blocked

    def free_cells(self) -> list[Vertex]:
        return [(x, y) for y in range(self.height) for x in range(self.width)
                if (x, y) not in self.blocked]

    def index(self, v: Vertex) -> int:
        return v[1] * self.width + v[0]

    def vertex(self, idx: int) -> Vertex:
        return (idx % self.width, idx // self.width)


@dataclass(frozen=True)
class TimedAction:
    kind: str  # "wait" or "move"
    start: float
    duration: float
    source: Vertex
    target: Vertex

    @property
    def end(self) -> float:
        return self.start + self.duration

    def position(self, t: float) -> tuple[float, float]:
        if self.kind == "wait" or self.duration <= 0:
            return (float(self.source[0]), float(self.source[1]))
        s = min(max((t - self.start) / self.duration, 0.0), 1.0)
        return (self.source[0] + s * (self.target[0] - self.source[0]),
                self.source[1] + s * (self.target[1] - self.source[1]))


@dataclass(frozen=True)
class MotionPlan:
    """Timed wait/move sequence of a disk agent.

    The occupant sits at ``start`` until the first action begins and at the
    last target forever after the plan ends.
    """
    start: Vertex
    actions: tuple = ()
    radius: float = 0.5
    speed: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "actions", tuple(self.actions))

    @property
    def goal(self) -> Vertex:
        return self.actions[-1].target if self.actions else self.start

    @property
    def begin_time(self) -> float:
        return self.actions[0].start if self.actions else 0.0

    @property
    def end_time(self) -> float:
        return self.actions[-1].end if self.actions else 0.0

    @property
    def cost(self) -> float:
        return sum(a.duration for a in self.actions)

    def position(self, t: float) -> tuple[float, float]:
        if not self.actions or t <= self.actions[0].start:
            return (float(self.start[0]), float(self.start[1]))
        for a in self.actions:
            if t <= a.end:
                return a.position(t)
        g = self.goal
        return (float(g[0]), float(g[1]))

    def waypoints(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Breakpoints ``(times, xs, ys)`` of the piecewise-linear trajectory."""
        ts = [0.0]
        xs = [float(self.start[0])]
        ys = [float(self.start[1])]
        for a in self.actions:
            ts.append(a.start)
            xs.append(float(a.source[0]))
            ys.append(float(a.source[1]))
            ts.append(a.end)
            xs.append(float(a.target[0]))
            ys.append(float(a.target[1]))
        return np.array(ts), np.array(xs), np.array(ys)

    def check(self, grid_map: GridMap, label: str = "plan") -> None:
        """Raise PlanValidationError on the first broken invariant."""
        if not self.radius > 0:
            raise PlanValidationError(f"{label}: radius must be positive")
        if not self.speed > 0:
            raise PlanValidationError(f"{label}: speed must be positive")
        if not grid_map.is_free(self.start):
            raise PlanValidationError(f"{label}: start {self.start} is blocked or out of bounds")
        prev_end = None
        at = self.start
        for i, a in enumerate(self.actions):
            where = f"{label}, action {i}"
            if a.kind not in ("wait", "move"):
                raise PlanValidationError(f"{where}: unknown kind {a.kind!r}")
            if not (a.start >= 0 and math.isfinite(a.start)):
                raise PlanValidationError(f"{where}: negative or non-finite start time {a.start}")
            if not a.duration > 0:
                raise PlanValidationError(f"{where}: non-positive duration {a.duration}")
            for v in (a.source, a.target):
                if not grid_map.is_free(v):
                    raise PlanValidationError(f"{where}: vertex {v} is blocked or out of bounds")
            if a.source != at:
                raise PlanValidationError(f"{where}: starts at {a.source}, occupant is at {at}")
            if prev_end is not None and abs(a.start - prev_end) > TOL:
                raise PlanValidationError(
                    f"{where}: contiguity broken, starts at {a.start} but previous ends at {prev_end}")
            if a.kind == "wait":
                if a.source != a.target:
                    raise PlanValidationError(f"{where}: wait must keep source == target")
            else:
                if a.source == a.target:
                    raise PlanValidationError(f"{where}: zero-length move")
                expect = euclidean(a.source, a.target) / self.speed
                if abs(a.duration - expect) > TOL:
                    raise PlanValidationError(
                        f"{where}: move duration {a.duration} != length/speed {expect}")
                if not los(a.source, a.target, self.radius, grid_map):
                    raise PlanValidationError(f"{where}: move {a.source}->{a.target} has no line of sight")
            prev_end = a.end
            at = a.target


def make_move(source: Vertex, target: Vertex, start: float, speed: float) -> TimedAction:
    return TimedAction("move", start, euclidean(source, target) / speed, tuple(source), tuple(target))


def make_wait(at: Vertex, start: float, duration: float) -> TimedAction:
    return TimedAction("wait", start, duration, tuple(at), tuple(at))


def plan_from_path(path: Iterable[Vertex], radius: float = 0.5, speed: float = 1.0,
                   start_time: float = 0.0) -> MotionPlan:
    """Move-only plan through the given vertices without waiting."""
    path = [tuple(v) for v in path]
    t = start_time
    acts = []
    for u, v in zip(path, path[1:]):
        a = make_move(u, v, t, speed)
        acts.append(a)
        t = a.end
    return MotionPlan(path[0], tuple(acts), radius, speed)


@dataclass(frozen=True)
class ProblemInstance:
    map: GridMap
    start: Vertex
    goal: Vertex
    radius: float = 0.5
    speed: float = 1.0
    obstacles: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "goal", tuple(self.goal))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for name, v in (("start", self.start), ("goal", self.goal)):
            if not self.map.is_free(v):
                raise PlanValidationError(f"agent {name} {v} is blocked or out of bounds")
        if not 0 < self.radius <= 0.5:
            raise PlanValidationError(f"agent radius must lie in (0, 0.5], got {self.radius}")
        if not self.speed > 0:
            raise PlanValidationError("agent speed must be positive")

    def with_obstacles(self, obstacles: Sequence[MotionPlan]) -> "ProblemInstance":
        return ProblemInstance(self.map, self.start, self.goal, self.radius, self.speed,
                               tuple(obstacles))


# ---------------------------------------------------------------- .map files

def _text(data: Union[bytes, str]) -> str:
    return data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data


def parse_map(data: Union[bytes, str]) -> GridMap:
    lines = _text(data).splitlines()
    header = {}
    i = 0
    while i < len(lines):
        raw = lines[i].strip()
        i += 1
        if not raw:
            continue
        if raw == "map":
            break
        parts = raw.split()
        if len(parts) != 2 or parts[0] not in ("type", "height", "width"):
            raise ParseError(f"unexpected header line {raw!r}", i)
        header[parts[0]] = (parts[1], i)
    else:
        raise ParseError("missing 'map' line", len(lines))
    for key in ("height", "width"):
        if key not in header:
            raise ParseError(f"missing '{key}' header", i)
    dims = {}
    for key in ("height", "width"):
        value, lineno = header[key]
        try:
            dims[key] = int(value)
        except ValueError:
            raise ParseError(f"{key} is not an integer: {value!r}", lineno) from None
        if dims[key] < 1:
            raise ParseError(f"{key} must be >= 1, got {dims[key]}", lineno)
    H, W = dims["height"], dims["width"]
    rows = lines[i:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != H:
        raise ParseError(f"header says height {H} but {len(rows)} rows follow", i + min(len(rows), H) + 1)
    blocked = set()
    for y, row in enumerate(rows):
        row = row.rstrip("\r\n")
        if len(row) != W:
            raise ParseError(f"row has {len(row)} cells, expected {W}", i + y + 1)
        for x, ch in enumerate(row):
            if ch not in PASSABLE:
                blocked.add((x, y))
    return GridMap(W, H, frozenset(blocked))


def serialize_map(grid_map: GridMap) -> bytes:
    out = ["type octile", f"height {grid_map.height}", f"width {grid_map.width}", "map"]
    for y in range(grid_map.height):
        out.append("".join("@" if (x, y) in grid_map.blocked else "."
                           for x in range(grid_map.width)))
    return ("\n".join(out) + "\n").encode()


# ---------------------------------------------------------- scenario / plans

@dataclass(frozen=True)
class Scenario:
    start: Vertex
    goal: Vertex
    radius: float
    speed: float
    obstacles: tuple

    def __iter__(self):
        # unpacks as (start, goal, obstacles)
        return iter((self.start, self.goal, self.obstacles))

    def instance(self, grid_map: GridMap, radius: Optional[float] = None,
                 speed: Optional[float] = None, n_obstacles: Optional[int] = None) -> ProblemInstance:
        obs = self.obstacles if n_obstacles is None else self.obstacles[:n_obstacles]
        return ProblemInstance(grid_map, self.start, self.goal,
                               self.radius if radius is None else radius,
                               self.speed if speed is None else speed, obs)


def _vertex(obj, where: str) -> Vertex:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in obj)):
        raise PlanValidationError(f"{where}: expected [x, y] integer pair, got {obj!r}")
    return (obj[0], obj[1])


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise PlanValidationError(f"{where}: expected a number, got {obj!r}")
    return float(obj)


def _actions_from_json(items, speed: float, where: str) -> tuple:
    acts = []
    for i, item in enumerate(items):
        w = f"{where}, action {i}"
        try:
            kind = item["kind"]
            start = _number(item["start"], w)
            src = _vertex(item["source"], w)
            tgt = _vertex(item["target"], w)
        except (KeyError, TypeError) as exc:
            raise PlanValidationError(f"{w}: missing field {exc}") from None
        if start < 0:
            raise PlanValidationError(f"{w}: negative start time {start}")
        if kind == "move":
            a = make_move(src, tgt, start, speed)
            # durations are derived, but a stored one must agree
            if "duration" in item and abs(_number(item["duration"], w) - a.duration) > TOL:
                raise PlanValidationError(f"{w}: duration {item['duration']} differs from "
                                          f"length/speed {a.duration}")
            acts.append(a)
        elif kind == "wait":
            if "duration" in item:
                dur = _number(item["duration"], w)
            elif i + 1 < len(items):
                dur = _number(items[i + 1]["start"], w) - start
            else:
                raise PlanValidationError(f"{w}: trailing wait needs an explicit duration")
            acts.append(TimedAction("wait", start, dur, src, tgt))
        else:
            raise PlanValidationError(f"{w}: unknown kind {kind!r}")
    return tuple(acts)


def _actions_to_json(actions) -> list:
    out = []
    for a in actions:
        item = {"kind": a.kind, "start": a.start,
                "source": list(a.source), "target": list(a.target)}
        if a.kind == "wait":
            item["duration"] = a.duration
        out.append(item)
    return out


def _obstacle_from_json(obj, grid_map: Optional[GridMap], idx: int,
                        label: Optional[str] = None) -> MotionPlan:
    where = label or f"obstacle {idx}"
    try:
        radius = _number(obj["radius"], where)
        speed = _number(obj["speed"], where)
        items = obj.get("actions", [])
    except (KeyError, TypeError, AttributeError) as exc:
        raise PlanValidationError(f"{where}: missing field {exc}") from None
    if not speed > 0:
        raise PlanValidationError(f"{where}: speed must be positive")
    acts = _actions_from_json(items, speed, where)
    if "start" in obj:
        start = _vertex(obj["start"], where)
    elif acts:
        start = acts[0].source
    else:
        raise PlanValidationError(f"{where}: plan without actions needs a 'start' vertex")
    plan = MotionPlan(start, acts, radius, speed)
    if grid_map is not None:
        plan.check(grid_map, where)
    return plan


def _obstacle_to_json(plan: MotionPlan) -> dict:
    return {"radius": plan.radius, "speed": plan.speed, "start": list(plan.start),
            "actions": _actions_to_json(plan.actions)}


def parse_scenario(data: Union[bytes, str], grid_map: GridMap) -> Scenario:
    try:
        doc = json.loads(_text(data))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    if doc.get("version") != SCENARIO_VERSION:
        raise ParseError(f"unsupported scenario version {doc.get('version')!r}")
    try:
        agent = doc["agent"]
        start = _vertex(agent["start"], "agent start")
        goal = _vertex(agent["goal"], "agent goal")
        radius = _number(agent.get("radius", 0.5), "agent radius")
        speed = _number(agent.get("speed", 1.0), "agent speed")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"agent block missing field {exc}") from None
    for name, v in (("start", start), ("goal", goal)):
        if not grid_map.is_free(v):
            raise PlanValidationError(f"agent {name} {v} is blocked or out of bounds")
    obstacles = tuple(_obstacle_from_json(o, grid_map, i)
                      for i, o in enumerate(doc.get("obstacles", [])))
    return Scenario(start, goal, radius, speed, obstacles)


def serialize_scenario(scenario: Scenario) -> bytes:
    doc = {
        "version": SCENARIO_VERSION,
        "agent": {"start": list(scenario.start), "goal": list(scenario.goal),
                  "radius": scenario.radius, "speed": scenario.speed},
        "obstacles": [_obstacle_to_json(p) for p in scenario.obstacles],
    }
    return (json.dumps(doc, indent=1) + "\n").encode()


def serialize_plan(plan: MotionPlan, cost: Optional[float] = None) -> bytes:
    doc = {"version": PLAN_VERSION, "radius": plan.radius, "speed": plan.speed,
           "start": list(plan.start),
           "cost": plan.cost if cost is None else cost,
           "actions": _actions_to_json(plan.actions)}
    return (json.dumps(doc, indent=1) + "\n").encode()


def parse_plan(data: Union[bytes, str], grid_map: Optional[GridMap] = None) -> MotionPlan:
    try:
        doc = json.loads(_text(data))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("version") != PLAN_VERSION:
        raise ParseError("not a version-1 plan document")
    return _obstacle_from_json(doc, grid_map, 0, label="plan")
