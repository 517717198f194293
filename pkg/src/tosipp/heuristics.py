"""Admissible time-to-go estimates."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from . import kernels
from .world import GridMap, Vertex

CACHE_VERSION = 1


@dataclass(frozen=True, eq=False)
class HeuristicTable:
    kind: str                 # "euclid" or "perfect"
    goal: Vertex
    speed: float
    radius: float
    values: np.ndarray        # [row, col] time to goal, inf if unreachable

    def value(self, v: Vertex) -> float:
        return float(self.values[v[1], v[0]])

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def euclid_h(v: Vertex, goal: Vertex, speed: float) -> float:
    return math.hypot(goal[0] - v[0], goal[1] - v[1]) / speed


def build_euclid_h(grid_map: GridMap, goal: Vertex, speed: float, radius: float = 0.5) -> HeuristicTable:
    ys, xs = np.mgrid[0:grid_map.height, 0:grid_map.width]
    vals = np.hypot(xs - goal[0], ys - goal[1]) / speed
    vals.setflags(write=False)
    return HeuristicTable("euclid", tuple(goal), speed, radius, vals)


@lru_cache(maxsize=64)
def _perfect_dist(grid_map: GridMap, goal: Vertex, radius: float) -> np.ndarray:
    d = np.asarray(kernels.perfect_dist(grid_map.grid, goal[0], goal[1], float(radius)))
    d.setflags(write=False)
    return d


def build_perfect_h(grid_map: GridMap, goal: Vertex, radius: float, speed: float) -> HeuristicTable:
    vals = _perfect_dist(grid_map, tuple(goal), float(radius)) / speed
    vals.setflags(write=False)
    return HeuristicTable("perfect", tuple(goal), speed, radius, vals)


def build_heuristic(kind: str, grid_map: GridMap, goal: Vertex, radius: float,
                    speed: float) -> HeuristicTable:
    if kind == "euclid":
        return build_euclid_h(grid_map, goal, speed, radius)
    if kind == "perfect":
        return build_perfect_h(grid_map, goal, radius, speed)
    raise ValueError(f"unknown heuristic kind {kind!r}")


def pairwise_h(a: Vertex, b: Vertex, table: HeuristicTable) -> float:
    """Lower bound on the travel time between ``a`` and ``b``.

    With a perfect table this is the differential bound
    ``max(euclid, |value(a) - value(b)|)``; static shortest paths are
    symmetric so the absolute difference is still admissible.
    """
    e = math.hypot(b[0] - a[0], b[1] - a[1]) / table.speed
    if table.kind != "perfect":
        return e
    va = table.values[a[1], a[0]]
    vb = table.values[b[1], b[0]]
    if math.isinf(va) or math.isinf(vb):
        # different static components cannot reach each other
        return e if va == vb else math.inf
    return max(e, abs(float(va) - float(vb)))


def save_heuristic(table: HeuristicTable, grid_map: GridMap) -> bytes:
    buf = io.BytesIO()
    np.savez(buf, version=np.int64(CACHE_VERSION), kind=np.str_(table.kind),
             map_digest=np.str_(grid_map.digest), goal=np.array(table.goal, dtype=np.int64),
             speed=np.float64(table.speed), radius=np.float64(table.radius),
             values=np.asarray(table.values))
    return buf.getvalue()


def load_heuristic(data: Union[bytes, str], grid_map: Optional[GridMap] = None) -> HeuristicTable:
    """Inverse of save_heuristic. Rejects caches built for another map."""
    src = io.BytesIO(data) if isinstance(data, (bytes, bytearray)) else data
    with np.load(src) as z:
        if int(z["version"]) != CACHE_VERSION:
            raise ValueError(f"unsupported heuristic cache version {int(z['version'])}")
        if grid_map is not None and str(z["map_digest"]) != grid_map.digest:
            raise ValueError("heuristic cache was built for a different map")
        vals = np.array(z["values"])
        vals.setflags(write=False)
        return HeuristicTable(str(z["kind"]), tuple(int(c) for c in z["goal"]),
                              float(z["speed"]), float(z["radius"]), vals)
