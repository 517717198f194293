"""Safe-interval table: every (vertex, safe interval) search state, enumerated
up front."""
from __future__ import annotations

import bisect
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .geometry import TimeInterval, merge_intervals, segment_table
from .world import GridMap, ProblemInstance, Vertex

SLIVER = 1e-9


def complement(unsafe: list[TimeInterval]) -> list[TimeInterval]:
    """Safe intervals in [0, inf) left over by a merged unsafe list."""
    safe = []
    t = 0.0
    for lo, hi in unsafe:
        if lo - t >= SLIVER:
            safe.append(TimeInterval(t, lo))
        t = max(t, hi)
    if t < math.inf:
        safe.append(TimeInterval(t, math.inf))
    return safe


@dataclass
class SafeIntervalTable:
    map: GridMap
    lo: np.ndarray      # per state
    hi: np.ndarray
    vert: np.ndarray    # flat vertex index of each state
    first: np.ndarray   # per flat vertex: first state id
    count: np.ndarray   # per flat vertex: number of states

    @property
    def n_states(self) -> int:
        return int(self.lo.shape[0])

    def states_of(self, v: Vertex) -> range:
        i = self.map.index(v)
        return range(int(self.first[i]), int(self.first[i] + self.count[i]))

    def intervals(self, v: Vertex) -> list[TimeInterval]:
        return [TimeInterval(float(self.lo[s]), float(self.hi[s])) for s in self.states_of(v)]

    def vertex_of(self, s: int) -> Vertex:
        return self.map.vertex(int(self.vert[s]))

    def interval_of(self, s: int) -> TimeInterval:
        return TimeInterval(float(self.lo[s]), float(self.hi[s]))


def unsafe_by_vertex(instance: ProblemInstance) -> dict[Vertex, list[TimeInterval]]:
    """Merged unsafe intervals for every vertex touched by some obstacle."""
    gm = instance.map
    segs, bbox, _ = segment_table(instance.obstacles)
    pieces = defaultdict(list)
    for i in range(segs.shape[0]):
        px, py, qx, qy, slo, shi, orad = segs[i]
        R = instance.radius + orad
        x0 = max(int(math.ceil(bbox[i, 0] - R)), 0)
        x1 = min(int(math.floor(bbox[i, 2] + R)), gm.width - 1)
        y0 = max(int(math.ceil(bbox[i, 1] - R)), 0)
        y1 = min(int(math.floor(bbox[i, 3] + R)), gm.height - 1)
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                if (x, y) in gm.blocked:
                    continue
                lo, hi = kernels.vertex_window(float(x), float(y), px, py, qx, qy, slo, shi, R)
                if not math.isnan(lo) and hi > 0:
                    pieces[(x, y)].append((max(lo, 0.0), hi))
    return {v: merge_intervals(p) for v, p in pieces.items()}


def build_safe_intervals(instance: ProblemInstance) -> SafeIntervalTable:
    gm = instance.map
    unsafe = unsafe_by_vertex(instance)
    V = gm.width * gm.height
    first = np.zeros(V, dtype=np.int64)
    count = np.zeros(V, dtype=np.int64)
    lo, hi, vert = [], [], []
    for idx in range(V):
        v = gm.vertex(idx)
        first[idx] = len(lo)
        if v in gm.blocked:
            continue
        safe = complement(unsafe.get(v, []))
        for iv in safe:
            lo.append(iv.low)
            hi.append(iv.high)
            vert.append(idx)
        count[idx] = len(safe)
    return SafeIntervalTable(gm, np.array(lo, dtype=float), np.array(hi, dtype=float),
                             np.array(vert, dtype=np.int64), first, count)


def state_at(table: SafeIntervalTable, v: Vertex, t: float) -> Optional[int]:
    """State id at ``v`` whose (closed) interval contains ``t`` within the
    comparison tolerance."""
    rng = table.states_of(v)
    if not rng:
        return None
    lows = table.lo[rng.start:rng.stop]
    k = bisect.bisect_right(lows, t + SLIVER) - 1
    if k < 0:
        return None
    s = rng.start + k
    return s if t <= table.hi[s] + SLIVER else None


def dump_table(table: SafeIntervalTable) -> bytes:
    """Structured text dump; unbounded ends are written as null."""
    doc = {}
    for idx in range(table.map.width * table.map.height):
        if table.count[idx] == 0 and table.map.vertex(idx) in table.map.blocked:
            continue
        x, y = table.map.vertex(idx)
        doc[f"{x},{y}"] = [[iv.low, None if math.isinf(iv.high) else iv.high]
                           for iv in table.intervals((x, y))]
    return (json.dumps(doc, indent=0, sort_keys=False) + "\n").encode()
