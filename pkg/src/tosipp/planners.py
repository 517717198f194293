"""Safe-interval planners: SIPP, greedy AA-SIPP, naive and inverted
time-optimal any-angle SIPP.

All planners search over the states of a prebuilt ``SafeIntervalTable``. A
state's ``g`` is the earliest known collision-free arrival; ``depart`` is the
matching departure time from its parent, which plan reconstruction uses to
insert waits.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .geometry import TimeInterval, euclidean, segment_table
from .heuristics import HeuristicTable
from .intervals import SafeIntervalTable, state_at
from .world import MotionPlan, ProblemInstance, TimedAction, Vertex, make_move, make_wait

INF = math.inf
TOL = 1e-9

NEIGHBOURS_8 = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass
class PlannerStats:
    iterations: int = 0
    vt_calls: int = 0
    runtime: float = 0.0      # seconds
    nodes_generated: int = 0


@dataclass
class SearchNode:
    """Read-only snapshot of one search state."""
    state: int
    vertex: Vertex
    interval: TimeInterval
    g: float
    g_low: float
    f: float
    parent: Optional[int]
    bpp: Optional[int]
    parents: frozenset
    membership: str           # "open", "closed" or "neither"


@dataclass
class PlannerResult:
    outcome: str              # "solved" or "no_path"
    plan: Optional[MotionPlan]
    cost: float
    stats: PlannerStats
    search: Optional["_Search"] = field(default=None, repr=False)

    @property
    def solved(self) -> bool:
        return self.outcome == "solved"


@dataclass
class IterationEvent:
    """What an observer sees after each main-loop iteration."""
    iteration: int
    state: int
    f_extracted: float
    g_low_extracted: float
    bpp_was_parent: bool
    g: float
    g_low: float
    closed: bool
    f_min: float              # min f left in OPEN after the iteration
    iterations: int
    vt_calls: int
    search: "_Search"


Observer = Callable[[IterationEvent], None]


class _Search:
    """Per-run mutable state shared by all planners."""

    def __init__(self, instance: ProblemInstance, table: SafeIntervalTable,
                 heuristic: HeuristicTable):
        self.instance = instance
        self.table = table
        self.heuristic = heuristic
        self.speed = float(instance.speed)
        self.radius = float(instance.radius)
        self.segs, self.bbox, _ = segment_table(instance.obstacles)
        W = instance.map.width
        N = table.n_states
        self.N = N
        self.vert = table.vert
        self.sx = (table.vert % W).astype(np.float64)
        self.sy = (table.vert // W).astype(np.float64)
        self.lo = table.lo
        self.hi = table.hi
        self.h = np.asarray(heuristic.flat, dtype=np.float64)[table.vert] if N else np.empty(0)
        self.g = np.full(N, INF)
        self.depart = np.full(N, INF)
        self.parent = np.full(N, -1, dtype=np.int64)
        self.closed = np.zeros(N, dtype=np.bool_)
        self.stats = PlannerStats()
        self._vis: dict[int, np.ndarray] = {}
        self._buf = np.empty(16)
        self._wins = np.empty((self.segs.shape[0] + 1, 2))

    # -- states ---------------------------------------------------------
    def vertex(self, s: int) -> Vertex:
        return (int(self.sx[s]), int(self.sy[s]))

    def start_state(self) -> Optional[int]:
        return state_at(self.table, self.instance.start, 0.0)

    def goal_state(self) -> Optional[int]:
        rng = self.table.states_of(self.instance.goal)
        if rng and math.isinf(self.hi[rng.stop - 1]):
            return rng.stop - 1
        return None

    def visible_states(self, s: int) -> np.ndarray:
        """States at other vertices in line of sight of state ``s``'s vertex."""
        v = int(self.vert[s])
        ids = self._vis.get(v)
        if ids is None:
            gm = self.instance.map
            mask = np.asarray(kernels.visible_from(gm.grid, v % gm.width, v // gm.width,
                                                   self.radius)).reshape(-1)
            mask[v] = False
            ids = np.flatnonzero(mask[self.vert])
            self._vis[v] = ids
        return ids

    def edge_states(self, s: int) -> list[int]:
        """States of 8-connected neighbours reachable by a regular move."""
        gm = self.instance.map
        x, y = self.vertex(s)
        out = []
        for dx, dy in NEIGHBOURS_8:
            v = (x + dx, y + dy)
            if not gm.is_free(v):
                continue
            if not kernels.los_clear(gm.grid, float(x), float(y), float(v[0]), float(v[1]), self.radius):
                continue
            out.extend(self.table.states_of(v))
        return out

    def los_states(self, a: int, b: int) -> bool:
        gm = self.instance.map
        return bool(kernels.los_clear(gm.grid, self.sx[a], self.sy[a], self.sx[b], self.sy[b],
                                      self.radius))

    # -- transitions ----------------------------------------------------
    def travel(self, a: int, b: int) -> float:
        return math.hypot(self.sx[b] - self.sx[a], self.sy[b] - self.sy[a]) / self.speed

    def validate(self, target: int, source: int) -> float:
        """Earliest departure from ``source`` into ``target`` (inf if none)."""
        self.stats.vt_calls += 1
        g = self.g[source]
        if not g < INF:
            return INF
        return float(kernels.earliest_departure(
            self.sx[source], self.sy[source], self.sx[target], self.sy[target],
            self.speed, g, self.hi[source], self.lo[target], self.hi[target],
            self.segs, self.bbox, self.radius, self._buf, self._wins))

    def validate_many(self, source: int, targets: np.ndarray) -> np.ndarray:
        self.stats.vt_calls += len(targets)
        if len(targets) == 0:
            return np.empty(0)
        return np.asarray(kernels.earliest_departures(
            self.sx[source], self.sy[source], self.speed, self.g[source], self.hi[source],
            self.sx[targets], self.sy[targets], self.lo[targets], self.hi[targets],
            self.segs, self.bbox, self.radius))

    def pair_h(self, a: int, targets) -> np.ndarray:
        """Vectorized pairwise_h from state ``a`` to each target state."""
        e = np.hypot(self.sx[targets] - self.sx[a], self.sy[targets] - self.sy[a]) / self.speed
        if self.heuristic.kind != "perfect":
            return e
        va = self.h[a]
        vb = self.h[targets]
        with np.errstate(invalid="ignore"):
            diff = np.abs(vb - va)
        both_inf = np.isinf(va) & np.isinf(vb)
        diff = np.where(both_inf, 0.0, diff)
        return np.maximum(e, diff)

    # -- output ---------------------------------------------------------
    def node(self, s: int) -> SearchNode:
        return SearchNode(s, self.vertex(s), self.table.interval_of(s), float(self.g[s]),
                          float(self.g[s]), float(self.g[s] + self.h[s]),
                          None if self.parent[s] < 0 else int(self.parent[s]), None,
                          frozenset(), "closed" if self.closed[s] else "neither")

    def reconstruct(self, goal: int) -> MotionPlan:
        chain = [goal]
        while self.parent[chain[-1]] >= 0:
            chain.append(int(self.parent[chain[-1]]))
        chain.reverse()
        acts: list[TimedAction] = []
        for p, c in zip(chain, chain[1:]):
            dep = float(self.depart[c])
            at = float(self.g[p])
            if dep - at > 1e-12:
                acts.append(make_wait(self.vertex(p), at, dep - at))
            acts.append(make_move(self.vertex(p), self.vertex(c), dep, self.speed))
        return MotionPlan(self.instance.start, tuple(acts), self.radius, self.speed)

    def result(self, goal: Optional[int], t0: float) -> PlannerResult:
        self.stats.runtime = time.perf_counter() - t0
        if goal is None or not self.g[goal] < INF:
            return PlannerResult("no_path", None, INF, self.stats, self)
        return PlannerResult("solved", self.reconstruct(goal), float(self.g[goal]), self.stats, self)


def _trivial(search: _Search, t0: float) -> Optional[PlannerResult]:
    """Handle unsolvable-by-construction and start == goal instances."""
    s, gs = search.start_state(), search.goal_state()
    if s is None or gs is None:
        return search.result(None, t0)
    search.g[s] = 0.0
    if s == gs:
        search.closed[s] = True
        return search.result(gs, t0)
    return None


# ------------------------------------------------------------ forward search

def _forward(instance, table, heuristic, successors, observer, goal_exit, mode):
    """A* over safe intervals with pluggable successor generation."""
    t0 = time.perf_counter()
    S = _Search(instance, table, heuristic)
    done = _trivial(S, t0)
    if done is not None:
        return done
    start, goal = S.start_state(), S.goal_state()
    heap = [(S.h[start], -0.0, int(S.vert[start]), start)]
    S.stats.nodes_generated = 1
    while heap:
        f, neg_g, _, s = heapq.heappop(heap)
        if S.closed[s] or -neg_g != S.g[s]:
            continue
        S.closed[s] = True
        S.stats.iterations += 1
        if s == goal and goal_exit:
            _notify(S, observer, s, f, S.g[s], False, heap)
            return S.result(goal, t0)
        for c, dep, via in successors(S, s):
            arr = dep + S.travel(via, c)
            if arr < S.g[c] - TOL:
                if not S.g[c] < INF:
                    S.stats.nodes_generated += 1
                S.g[c] = arr
                S.depart[c] = dep
                S.parent[c] = via
                heapq.heappush(heap, (arr + S.h[c], -arr, int(S.vert[c]), int(c)))
        _notify(S, observer, s, f, S.g[s], False, heap)
    return S.result(goal if goal is not None and S.closed[goal] else None, t0)


def _notify(S, observer, s, f, glow, bpp_was_parent, heap, open_min=None):
    if observer is None:
        return
    if open_min is None:
        open_min = INF
        for f2, ng, _, s2 in heap:
            if not S.closed[s2] and -ng == S.g[s2]:
                open_min = min(open_min, f2)
    observer(IterationEvent(S.stats.iterations, int(s), float(f), float(glow), bpp_was_parent,
                            float(S.g[s]), float(glow), bool(S.closed[s]), float(open_min),
                            S.stats.iterations, S.stats.vt_calls, S))


def _all_visible(S: _Search, s: int):
    cand = S.visible_states(s)
    cand = cand[~S.closed[cand]]
    deps = S.validate_many(s, cand)
    for c, d in zip(cand.tolist(), deps.tolist()):
        if d < INF:
            yield c, d, s


def _edges(S: _Search, s: int):
    cand = np.array([c for c in S.edge_states(s) if not S.closed[c]], dtype=np.int64)
    deps = S.validate_many(s, cand)
    for c, d in zip(cand.tolist(), deps.tolist()):
        if d < INF:
            yield c, d, s


def _edges_reset_parent(S: _Search, s: int):
    p = int(S.parent[s])
    for c in S.edge_states(s):
        if S.closed[c]:
            continue
        d = S.validate(c, s)
        best = (d + S.travel(s, c), d, s) if d < INF else (INF, INF, s)
        if p >= 0 and S.vert[c] != S.vert[p] and S.los_states(p, c):
            dp = S.validate(c, p)
            if dp < INF and dp + S.travel(p, c) < best[0]:
                best = (dp + S.travel(p, c), dp, p)
        if best[1] < INF:
            yield c, best[1], best[2]


def plan_sipp(instance: ProblemInstance, table: SafeIntervalTable, heuristic: HeuristicTable,
              observer: Optional[Observer] = None, goal_exit: bool = True) -> PlannerResult:
    """Regular SIPP over 8-connected edges (debug baseline)."""
    return _forward(instance, table, heuristic, _edges, observer, goal_exit, "sipp")


def plan_aa_sipp(instance: ProblemInstance, table: SafeIntervalTable, heuristic: HeuristicTable,
                 observer: Optional[Observer] = None, goal_exit: bool = True) -> PlannerResult:
    """Greedy any-angle SIPP: edge successors plus the reset-to-grandparent
    shortcut whenever it arrives earlier."""
    return _forward(instance, table, heuristic, _edges_reset_parent, observer, goal_exit, "aasipp")


def plan_nto(instance: ProblemInstance, table: SafeIntervalTable, heuristic: HeuristicTable,
             observer: Optional[Observer] = None, goal_exit: bool = True) -> PlannerResult:
    """Naive time-optimal planner: every line-of-sight state is a successor."""
    return _forward(instance, table, heuristic, _all_visible, observer, goal_exit, "nto")


# ---------------------------------------------------------- inverted search

class ITOSearch(_Search):
    """State of the inverted planner: all nodes live in OPEN from the start
    and pull candidate parents instead of pushing successors."""

    def __init__(self, instance, table, heuristic):
        super().__init__(instance, table, heuristic)
        N = self.N
        self.g_low = np.full(N, INF)
        self.f = np.full(N, INF)
        self.bpp = np.full(N, -1, dtype=np.int64)
        self.parents: list[set] = [set() for _ in range(N)]
        self.version = np.zeros(N, dtype=np.int64)
        self.heap: list = []

    def push(self, n: int) -> None:
        self.version[n] += 1
        if self.f[n] < INF:
            heapq.heappush(self.heap, (self.f[n], -self.g_low[n], int(self.vert[n]), n,
                                       int(self.version[n])))

    def _clean(self) -> None:
        heap = self.heap
        while heap and (self.closed[heap[0][3]] or heap[0][4] != self.version[heap[0][3]]):
            heapq.heappop(heap)

    def min_f(self) -> float:
        self._clean()
        return self.heap[0][0] if self.heap else INF

    def pop(self) -> int:
        self._clean()
        n = heapq.heappop(self.heap)[3]
        self.version[n] += 1
        return n

    def new_best_potential_parent_exists(self, n: int) -> bool:
        self.g_low[n] = self.g[n]
        self.bpp[n] = self.parent[n]
        self.f[n] = self.g_low[n] + self.h[n]
        if not self.parents[n]:
            return False
        cand = np.fromiter(self.parents[n], dtype=np.int64, count=len(self.parents[n]))
        cost = self.g[cand] + self.pair_h(n, cand)
        k = int(np.argmin(cost))
        # arrival can never precede the interval start, same bound as at init
        best = max(self.lo[n], cost[k])
        if best < self.g_low[n] - TOL:
            self.g_low[n] = best
            self.bpp[n] = cand[k]
            self.f[n] = best + self.h[n]
            return True
        return False

    def node(self, s: int) -> SearchNode:
        if self.closed[s]:
            member = "closed"
        elif self.version[s] % 2 == 1 or self.f[s] == INF:
            member = "open"
        else:
            member = "neither"
        return SearchNode(s, self.vertex(s), self.table.interval_of(s), float(self.g[s]),
                          float(self.g_low[s]), float(self.f[s]),
                          None if self.parent[s] < 0 else int(self.parent[s]),
                          None if self.bpp[s] < 0 else int(self.bpp[s]),
                          frozenset(self.parents[s]), member)


def ito_init(instance: ProblemInstance, table: SafeIntervalTable,
             heuristic: HeuristicTable) -> ITOSearch:
    S = ITOSearch(instance, table, heuristic)
    S.stats.nodes_generated = S.N
    start = S.start_state()
    if start is None:
        return S
    S.g[start] = 0.0
    S.g_low[start] = 0.0
    S.f[start] = S.h[start]
    S.closed[start] = True
    vis = S.visible_states(start)
    S.g_low[vis] = np.maximum(S.lo[vis], S.pair_h(start, vis))
    S.bpp[vis] = start
    for n in vis.tolist():
        S.parents[n].add(start)
    S.f = S.g_low + S.h
    S.f[start] = S.h[start]
    for n in vis.tolist():
        S.push(n)
    return S


def plan_ito(instance: ProblemInstance, table: SafeIntervalTable, heuristic: HeuristicTable,
             observer: Optional[Observer] = None, goal_exit: bool = True) -> PlannerResult:
    """Inverted time-optimal planner."""
    t0 = time.perf_counter()
    S = ito_init(instance, table, heuristic)
    done = _trivial(S, t0)
    if done is not None:
        return done
    goal = S.goal_state()
    while S.min_f() < INF:
        n = S.pop()
        S.stats.iterations += 1
        f_ext, glow_ext = float(S.f[n]), float(S.g_low[n])
        b = int(S.bpp[n])
        was_parent = b == S.parent[n]
        S.parents[n].discard(b)
        dep = S.validate(n, b)
        if dep < INF:
            g_new = dep + S.travel(b, n)
            if g_new < S.g[n] - TOL:
                S.g[n] = g_new
                S.depart[n] = dep
                S.parent[n] = b
        if S.new_best_potential_parent_exists(n):
            S.push(n)
            _ito_notify(S, observer, n, f_ext, glow_ext, was_parent)
            continue
        if S.g[n] < INF and S.g[n] + S.h[n] <= S.min_f() + TOL:
            S.closed[n] = True
            if n == goal and goal_exit:
                _ito_notify(S, observer, n, f_ext, glow_ext, was_parent)
                return S.result(goal, t0)
            _broadcast(S, n)
        else:
            S.push(n)
        _ito_notify(S, observer, n, f_ext, glow_ext, was_parent)
    return S.result(goal if goal is not None and S.closed[goal] else None, t0)


def _broadcast(S: ITOSearch, n: int) -> None:
    cand = S.visible_states(n)
    cand = cand[~S.closed[cand]]
    if cand.size == 0:
        return
    for c in cand.tolist():
        S.parents[c].add(n)
    new = np.maximum(S.lo[cand], S.g[n] + S.pair_h(n, cand))
    better = new < S.g_low[cand] - TOL
    for c, v in zip(cand[better].tolist(), new[better].tolist()):
        S.g_low[c] = v
        S.bpp[c] = n
        S.f[c] = v + S.h[c]
        S.push(c)


def _ito_notify(S, observer, n, f_ext, glow_ext, was_parent):
    if observer is None:
        return
    observer(IterationEvent(S.stats.iterations, int(n), f_ext, glow_ext, bool(was_parent),
                            float(S.g[n]), float(S.g_low[n]), bool(S.closed[n]), S.min_f(),
                            S.stats.iterations, S.stats.vt_calls, S))


# ------------------------------------------------------------- public utils

def validate_transition(target: SearchNode, source: SearchNode, instance: ProblemInstance,
                        table: SafeIntervalTable) -> float:
    """Earliest collision-free arrival at ``target`` leaving ``source`` no
    earlier than ``source.g`` and no later than its interval end; inf when no
    such move exists. Does not check line of sight."""
    if not source.g < INF:
        return INF
    segs, bbox, _ = segment_table(instance.obstacles)
    u, v = source.vertex, target.vertex
    dep = kernels.earliest_departure(
        float(u[0]), float(u[1]), float(v[0]), float(v[1]), float(instance.speed),
        float(source.g), float(source.interval.high), float(target.interval.low),
        float(target.interval.high), segs, bbox, float(instance.radius),
        np.empty(16), np.empty((segs.shape[0] + 1, 2)))
    if not dep < INF:
        return INF
    return float(dep) + euclidean(u, v) / instance.speed


def reconstruct_plan(search: _Search, goal_state: int) -> MotionPlan:
    """Follow parent links back from ``goal_state``, inserting a wait wherever
    the stored departure is later than the arrival at the parent."""
    return search.reconstruct(goal_state)


PLANNERS = {
    "sipp": plan_sipp,
    "aasipp": plan_aa_sipp,
    "nto": plan_nto,
    "ito": plan_ito,
}
