"""Dynamic-obstacle scenarios built by prioritized planning."""
from __future__ import annotations

import math
import random
from typing import Optional

import numpy as np

from ..heuristics import build_euclid_h
from ..intervals import build_safe_intervals, state_at
from ..planners import plan_aa_sipp
from ..world import GridMap, MotionPlan, ProblemInstance, Scenario, Vertex

MIN_SEPARATION = 2.0
RETRY_FACTOR = 10


class GenerationError(RuntimeError):
    pass


def _pair(rng: random.Random, free: list) -> tuple[Vertex, Vertex]:
    while True:
        s = free[rng.randrange(len(free))]
        g = free[rng.randrange(len(free))]
        if math.hypot(g[0] - s[0], g[1] - s[1]) >= MIN_SEPARATION:
            return s, g


def _endpoints_ok(instance: ProblemInstance, table) -> bool:
    if state_at(table, instance.start, 0.0) is None:
        return False
    last = table.intervals(instance.goal)
    return bool(last) and math.isinf(last[-1].high)


def generate_scenario(grid_map: GridMap, count: int, seed: int, radius: float = 0.5,
                      speed: float = 1.0, rng: Optional[random.Random] = None) -> list[MotionPlan]:
    """Plan ``count`` obstacles one after another, each avoiding all earlier
    ones. Raises GenerationError if the retry budget runs out."""
    rng = rng or random.Random(seed)
    free = grid_map.free_cells()
    if count and len(free) < 2:
        raise GenerationError("map needs at least two free cells")
    plans: list[MotionPlan] = []
    budget = RETRY_FACTOR * count
    while len(plans) < count:
        if budget <= 0:
            raise GenerationError(f"placed {len(plans)} of {count} obstacles before the retry "
                                  f"budget ran out")
        budget -= 1
        s, g = _pair(rng, free)
        inst = ProblemInstance(grid_map, s, g, radius, speed, tuple(plans))
        table = build_safe_intervals(inst)
        if not _endpoints_ok(inst, table):
            continue
        res = plan_aa_sipp(inst, table, build_euclid_h(grid_map, g, speed, radius))
        if res.solved:
            plans.append(res.plan)
    return plans


def sample_agent(grid_map: GridMap, obstacles, rng: random.Random, radius: float = 0.5,
                 speed: float = 1.0, attempts: int = 200) -> Optional[ProblemInstance]:
    """Random start/goal whose start is safe at t=0 and whose goal can be
    occupied forever; None if none is found."""
    free = grid_map.free_cells()
    if len(free) < 2:
        return None
    for _ in range(attempts):
        s, g = _pair(rng, free)
        inst = ProblemInstance(grid_map, s, g, radius, speed, tuple(obstacles))
        if _endpoints_ok(inst, build_safe_intervals(inst)):
            return inst
    return None


def generate_scenario_file(grid_map: GridMap, count: int, seed: int, radius: float = 0.5,
                           speed: float = 1.0) -> Scenario:
    rng = random.Random(seed)
    obstacles = generate_scenario(grid_map, count, seed, radius, speed, rng=rng)
    inst = sample_agent(grid_map, obstacles, rng, radius, speed)
    if inst is None:
        raise GenerationError("no valid agent start/goal pair")
    return Scenario(inst.start, inst.goal, radius, speed, tuple(obstacles))


def random_map(width: int, height: int, density: float, rng: random.Random) -> GridMap:
    cells = [(x, y) for y in range(height) for x in range(width)]
    k = int(round(density * len(cells)))
    return GridMap(width, height, frozenset(rng.sample(cells, k)))


def random_instance(seed: int, size=(8, 16), density=(0.10, 0.20), obstacles=(0, 8),
                    radius: float = 0.5, speed: float = 1.0) -> Optional[ProblemInstance]:
    """Seeded random map plus generated obstacles plus agent query.
    Returns None when the draw cannot host the requested scenario."""
    rng = random.Random(seed)
    w = rng.randint(*size)
    h = rng.randint(*size)
    gm = random_map(w, h, rng.uniform(*density), rng)
    k = rng.randint(*obstacles)
    try:
        obs = generate_scenario(gm, k, seed, radius, speed, rng=rng)
    except GenerationError:
        return None
    return sample_agent(gm, obs, rng, radius, speed)


def corridor_map(width: int = 64, height: int = 32, seed: int = 0) -> GridMap:
    """Rooms joined by doorways: vertical walls every 8 columns with two gaps
    each, plus scattered pillars."""
    rng = random.Random(seed)
    blocked = set()
    for x in range(8, width - 1, 8):
        gaps = set(rng.sample(range(1, height - 1), 2))
        for y in range(height):
            if all(abs(y - gy) > 1 for gy in gaps):
                blocked.add((x, y))
    for _ in range(width * height // 40):
        x, y = rng.randrange(width), rng.randrange(height)
        if x % 8:
            blocked.add((x, y))
    return GridMap(width, height, frozenset(blocked))
