import math

import pytest

from tosipp.heuristics import build_heuristic
from tosipp.intervals import build_safe_intervals
from tosipp.world import GridMap, MotionPlan, ProblemInstance, plan_from_path

DETOUR_OPTIMUM = math.sqrt(26) + 4          # exhaustive bounded-depth search
TRAP_OPTIMUM = math.sqrt(5)
TRAP_AASIPP = math.sqrt(2) + math.sqrt(5)


def detour_instance() -> ProblemInstance:
    """10x4 grid; an obstacle runs J2 -> C2 -> A3 while the agent heads from
    A2 to J1. Radii 0.4, unit speeds."""
    obs = plan_from_path([(9, 1), (2, 1), (0, 2)], radius=0.4)
    return ProblemInstance(GridMap(10, 4), (0, 1), (9, 0), 0.4, 1.0, (obs,))


def trap_instance() -> ProblemInstance:
    """Two small parked disks leave a gap only a knight move fits through;
    edge-based expansion has to go around."""
    obs = (MotionPlan((1, 0), (), 0.2), MotionPlan((1, 1), (), 0.2))
    return ProblemInstance(GridMap(3, 3), (0, 1), (2, 0), 0.2, 1.0, obs)


def prepare(inst: ProblemInstance, kind: str = "euclid"):
    return inst, build_safe_intervals(inst), build_heuristic(kind, inst.map, inst.goal,
                                                             inst.radius, inst.speed)


@pytest.fixture
def detour():
    return detour_instance()


@pytest.fixture
def trap():
    return trap_instance()


ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
