import json
import math
import random

import pytest

from oracles import random_obstacle, vertex_collides
from tosipp.intervals import build_safe_intervals, complement, dump_table, state_at
from tosipp.geometry import TimeInterval
from tosipp.world import GridMap, MotionPlan, ProblemInstance, plan_from_path


def test_no_obstacles_single_interval():
    t = build_safe_intervals(ProblemInstance(GridMap(4, 3, frozenset({(1, 1)})), (0, 0), (3, 2)))
    assert t.n_states == 11
    for v in t.map.free_cells():
        assert t.intervals(v) == [TimeInterval(0.0, math.inf)]
    assert t.intervals((1, 1)) == []


def test_detour_vertex(detour):
    a, b = build_safe_intervals(detour).intervals((8, 1))
    assert a.low == 0.0 and a.high == pytest.approx(0.2, abs=1e-9)
    assert b.low == pytest.approx(1.8, abs=1e-9) and math.isinf(b.high)


def test_parked_arrival():
    obs = plan_from_path([(5, 0), (0, 0)], radius=0.5)
    inst = ProblemInstance(GridMap(6, 1), (0, 0), (5, 0), 0.5, 1.0, (obs,))
    (iv,) = build_safe_intervals(inst).intervals((0, 0))
    assert iv.low == 0.0 and iv.high == pytest.approx(4.0, abs=1e-9)


def test_permanently_covered_vertex():
    inst = ProblemInstance(GridMap(3, 1), (0, 0), (2, 0), 0.5, 1.0, (MotionPlan((1, 0), ()),))
    assert build_safe_intervals(inst).intervals((1, 0)) == []


def test_complement_drops_slivers():
    out = complement([TimeInterval(0.0, 1.0), TimeInterval(1.0 + 1e-10, 2.0)])
    assert out == [TimeInterval(2.0, math.inf)]


def test_state_at(detour):
    t = build_safe_intervals(detour)
    assert state_at(t, (8, 1), 1.0) is None
    s = state_at(t, (8, 1), 0.2)
    assert t.interval_of(s).low == 0.0
    assert state_at(t, (8, 1), 7.3) == s + 1
    free = build_safe_intervals(ProblemInstance(GridMap(2, 1), (0, 0), (1, 0)))
    assert state_at(free, (1, 0), 7.3) == 1


def _random_instance(rng):
    gm = GridMap(7, 7)
    obs = tuple(random_obstacle(rng) for _ in range(rng.randint(1, 4)))
    obs = tuple(o for o in obs if all(0 <= c < 7 for a in o.actions for c in a.source + a.target)
                and all(0 <= c < 7 for c in o.start))
    return ProblemInstance(gm, (0, 0), (6, 6), rng.uniform(0.1, 0.5), 1.0, obs)


def test_state_at_matches_linear_scan():
    rng = random.Random(5)
    for _ in range(20):
        inst = _random_instance(rng)
        t = build_safe_intervals(inst)
        for _ in range(100):
            v = (rng.randrange(7), rng.randrange(7))
            x = rng.uniform(0, 15)
            scan = [s for s in t.states_of(v) if t.lo[s] - 1e-9 <= x <= t.hi[s] + 1e-9]
            assert state_at(t, v, x) == (scan[0] if scan else None)


def test_complement_property_and_count_bound():
    rng = random.Random(9)
    checked = 0
    for _ in range(40):
        inst = _random_instance(rng)
        t = build_safe_intervals(inst)
        n_segs = sum(len(o.actions) + 2 for o in inst.obstacles)
        for v in inst.map.free_cells():
            ivs = t.intervals(v)
            assert len(ivs) <= 1 + n_segs
            assert all(a.high < b.low for a, b in zip(ivs, ivs[1:]))
        for _ in range(250):
            v = (rng.randrange(7), rng.randrange(7))
            x = rng.uniform(0, 15)
            ivs = t.intervals(v)
            if any(abs(x - e) < 1e-6 for iv in ivs for e in iv):
                continue
            safe = any(iv.low <= x <= iv.high for iv in ivs)
            hit = any(bool(vertex_collides(v, o, inst.radius, x)) for o in inst.obstacles)
            assert safe != hit
            checked += 1
    assert checked > 9000


def test_dump_table(detour):
    doc = json.loads(dump_table(build_safe_intervals(detour)))
    assert doc["8,1"][0][0] == 0.0 and doc["8,1"][1][1] is None
    assert doc["0,0"] == [[0.0, None]]
