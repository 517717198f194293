import math
import random

import numpy as np
import pytest

from conftest import DETOUR_OPTIMUM, TRAP_AASIPP, TRAP_OPTIMUM, prepare
from tosipp.geometry import TimeInterval
from tosipp.harness.scenario import random_instance
from tosipp.harness.validate import validate_plan
from tosipp.intervals import build_safe_intervals
from tosipp.planners import (PLANNERS, SearchNode, ito_init, plan_aa_sipp, plan_ito, plan_nto,
                             plan_sipp, reconstruct_plan, validate_transition)
from tosipp.world import GridMap, MotionPlan, ProblemInstance, plan_from_path


def _node(v, iv, g=math.inf):
    return SearchNode(0, v, TimeInterval(*iv), g, g, g, None, None, frozenset(), "neither")


def crossing_instance():
    # only the plus-shaped corridor is free: no room for a spatial detour
    blocked = frozenset((x, y) for x in range(5) for y in range(5) if x != 2 and y != 2)
    obs = plan_from_path([(0, 2), (4, 2)], radius=0.5)
    return ProblemInstance(GridMap(5, 5, blocked), (2, 0), (2, 4), 0.5, 1.0, (obs,))


def test_validate_transition_free():
    inst = ProblemInstance(GridMap(5, 5), (0, 0), (3, 4))
    t = validate_transition(_node((3, 4), (0, math.inf)), _node((0, 0), (0, math.inf), 0.0),
                            inst, build_safe_intervals(inst))
    assert t == 5.0


def test_validate_transition_into_closed_gap(detour):
    tab = build_safe_intervals(detour)
    n1 = _node((8, 1), (0.0, tab.intervals((8, 1))[0].high))
    assert validate_transition(n1, _node((0, 1), (0, math.inf), 0.0), detour, tab) == math.inf


def test_validate_transition_crossing():
    inst = crossing_instance()
    tab = build_safe_intervals(inst)
    t = validate_transition(_node((2, 4), (0, math.inf)), _node((2, 0), (0, math.inf), 0.0),
                            inst, tab)
    assert t == pytest.approx(math.sqrt(2) + 4, abs=1e-9)


def test_validate_transition_unreached_source():
    inst = ProblemInstance(GridMap(5, 5), (0, 0), (3, 4))
    t = validate_transition(_node((3, 4), (0, math.inf)), _node((0, 0), (0, math.inf)),
                            inst, build_safe_intervals(inst))
    assert t == math.inf


@pytest.mark.parametrize("algo", sorted(PLANNERS))
def test_empty_map_straight_line(algo):
    inst, tab, h = prepare(ProblemInstance(GridMap(9, 6), (0, 0), (8, 5), 0.5, 2.0))
    res = PLANNERS[algo](inst, tab, h)
    assert res.solved and validate_plan(res.plan, inst).ok
    if algo == "sipp":
        assert res.cost == pytest.approx((5 * math.sqrt(2) + 3) / 2)
    else:
        assert res.cost == pytest.approx(math.hypot(8, 5) / 2, abs=1e-9)
        assert len(res.plan.actions) == 1


@pytest.mark.parametrize("algo", sorted(PLANNERS))
def test_start_equals_goal(algo):
    inst, tab, h = prepare(ProblemInstance(GridMap(3, 3), (1, 1), (1, 1)))
    res = PLANNERS[algo](inst, tab, h)
    assert res.solved and res.cost == 0 and res.plan.actions == ()


@pytest.mark.parametrize("algo", sorted(PLANNERS))
def test_walled_goal(algo):
    gm = GridMap(5, 3, frozenset((2, y) for y in range(3)))
    inst, tab, h = prepare(ProblemInstance(gm, (0, 1), (4, 1)))
    res = PLANNERS[algo](inst, tab, h)
    assert res.outcome == "no_path" and res.plan is None and res.cost == math.inf


@pytest.mark.parametrize("algo", sorted(PLANNERS))
def test_goal_parked_on(algo):
    inst, tab, h = prepare(ProblemInstance(GridMap(5, 1), (0, 0), (4, 0), 0.5, 1.0,
                                           (MotionPlan((4, 0), ()),)))
    assert PLANNERS[algo](inst, tab, h).outcome == "no_path"


@pytest.mark.parametrize("kind", ["euclid", "perfect"])
def test_detour_costs(detour, kind):
    inst, tab, h = prepare(detour, kind)
    nto, ito, aa = plan_nto(inst, tab, h), plan_ito(inst, tab, h), plan_aa_sipp(inst, tab, h)
    assert nto.cost == pytest.approx(DETOUR_OPTIMUM, abs=1e-9)
    assert ito.cost == pytest.approx(DETOUR_OPTIMUM, abs=1e-9)
    assert aa.cost > DETOUR_OPTIMUM + 1e-6
    for r in (nto, ito, aa):
        assert validate_plan(r.plan, inst).ok


@pytest.mark.parametrize("kind", ["euclid", "perfect"])
def test_aa_sipp_trap(trap, kind):
    inst, tab, h = prepare(trap, kind)
    aa, opt = plan_aa_sipp(inst, tab, h), plan_nto(inst, tab, h)
    assert opt.cost == pytest.approx(TRAP_OPTIMUM, abs=1e-9)
    assert aa.cost == pytest.approx(TRAP_AASIPP, abs=1e-9)
    assert aa.cost / opt.cost > 1.5
    assert plan_ito(inst, tab, h).cost == pytest.approx(TRAP_OPTIMUM, abs=1e-9)


def test_sipp_is_edge_only(trap):
    res = plan_sipp(*prepare(trap))
    for a in res.plan.actions:
        if a.kind == "move":
            assert max(abs(a.target[0] - a.source[0]), abs(a.target[1] - a.source[1])) == 1


def test_ito_init(detour):
    inst, tab, h = prepare(detour)
    S = ito_init(inst, tab, h)
    start = S.start_state()
    node = S.node(start)
    assert node.g == 0 and node.membership == "closed"
    late = tab.states_of((8, 1))[1]
    assert S.node(late).g_low == 8.0 and S.node(late).bpp == start
    assert S.node(late).parents == {start}
    assert S.node(late).membership == "open" and S.node(late).g == math.inf
    gm = GridMap(5, 3, frozenset({(2, 0), (2, 1)}))
    inst2, tab2, h2 = prepare(ProblemInstance(gm, (0, 0), (4, 0)))
    S2 = ito_init(inst2, tab2, h2)
    hidden = tab2.states_of((4, 0))[0]
    assert S2.f[hidden] == math.inf and S2.bpp[hidden] < 0


def _populated(seed):
    inst, tab, h = prepare(ProblemInstance(GridMap(6, 6), (0, 0), (5, 5)))
    S = ito_init(inst, tab, h)
    rng = random.Random(seed)
    S.g[:] = [rng.uniform(0, 10) for _ in range(S.N)]
    return S, rng


def test_nbpp_empty_parents():
    S, _ = _populated(0)
    n = 7
    S.parents[n] = set()
    S.parent[n] = 3
    assert not S.new_best_potential_parent_exists(n)
    assert S.g_low[n] == S.g[n] and S.bpp[n] == 3


def test_nbpp_tie_is_not_adoption():
    S, _ = _populated(1)
    n, p = 14, 2
    S.parent[n] = 9
    S.g[n] = S.g[p] + float(S.pair_h(n, np.array([p]))[0])
    S.parents[n] = {p}
    assert not S.new_best_potential_parent_exists(n)
    assert S.bpp[n] == 9


def test_nbpp_picks_linear_scan_minimum():
    for seed in range(50):
        S, rng = _populated(seed)
        n = rng.randrange(S.N)
        S.parent[n] = rng.randrange(S.N)
        S.parents[n] = {rng.randrange(S.N) for _ in range(rng.randint(1, 12))} - {n}
        cands = [(S.g[n], int(S.parent[n]))]
        for p in S.parents[n]:
            cands.append((max(S.lo[n], S.g[p] + float(S.pair_h(n, np.array([p]))[0])), p))
        best = min(c for c, _ in cands)
        S.new_best_potential_parent_exists(n)
        assert S.g_low[n] == pytest.approx(best, abs=1e-9)
        assert any(c == pytest.approx(best, abs=1e-9) and p == S.bpp[n] for c, p in cands)
        assert S.f[n] == pytest.approx(S.g_low[n] + S.h[n])


def test_random_small_instances_agree():
    seen = 0
    for seed in range(200):
        inst = random_instance(seed, size=(8, 8), obstacles=(0, 4))
        if inst is None:
            continue
        inst, tab, h = prepare(inst, "euclid" if seed % 2 else "perfect")
        nto, ito, aa = plan_nto(inst, tab, h), plan_ito(inst, tab, h), plan_aa_sipp(inst, tab, h)
        assert nto.outcome == ito.outcome
        if nto.solved:
            seen += 1
            assert ito.cost == pytest.approx(nto.cost, abs=1e-9)
            assert aa.cost >= nto.cost - 1e-9
            assert ito.stats.iterations == ito.stats.vt_calls
            for r in (nto, ito, aa):
                assert r.plan.end_time == pytest.approx(r.cost, abs=1e-9)
    assert seen >= 150


def test_parent_never_in_parents():
    for seed in range(30):
        inst = random_instance(seed)
        res = plan_ito(*prepare(inst), goal_exit=False)
        S = res.search
        for s in range(S.N):
            assert int(S.parent[s]) not in S.parents[s]


def test_reconstruct_single_move():
    inst, tab, h = prepare(ProblemInstance(GridMap(5, 5), (0, 0), (3, 4)))
    res = plan_nto(inst, tab, h)
    plan = reconstruct_plan(res.search, res.search.goal_state())
    assert [a.kind for a in plan.actions] == ["move"] and plan.cost == 5


@pytest.mark.parametrize("planner", [plan_nto, plan_ito])
def test_reconstruct_with_departure_delay(planner):
    inst, tab, h = prepare(crossing_instance())
    plan = planner(inst, tab, h).plan
    wait, move = plan.actions
    assert wait.kind == "wait" and wait.start == 0
    assert wait.duration == pytest.approx(math.sqrt(2), abs=1e-9)
    assert move.target == (2, 4) and plan.end_time == pytest.approx(math.sqrt(2) + 4, abs=1e-9)
    assert validate_plan(plan, inst).ok


def test_observer_sees_every_iteration(detour):
    events = []
    res = plan_ito(*prepare(detour), observer=events.append)
    assert [e.iteration for e in events] == list(range(1, res.stats.iterations + 1))
    assert events[-1].closed and events[-1].state == res.search.goal_state()
    nto_events = []
    res = plan_nto(*prepare(detour), observer=nto_events.append)
    assert len(nto_events) == res.stats.iterations


def test_counters_monotone(detour):
    last = [0, 0]

    def obs(e):
        assert e.iterations >= last[0] and e.vt_calls >= last[1]
        last[:] = [e.iterations, e.vt_calls]
    plan_nto(*prepare(detour), observer=obs)
    last[:] = [0, 0]
    plan_ito(*prepare(detour), observer=obs)
