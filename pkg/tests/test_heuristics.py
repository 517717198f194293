import math
import random

import numpy as np
import pytest

from oracles import static_distances
from tosipp.heuristics import (build_euclid_h, build_heuristic, build_perfect_h, euclid_h,
                               load_heuristic, pairwise_h, save_heuristic)
from tosipp.world import GridMap

DETOUR = GridMap(8, 8, frozenset((4, y) for y in range(0, 7)))


def test_euclid_examples():
    assert euclid_h((2, 2), (2, 2), 1.0) == 0
    assert euclid_h((0, 0), (3, 4), 1.0) == 5
    assert euclid_h((0, 0), (9, 0), 2.0) == 4.5
    t = build_euclid_h(GridMap(10, 5), (3, 4), 1.0)
    assert t.value((0, 0)) == 5


def test_perfect_equals_euclid_on_open_map():
    gm = GridMap(12, 9)
    for goal in [(0, 0), (5, 4), (11, 8)]:
        p = build_perfect_h(gm, goal, 0.5, 1.5)
        e = build_euclid_h(gm, goal, 1.5)
        assert np.allclose(p.values, e.values, atol=1e-9, rtol=0)
        assert p.value(goal) == 0


def test_perfect_matches_brute_force_on_detour_map():
    verts, D = static_distances(DETOUR, 0.5)
    for goal in [(7, 0), (0, 3)]:
        p = build_perfect_h(DETOUR, goal, 0.5, 1.0)
        gi = verts.index(goal)
        for i, v in enumerate(verts):
            assert p.value(v) == pytest.approx(D[i, gi], abs=1e-9)
        assert p.value((7, 0 if goal != (7, 0) else 1)) > euclid_h((0, 3), goal, 1.0) - 10


def test_perfect_unreachable_is_inf():
    gm = GridMap(5, 3, frozenset((2, y) for y in range(3)))
    p = build_perfect_h(gm, (0, 0), 0.5, 1.0)
    assert math.isinf(p.value((4, 0))) and p.value((1, 2)) == pytest.approx(math.sqrt(5))
    assert pairwise_h((4, 0), (1, 0), p) == math.inf
    assert pairwise_h((4, 0), (3, 2), p) == pytest.approx(math.sqrt(5))


def test_pairwise_examples():
    e = build_euclid_h(GridMap(6, 6), (5, 5), 1.0)
    assert pairwise_h((2, 2), (2, 2), e) == 0
    assert pairwise_h((0, 0), (3, 4), e) == 5


def test_pairwise_perfect_lower_bounds_static_travel():
    verts, D = static_distances(DETOUR, 0.5)
    rng = random.Random(3)
    p = build_perfect_h(DETOUR, (7, 0), 0.5, 1.0)
    for _ in range(1000):
        i, j = rng.randrange(len(verts)), rng.randrange(len(verts))
        assert 0 <= pairwise_h(verts[i], verts[j], p) <= D[i, j] + 1e-9


def test_pairwise_triangle():
    rng = random.Random(8)
    free = DETOUR.free_cells()
    for kind in ("euclid", "perfect"):
        t = build_heuristic(kind, DETOUR, (7, 0), 0.5, 1.3)
        for _ in range(3000):
            a, b, c = (rng.choice(free) for _ in range(3))
            assert pairwise_h(a, c, t) <= pairwise_h(a, b, t) + pairwise_h(b, c, t) + 1e-9


def test_perfect_dominates_euclid_and_is_consistent():
    p = build_perfect_h(DETOUR, (7, 0), 0.5, 1.0)
    e = build_euclid_h(DETOUR, (7, 0), 1.0)
    finite = np.isfinite(p.values)
    assert np.all(p.values[finite] >= e.values[finite] - 1e-12)
    verts, D = static_distances(DETOUR, 0.5)
    for i, u in enumerate(verts):
        for j, w in enumerate(verts):
            if D[i, j] == math.dist(u, w):       # visible pair
                assert p.value(u) <= math.dist(u, w) + p.value(w) + 1e-9


def test_cache_roundtrip_and_digest_check():
    p = build_perfect_h(DETOUR, (7, 0), 0.5, 1.0)
    q = load_heuristic(save_heuristic(p, DETOUR), DETOUR)
    assert q.kind == "perfect" and q.goal == (7, 0)
    assert np.array_equal(q.values, p.values)
    with pytest.raises(ValueError, match="different map"):
        load_heuristic(save_heuristic(p, DETOUR), GridMap(8, 8))


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_heuristic("manhattan", DETOUR, (7, 0), 0.5, 1.0)
