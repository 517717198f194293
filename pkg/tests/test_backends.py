import json
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from tosipp.geometry import segment_table
from tosipp.kernels import _numba, _numpy
from oracles import random_obstacle


def _grid(rng, w=11, h=8, p=0.2):
    g = np.array([[rng.random() < p for _ in range(w)] for _ in range(h)])
    return g


def test_visibility_and_perfect_dist_agree():
    rng = random.Random(0)
    for _ in range(15):
        g = _grid(rng)
        free = np.argwhere(~g)
        y, x = free[rng.randrange(len(free))]
        r = rng.choice([0.2, 0.45, 0.5])
        assert np.array_equal(_numba.visible_from(g, x, y, r), _numpy.visible_from(g, x, y, r))
        a, b = _numba.perfect_dist(g, x, y, r), _numpy.perfect_dist(g, x, y, r)
        assert np.array_equal(np.isinf(a), np.isinf(b))
        assert np.allclose(a[np.isfinite(a)], b[np.isfinite(b)], atol=1e-12)


def test_earliest_departures_agree():
    rng = random.Random(1)
    for _ in range(40):
        obs = [random_obstacle(rng) for _ in range(rng.randint(0, 5))]
        segs, bbox, _ = segment_table(obs)
        ux, uy = float(rng.randint(0, 6)), float(rng.randint(0, 6))
        tx = np.array([float(rng.randint(0, 6)) for _ in range(20)])
        ty = np.array([float(rng.randint(0, 6)) for _ in range(20)])
        tlo = np.array([rng.choice([0.0, rng.uniform(0, 8)]) for _ in range(20)])
        thi = tlo + np.array([rng.choice([np.inf, rng.uniform(0.1, 5)]) for _ in range(20)])
        g = rng.uniform(0, 3)
        args = (ux, uy, 1.0, g, g + rng.choice([np.inf, 2.0]), tx, ty, tlo, thi, segs, bbox, 0.4)
        a = _numba.earliest_departures(*args)
        b = _numpy.earliest_departures(*args)
        assert np.array_equal(np.isinf(a), np.isinf(b))
        assert np.allclose(a[np.isfinite(a)], b[np.isfinite(b)], atol=1e-9)


def test_los_scalar_agree():
    rng = random.Random(2)
    for _ in range(10):
        g = _grid(rng)
        for _ in range(50):
            x0, y0, x1, y1 = (float(rng.randrange(n)) for n in (11, 8, 11, 8))
            r = rng.uniform(0.05, 0.5)
            assert _numba.los_clear(g, x0, y0, x1, y1, r) == _numpy.los_clear(g, x0, y0, x1, y1, r)


SCRIPT = """
import json
from tosipp import kernels
from tosipp.harness.scenario import random_instance
from tosipp.intervals import build_safe_intervals
from tosipp.heuristics import build_heuristic
from tosipp.planners import plan_ito, plan_nto
out = {"backend": kernels.BACKEND, "costs": []}
for seed in range(6):
    inst = random_instance(seed, size=(8, 10), obstacles=(2, 5))
    tab = build_safe_intervals(inst)
    h = build_heuristic("perfect", inst.map, inst.goal, inst.radius, inst.speed)
    out["costs"].append([plan_nto(inst, tab, h).cost, plan_ito(inst, tab, h).cost])
print(json.dumps(out))
"""


def _run(flag):
    env = dict(os.environ)
    env.pop("TOSIPP_DISABLE_NUMBA", None)
    if flag:
        env["TOSIPP_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def test_env_flag_switches_backend_end_to_end():
    fast, slow = _run(False), _run(True)
    assert fast["backend"] == "numba" and slow["backend"] == "numpy"
    assert np.allclose(fast["costs"], slow["costs"], atol=1e-9, rtol=0)


def test_benchmark_script_runs(tmp_path):
    out = tmp_path / "bench.json"
    subprocess.run([sys.executable, "benchmarks/bench_kernels.py", "--repeat", "1", "--size", "12",
                    "8", "--obstacles", "3", "--json", str(out)], check=True, capture_output=True,
                   cwd=os.path.join(os.path.dirname(__file__), ".."))
    rows = json.loads(out.read_text())
    assert [r["kernel"] for r in rows][-1] == "plan_ito end-to-end"
    assert all(r["numba_ms"] > 0 and r["numpy_ms"] > 0 for r in rows)
