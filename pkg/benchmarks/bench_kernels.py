"""Time the numba kernels against the numpy fallback.

Both backend modules are imported directly, so one process covers both. The
end-to-end row re-runs a planner in a child process with the env flag set.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import random
import subprocess
import sys
import timeit

import numpy as np

from tosipp.geometry import segment_table
from tosipp.harness.scenario import corridor_map, generate_scenario
from tosipp.kernels import _numba, _numpy


def time_ms(f, repeat):
    f()  # warm start, includes jit compile for numba
    return 1000.0 * min(timeit.repeat(f, number=1, repeat=repeat))


E2E = """
import time, random
from tosipp import kernels
from tosipp.harness.scenario import corridor_map, generate_scenario, sample_agent
from tosipp.intervals import build_safe_intervals
from tosipp.heuristics import build_euclid_h
from tosipp.planners import plan_ito
gm = corridor_map(W, H, 0)
obs = generate_scenario(gm, K, seed=1)
inst = sample_agent(gm, obs, random.Random(4))
tab = build_safe_intervals(inst)
h = build_euclid_h(gm, inst.goal, inst.speed)
plan_ito(inst, tab, h)
t = time.perf_counter(); r = plan_ito(inst, tab, h); t = time.perf_counter() - t
print(kernels.BACKEND, 1000 * t, r.cost)
"""


def e2e(flag, size, count):
    env = dict(os.environ)
    env.pop("TOSIPP_DISABLE_NUMBA", None)
    if flag:
        env["TOSIPP_DISABLE_NUMBA"] = "1"
    code = f"W, H, K = {size[0]}, {size[1]}, {count}\n" + E2E
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    return float(out[1]), float(out[2])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, nargs=2, default=(32, 16), metavar=("W", "H"),
                    help="corridor map size (the numpy perfect_dist is slow above 32x16)")
    ap.add_argument("--obstacles", type=int, default=16)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args()

    gm = corridor_map(*args.size, seed=0)
    grid = gm.grid
    obs = generate_scenario(gm, args.obstacles, seed=100)
    segs, bbox, _ = segment_table(obs)
    rng = random.Random(0)
    free = gm.free_cells()
    sx, sy = free[rng.randrange(len(free))]
    targets = np.array([free[rng.randrange(len(free))] for _ in range(400)], dtype=float)
    tlo = np.zeros(len(targets))
    thi = np.full(len(targets), np.inf)

    cases = {
        "visible_from": lambda m: m.visible_from(grid, sx, sy, 0.5),
        "perfect_dist": lambda m: m.perfect_dist(grid, sx, sy, 0.5),
        "earliest_departures x400": lambda m: m.earliest_departures(
            float(sx), float(sy), 1.0, 0.0, np.inf, targets[:, 0], targets[:, 1], tlo, thi,
            segs, bbox, 0.5),
        "los_clear x400": lambda m: [m.los_clear(grid, float(sx), float(sy), x, y, 0.5)
                                     for x, y in targets],
    }
    rows = []
    print(f"{'kernel':<26}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, call in cases.items():
        a = time_ms(lambda: call(_numba), args.repeat)
        b = time_ms(lambda: call(_numpy), max(1, args.repeat // 2))
        rows.append({"kernel": name, "numba_ms": a, "numpy_ms": b})
        print(f"{name:<26}{a:12.3f}{b:12.3f}{b / a:10.1f}")
    (a, ca), (b, cb) = e2e(False, args.size, args.obstacles), e2e(True, args.size, args.obstacles)
    assert abs(ca - cb) < 1e-9, (ca, cb)
    rows.append({"kernel": "plan_ito end-to-end", "numba_ms": a, "numpy_ms": b})
    print(f"{'plan_ito end-to-end':<26}{a:12.3f}{b:12.3f}{b / a:10.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
