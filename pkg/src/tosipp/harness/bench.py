"""Batch runs: one CSV row per (instance, algorithm, heuristic)."""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, TextIO

from ..heuristics import HeuristicTable, build_heuristic
from ..intervals import SafeIntervalTable, build_safe_intervals
from ..planners import PLANNERS, PlannerResult
from ..world import ProblemInstance, parse_map, parse_scenario
from .validate import validate_plan

CSV_COLUMNS = ["map", "scenario", "obstacles", "algo", "heuristic", "outcome", "cost",
               "iterations", "vt_calls", "runtime_ms"]
DEFAULT_COUNTS = (32, 64, 96, 128)
OPTIMAL = ("nto", "ito")


class InternalConsistencyError(RuntimeError):
    """A planner produced a plan the validator rejects."""

    def __init__(self, message: str, violation=None):
        super().__init__(message)
        self.violation = violation


@dataclass
class BenchmarkRecord:
    map: str
    scenario: str
    obstacles: int
    algo: str
    heuristic: str
    outcome: str
    cost: float
    iterations: int
    vt_calls: int
    runtime_ms: float

    def row(self) -> list:
        cost = "" if math.isinf(self.cost) or math.isnan(self.cost) else repr(self.cost)
        return [self.map, self.scenario, self.obstacles, self.algo, self.heuristic, self.outcome,
                cost, self.iterations, self.vt_calls, f"{self.runtime_ms:.3f}"]


def run_instance(instance: ProblemInstance, algo: str, heuristic_kind: str,
                 map_id: str = "", scenario_id: str = "",
                 table: Optional[SafeIntervalTable] = None,
                 heuristic: Optional[HeuristicTable] = None) -> tuple[PlannerResult, BenchmarkRecord]:
    if algo not in PLANNERS:
        raise ValueError(f"unknown algorithm {algo!r}")
    table = table or build_safe_intervals(instance)
    heuristic = heuristic or build_heuristic(heuristic_kind, instance.map, instance.goal,
                                             instance.radius, instance.speed)
    res = PLANNERS[algo](instance, table, heuristic)
    if res.solved:
        rep = validate_plan(res.plan, instance)
        if not rep.ok:
            raise InternalConsistencyError(f"{algo} returned an invalid plan: {rep.violation}",
                                           rep.violation)
    rec = BenchmarkRecord(map_id, scenario_id, len(instance.obstacles), algo, heuristic_kind,
                          res.outcome, res.cost, res.stats.iterations, res.stats.vt_calls,
                          res.stats.runtime * 1e3)
    return res, rec


# ----------------------------------------------------------------- config

@dataclass(frozen=True)
class _Job:
    map_path: str
    scenario_path: str
    map_id: str
    scenario_id: str
    count: int
    algos: tuple
    heuristics: tuple
    radius: Optional[float]
    speed: Optional[float]


def _jobs(config: dict, base: Path) -> list[_Job]:
    algos = tuple(config.get("algorithms", ("aasipp", "nto", "ito")))
    heuristics = tuple(config.get("heuristics", ("euclid",)))
    for a in algos:
        if a not in PLANNERS:
            raise ValueError(f"unknown algorithm {a!r}")
    for h in heuristics:
        if h not in ("euclid", "perfect"):
            raise ValueError(f"unknown heuristic {h!r}")
    counts = config.get("obstacles")
    out = []
    for entry in config.get("instances", []):
        mp = base / entry["map"]
        scen = [entry["scenario"]] if "scenario" in entry else entry.get("scenarios", [])
        for sc in scen:
            sp = base / sc
            for k in entry.get("obstacles", counts if counts is not None else [None]):
                out.append(_Job(str(mp), str(sp), entry.get("id", Path(entry["map"]).stem),
                                Path(sc).stem, -1 if k is None else int(k), algos, heuristics,
                                config.get("radius"), config.get("speed")))
    return out


def _run_job(job: _Job) -> list[BenchmarkRecord]:
    gm = parse_map(Path(job.map_path).read_bytes())
    scen = parse_scenario(Path(job.scenario_path).read_bytes(), gm)
    k = None if job.count < 0 else job.count
    inst = scen.instance(gm, job.radius, job.speed, k)
    table = build_safe_intervals(inst)
    recs = []
    for hk in job.heuristics:
        h = build_heuristic(hk, gm, inst.goal, inst.radius, inst.speed)
        for algo in job.algos:
            try:
                _, rec = run_instance(inst, algo, hk, job.map_id, job.scenario_id, table, h)
            except InternalConsistencyError:
                raise
            except Exception as exc:  # recorded, never fatal for the batch
                rec = BenchmarkRecord(job.map_id, job.scenario_id, len(inst.obstacles), algo, hk,
                                      f"error: {type(exc).__name__}", math.nan, 0, 0, 0.0)
            recs.append(rec)
    return recs


def _safe_job(job: _Job) -> list[BenchmarkRecord]:
    try:
        return _run_job(job)
    except InternalConsistencyError:
        raise
    except Exception as exc:
        return [BenchmarkRecord(job.map_id, job.scenario_id, max(job.count, 0), a, h,
                                f"error: {type(exc).__name__}", math.nan, 0, 0, 0.0)
                for h in job.heuristics for a in job.algos]


def summarize(records: list[BenchmarkRecord]) -> dict:
    """Medians per (algo, heuristic) and AA-SIPP / optimal cost ratios over
    instances both solved."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.algo, r.heuristic), []).append(r)
    per = {}
    for (a, h), rs in sorted(groups.items()):
        ok = [r for r in rs if r.outcome == "solved"]
        per[f"{a}/{h}"] = {
            "runs": len(rs), "solved": len(ok),
            "median_runtime_ms": statistics.median([r.runtime_ms for r in ok]) if ok else None,
            "median_iterations": statistics.median([r.iterations for r in ok]) if ok else None,
            "median_vt_calls": statistics.median([r.vt_calls for r in ok]) if ok else None,
        }
    best = {}
    for r in records:
        if r.algo in OPTIMAL and r.outcome == "solved":
            best[(r.map, r.scenario, r.obstacles, r.heuristic)] = r.cost
    ratios = [r.cost / best[key] for r in records
              if r.algo == "aasipp" and r.outcome == "solved"
              for key in [(r.map, r.scenario, r.obstacles, r.heuristic)]
              if key in best and best[key] > 0]
    return {"per_algorithm": per,
            "cost_ratio": {"count": len(ratios),
                           "mean": statistics.fmean(ratios) if ratios else None,
                           "max": max(ratios) if ratios else None,
                           "min": min(ratios) if ratios else None}}


def write_csv(records, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())


def run_benchmark(config: dict, out: Optional[TextIO] = None, jobs: int = 1,
                  base_dir: Optional[Path] = None) -> tuple[list[BenchmarkRecord], dict]:
    """Run every configured instance; rows come out in config order whatever
    the completion order."""
    work = _jobs(config, Path(base_dir or "."))
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_safe_job, work))
    else:
        chunks = [_safe_job(j) for j in work]
    records = [r for c in chunks for r in c]
    if out is not None:
        write_csv(records, out)
    return records, summarize(records)


def load_config(path) -> dict:
    return json.loads(Path(path).read_text())
