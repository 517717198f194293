"""Command-line entry point: plan, bench, gen, validate."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness.bench import InternalConsistencyError, load_config, run_benchmark, run_instance
from .harness.scenario import GenerationError, generate_scenario_file
from .harness.svg import render_svg
from .harness.validate import validate_plan
from .planners import PLANNERS
from .world import (ParseError, PlanValidationError, parse_map, parse_plan, parse_scenario,
                    serialize_plan, serialize_scenario)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(args):
    gm = parse_map(Path(args.map).read_bytes())
    scen = parse_scenario(Path(args.scenario).read_bytes(), gm)
    return gm, scen


def cmd_plan(args) -> int:
    gm, scen = _load(args)
    inst = scen.instance(gm, args.radius, args.speed)
    res, rec = run_instance(inst, args.algo, args.heuristic, Path(args.map).stem,
                            Path(args.scenario).stem)
    print(f"{res.outcome} cost={rec.cost:.9g} iterations={rec.iterations} "
          f"vt_calls={rec.vt_calls} runtime_ms={rec.runtime_ms:.3f}")
    if res.solved and args.out:
        Path(args.out).write_bytes(serialize_plan(res.plan, res.cost))
    if args.svg:
        Path(args.svg).write_bytes(render_svg(inst, [(args.algo, res.plan)] if res.solved else []))
    return EXIT_OK if res.solved else EXIT_FAIL


def cmd_bench(args) -> int:
    config = load_config(args.config)
    with open(args.csv, "w", newline="") as fh:
        _, summary = run_benchmark(config, fh, jobs=args.jobs, base_dir=Path(args.config).parent)
    print(json.dumps(summary, indent=1))
    return EXIT_OK


def cmd_gen(args) -> int:
    gm = parse_map(Path(args.map).read_bytes())
    try:
        scen = generate_scenario_file(gm, args.count, args.seed, args.radius, args.speed)
    except GenerationError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    Path(args.out).write_bytes(serialize_scenario(scen))
    return EXIT_OK


def cmd_validate(args) -> int:
    gm, scen = _load(args)
    plan = parse_plan(Path(args.plan).read_bytes(), gm)
    inst = scen.instance(gm, plan.radius, plan.speed)
    rep = validate_plan(plan, inst)
    print("ok" if rep.ok else f"violation: {rep.violation}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tosipp", description="Time-optimal any-angle safe-interval planning.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("plan", help="solve one query")
    q.add_argument("--map", required=True)
    q.add_argument("--scenario", required=True)
    q.add_argument("--algo", choices=sorted(PLANNERS), default="ito")
    q.add_argument("--heuristic", choices=["euclid", "perfect"], default="euclid")
    q.add_argument("--radius", type=float)
    q.add_argument("--speed", type=float)
    q.add_argument("--out")
    q.add_argument("--svg")
    q.set_defaults(func=cmd_plan)

    b = sub.add_parser("bench", help="run a benchmark config")
    b.add_argument("--config", required=True)
    b.add_argument("--csv", required=True)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="generate obstacles by prioritized planning")
    g.add_argument("--map", required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--radius", type=float, default=0.5)
    g.add_argument("--speed", type=float, default=1.0)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="check a plan against a scenario")
    v.add_argument("--map", required=True)
    v.add_argument("--scenario", required=True)
    v.add_argument("--plan", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ParseError, PlanValidationError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
