"""Command-line front end: plan, evaluate, compare, terrain-gen.

Every command is deterministic given its full flag set; seeds default to 42
so casual runs reproduce. The NMOPSO_THREADS environment variable caps
evaluation parallelism (0 = auto) without affecting results.

Exit codes: 0 success; 2 empty front; 3 infeasible path; 64 usage error;
65 bad input data; 66 unwritable output.
"""

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .engine import SwarmConfig, run, run_weighted_pso
from .metrics import export_front, export_paths, export_stats, front_stats
from .navigation import validate_kinematics
from .objectives import evaluate_all, parse_path_text
from .scenario import ScenarioError, parse_scenario
from .terrain import TerrainError, generate_terrain

EXIT_OK = 0
EXIT_EMPTY_FRONT = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_CANTCREAT = 66

_ALGORITHMS = ("nmopso", "nmopso-nomut", "nmopso-cartesian", "wpso")


class _DataError(Exception):
    """Input data problem; maps to exit code 65."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclasses.dataclass
class RunManifest:
    """Everything needed to reproduce one planning run bit for bit."""

    command: str
    argv: list[str]
    package_version: str
    scenario_path: str
    scenario_sha256: str
    config: dict
    seed: int
    threads: int
    started_utc: str
    finished_utc: str
    iterations_run: int
    wall_time_s: float
    front_size: int
    outputs: dict

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


def _threads_from_env():
    raw = os.environ.get("NMOPSO_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        return 0
    return max(value, 0)


def _load_scenario(path_str):
    path = Path(path_str)
    try:
        text = path.read_text()
    except OSError as exc:
        raise _DataError(f"cannot read scenario {path}: {exc}") from exc
    try:
        return parse_scenario(text, base_dir=path.parent), text
    except ScenarioError as exc:
        raise _DataError(f"scenario {path}: {exc}") from exc


def _write_text(path_str, text):
    try:
        Path(path_str).write_text(text)
    except OSError as exc:
        print(f"cannot write {path_str}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_CANTCREAT) from exc


def _add_swarm_flags(sub):
    sub.add_argument("--pop", type=int, default=50, help="swarm population size")
    sub.add_argument("--iters", type=int, default=200, help="number of iterations")
    sub.add_argument("--seed", type=int, default=42, help="master random seed")
    sub.add_argument("--archive-cap", type=int, default=100, help="archive capacity")
    sub.add_argument("--grid-divisions", type=int, default=7, help="hypergrid divisions per axis")
    sub.add_argument("--kappa", type=float, default=2.0, help="crowding scale coefficient")
    sub.add_argument(
        "--delta",
        type=float,
        default=None,
        help="mutation coefficient (default: occupied cells at initialization)",
    )
    sub.add_argument("--mutation-prob", type=float, default=0.1, help="per-particle mutation probability")


def _config_from_args(args, **overrides):
    cfg = SwarmConfig(
        population=args.pop,
        max_iterations=args.iters,
        seed=args.seed,
        archive_capacity=args.archive_cap,
        grid_divisions=args.grid_divisions,
        kappa=args.kappa,
        delta=args.delta,
        mutation_prob=args.mutation_prob,
        **overrides,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise _DataError(str(exc)) from exc
    return cfg


def cmd_plan(args, argv):
    started = datetime.now(timezone.utc).isoformat()
    scenario, scenario_text = _load_scenario(args.scenario)
    config = _config_from_args(args)
    threads = _threads_from_env()
    result = run(scenario, config, threads=threads)

    front = [ov for _, _, ov in result.pareto_front]
    _write_text(args.out, export_front(result))
    _write_text(args.paths, export_paths(result))
    if front:
        stats = front_stats(front, divisions=config.grid_divisions, kappa=config.kappa)
        _write_text(args.stats, export_stats(stats))
    else:
        _write_text(args.stats, "objective,max,min,mean,std\n")

    manifest = RunManifest(
        command="plan",
        argv=list(argv),
        package_version=__version__,
        scenario_path=str(args.scenario),
        scenario_sha256=hashlib.sha256(scenario_text.encode()).hexdigest(),
        config=dataclasses.asdict(config),
        seed=config.seed,
        threads=threads,
        started_utc=started,
        finished_utc=datetime.now(timezone.utc).isoformat(),
        iterations_run=result.iterations_run,
        wall_time_s=result.wall_time,
        front_size=len(front),
        outputs={"front": str(args.out), "paths": str(args.paths), "stats": str(args.stats)},
    )
    _write_text(str(args.out) + ".manifest.json", manifest.to_json())

    if not front:
        print("no feasible solution found; front is empty", file=sys.stderr)
        return EXIT_EMPTY_FRONT
    print(f"front size {len(front)} written to {args.out}")
    return EXIT_OK


def cmd_evaluate(args, argv):
    scenario, _ = _load_scenario(args.scenario)
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        raise _DataError(f"cannot read path file {args.path}: {exc}") from exc
    try:
        path = parse_path_text(text)
    except ValueError as exc:
        raise _DataError(f"path file {args.path}: {exc}") from exc

    vector = evaluate_all(path, scenario)
    for name, value in zip(("f1", "f2", "f3", "f4"), vector.as_array()):
        print(f"{name} {float(value)!r}")
    report = validate_kinematics(path, scenario.limits)
    print(f"kinematics {'PASS' if report.overall_pass else 'FAIL'}")
    for idx, joint in enumerate(report.joints, 1):
        suffix = " (goal attachment, exempt)" if idx == len(report.joints) else ""
        print(
            f"joint {idx}: climb_delta={joint.delta_climb:+.6f} "
            f"turn_delta={joint.delta_turn:+.6f} "
            f"{'ok' if joint.within_limits else 'limit exceeded'}{suffix}"
        )
    return EXIT_OK if vector.feasible else EXIT_INFEASIBLE


def _compare_variants(name):
    if name == "nmopso":
        return {}
    if name == "nmopso-nomut":
        return {"disable_mutation": True}
    if name == "nmopso-cartesian":
        return {"cartesian_encoding": True}
    if name == "wpso":
        return None  # handled separately
    raise KeyError(name)


def cmd_compare(args, argv):
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    unknown = [a for a in algos if a not in _ALGORITHMS]
    if unknown or not algos:
        print(
            f"unknown algorithm(s) {unknown}; choose from {', '.join(_ALGORITHMS)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if args.runs < 1:
        raise _DataError(f"--runs must be at least 1, got {args.runs}")
    scenario, _ = _load_scenario(args.scenario)
    threads = _threads_from_env()

    lines = ["algo,objective,max,min,mean,std"]
    for algo in algos:
        per_run_stats = []
        empty_runs = 0
        for k in range(args.runs):
            overrides = _compare_variants(algo)
            if overrides is None:
                config = _config_from_args(args)
                config.seed = args.seed + k
                res = run_weighted_pso(scenario, config, threads=threads)
                front = [res.objectives] if res.objectives.feasible else []
            else:
                config = _config_from_args(args, **overrides)
                config.seed = args.seed + k
                res = run(scenario, config, threads=threads)
                front = [ov for _, _, ov in res.pareto_front]
            if front:
                per_run_stats.append(
                    front_stats(front, divisions=config.grid_divisions, kappa=config.kappa)
                )
            else:
                empty_runs += 1
        if not per_run_stats:
            lines.append(f"{algo},none,,,,")
            continue
        n = len(per_run_stats)
        for idx, objective in enumerate(("f1", "f2", "f3", "f4")):
            mean_of = lambda attr: sum(float(getattr(s, attr)[idx]) for s in per_run_stats) / n
            lines.append(
                f"{algo},{objective},{mean_of('maxima')!r},{mean_of('minima')!r},"
                f"{mean_of('means')!r},{mean_of('stds')!r}"
            )
        mean_sd = sum(s.s_d for s in per_run_stats) / n
        lines.append(f"{algo},s_d,{mean_sd!r},,,")
        if empty_runs:
            lines.append(f"{algo},empty_runs,{empty_runs},,,")
    table = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, table)
    else:
        sys.stdout.write(table)
    return EXIT_OK


def cmd_terrain_gen(args, argv):
    try:
        grid = generate_terrain(args.width, args.height, args.cellsize, args.roughness, args.seed)
    except TerrainError as exc:
        raise _DataError(str(exc)) from exc
    _write_text(args.out, grid.serialize())
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="nmopso", description="Multi-objective UAV path planning")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    plan = sub.add_parser("plan", help="run the multi-objective planner")
    plan.add_argument("--scenario", required=True, help="scenario JSON file")
    _add_swarm_flags(plan)
    plan.add_argument("--out", default="front.csv", help="front CSV output")
    plan.add_argument("--paths", default="paths.json", help="waypoint JSON output")
    plan.add_argument("--stats", default="stats.csv", help="front statistics CSV output")
    plan.set_defaults(func=cmd_plan)

    evaluate = sub.add_parser("evaluate", help="evaluate a path file against a scenario")
    evaluate.add_argument("--scenario", required=True, help="scenario JSON file")
    evaluate.add_argument("--path", required=True, help="path file, one `x y z` per line")
    evaluate.set_defaults(func=cmd_evaluate)

    compare = sub.add_parser("compare", help="run algorithm variants over repeated seeds")
    compare.add_argument("--scenario", required=True, help="scenario JSON file")
    compare.add_argument(
        "--algos",
        default="nmopso,wpso",
        help=f"comma-separated subset of: {', '.join(_ALGORITHMS)}",
    )
    compare.add_argument("--runs", type=int, default=1, help="runs per algorithm")
    _add_swarm_flags(compare)
    compare.add_argument("--out", default=None, help="write the CSV table here instead of stdout")
    compare.set_defaults(func=cmd_compare)

    terrain = sub.add_parser("terrain-gen", help="generate a synthetic terrain file")
    terrain.add_argument("--width", type=int, required=True, help="grid width in nodes")
    terrain.add_argument("--height", type=int, required=True, help="grid height in nodes")
    terrain.add_argument("--cellsize", type=float, required=True, help="node spacing, meters")
    terrain.add_argument("--roughness", type=float, default=0.5, help="relief scale in [0, 1]")
    terrain.add_argument("--seed", type=int, default=42, help="generator seed")
    terrain.add_argument("--out", required=True, help="terrain file to write")
    terrain.set_defaults(func=cmd_terrain_gen)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except _DataError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
