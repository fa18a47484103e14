"""Command-line interface: plan, bench, and sweep-wt subcommands."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import (
    PLANNERS,
    emit_curves,
    run_benchmark,
    run_planner,
    run_wt_sweep,
)
from .scenario import ScenarioError, load_scenario, make_graph, make_world
from .search import InvalidConfigurationError
from .smooth import SmoothParams, path_cost, shortcut
from .svgviz import emit_svg_layers, emit_svg_scene


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seldens",
        description="Layered multi-density roadmap motion planning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="run one planner on one scenario")
    p_plan.add_argument("--scenario", required=True, help="scenario file or bundled name")
    p_plan.add_argument("--planner", required=True, choices=PLANNERS)
    p_plan.add_argument("--wt", type=float, default=1.0, help="planning-time weight")
    p_plan.add_argument("--seed", type=int, default=0, help="graph / sampling seed")
    p_plan.add_argument("--smooth-iters", type=int, default=500)
    p_plan.add_argument("--smooth-seed", type=int, default=None, help="default: --seed")
    p_plan.add_argument("--epsilon", type=float, default=None, help="wastar inflation")
    p_plan.add_argument("--rrt-step", type=float, default=0.1)
    p_plan.add_argument("--svg", metavar="DIR", default=None, help="write scene/layer views")

    p_bench = sub.add_parser("bench", help="run the benchmark protocol")
    p_bench.add_argument("--scenario", required=True)
    p_bench.add_argument("--planners", required=True, help="comma-separated planner list")
    p_bench.add_argument("--wt", type=float, default=1.0)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--out", required=True, help="output directory")
    p_bench.add_argument("--smooth-iters", type=int, default=500)
    p_bench.add_argument("--epsilon", type=float, default=None)
    p_bench.add_argument("--rrt-step", type=float, default=0.1)
    p_bench.add_argument("--trials", type=int, default=None, help="override scenario trials")

    p_sweep = sub.add_parser("sweep-wt", help="sweep the planning-time weight")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated w_t values")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--trials", type=int, default=None)
    return parser


def _seed_base_override() -> int | None:
    raw = os.environ.get("SD_SEED_BASE")
    return int(raw) if raw else None


def cmd_plan(args) -> int:
    scenario = load_scenario(args.scenario)
    graph = None
    world = make_world(scenario)
    if args.planner != "rrtc":
        graph = make_graph(scenario, args.seed)
    result, world = run_planner(
        args.planner,
        scenario,
        args.seed,
        args.wt,
        graph=graph,
        epsilon=args.epsilon,
        rrt_step=args.rrt_step,
    )
    summary = {
        "scenario": scenario.name,
        "planner": args.planner,
        "seed": args.seed,
        "status": result.status,
        "cost_raw": result.cost,
        "stats": {
            "expansions": result.stats.expansions,
            "astar_iterations": result.stats.astar_iterations,
            "edges_checked": result.stats.edges_checked,
            "configs_checked": result.stats.configs_checked,
            "deepest_layer_expanded": result.stats.deepest_layer_expanded,
            "deepest_layer_checked": result.stats.deepest_layer_checked,
            "t_forward_s": result.stats.t_forward,
            "t_backward_s": result.stats.t_backward,
            "wall_time_s": result.stats.wall_time,
        },
    }
    if result.status == "no_path":
        summary["note"] = "no path at the built roadmap density"
    if result.success and len(result.path) >= 2:
        smooth_seed = args.seed if args.smooth_seed is None else args.smooth_seed
        smoothed = shortcut(
            world, result.path,
            SmoothParams(iterations=args.smooth_iters, rng_seed=smooth_seed),
        )
        summary["cost_smoothed"] = path_cost(smoothed)
    if args.svg is not None:
        os.makedirs(args.svg, exist_ok=True)
        scene_path = os.path.join(args.svg, "scene.svg")
        emit_svg_scene(world, result, scene_path)
        summary["svg_scene"] = scene_path
        if graph is not None:
            layers_path = os.path.join(args.svg, "layers.svg")
            emit_svg_layers(graph, result, layers_path)
            summary["svg_layers"] = layers_path
    print(json.dumps(summary, indent=2))
    return 0


def cmd_bench(args) -> int:
    scenario = load_scenario(args.scenario)
    planners = [p.strip() for p in args.planners.split(",") if p.strip()]
    records = run_benchmark(
        scenario,
        planners,
        args.wt,
        args.out,
        jobs=args.jobs,
        smooth_iters=args.smooth_iters,
        epsilon=args.epsilon,
        rrt_step=args.rrt_step,
        seed_base=_seed_base_override(),
        trials=args.trials,
    )
    emit_curves(records, args.out)
    successes = sum(1 for r in records if r.success)
    print(
        f"{len(records)} trials ({successes} successes) -> "
        f"{os.path.join(args.out, 'results.csv')}"
    )
    return 0


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    if not values:
        raise ValueError("at least one w_t value is required")
    rows = run_wt_sweep(
        scenario,
        values,
        args.out,
        jobs=args.jobs,
        seed_base=_seed_base_override(),
        trials=args.trials,
    )
    print(f"{len(rows)} sweep rows -> {os.path.join(args.out, 'sweep.csv')}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "plan":
            return cmd_plan(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "sweep-wt":
            return cmd_sweep(args)
        parser.error(f"unknown command {args.command!r}")
    except (ScenarioError, InvalidConfigurationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
