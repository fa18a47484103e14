"""Benchmark orchestration: trials over seeds, CSV emission, summary curves.

Each trial seed builds its own roadmap; every requested planner then runs
on that same roadmap and query, successes are shortcut-smoothed, and one
record per (seed, planner) lands in results.csv. All columns except the
wall-time ones are deterministic for identical inputs.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .baselines import (
    GRAPH_BASELINES,
    plan_baseline_graph,
    plan_iterative_deepening,
    plan_rrt_connect,
)
from .scenario import Scenario, make_graph, make_world
from .search import SearchParams, plan_sd, plan_sd_anytime, plan_sd_bidirectional
from .smooth import SmoothParams, path_cost, shortcut
from .svgviz import emit_line_plot

PLANNERS = ("sd", "sd-bi", "sd-anytime", "astar", "wastar", "greedy", "id", "rrtc")

CSV_COLUMNS = [
    "scenario",
    "planner",
    "seed",
    "success",
    "plan_time_us",
    "cost_raw",
    "cost_smoothed",
    "edges_checked",
    "configs_checked",
    "expansions",
    "astar_iterations",
    "deepest_layer_expanded",
    "deepest_layer_checked",
    "t_forward_us",
    "t_backward_us",
]

# Wall-clock columns; everything else must reproduce exactly across runs.
WALL_TIME_COLUMNS = ("plan_time_us", "t_forward_us", "t_backward_us")


@dataclass
class TrialRecord:
    scenario: str
    planner: str
    seed: int
    success: bool
    plan_time_us: int
    cost_raw: float | None
    cost_smoothed: float | None
    edges_checked: int
    configs_checked: int
    expansions: int
    astar_iterations: int
    deepest_layer_expanded: int
    deepest_layer_checked: int
    t_forward_us: int
    t_backward_us: int

    def to_row(self) -> list[str]:
        def num(v):
            return "" if v is None else f"{v:.12g}"

        return [
            self.scenario,
            self.planner,
            str(self.seed),
            "1" if self.success else "0",
            str(self.plan_time_us),
            num(self.cost_raw),
            num(self.cost_smoothed),
            str(self.edges_checked),
            str(self.configs_checked),
            str(self.expansions),
            str(self.astar_iterations),
            str(self.deepest_layer_expanded),
            str(self.deepest_layer_checked),
            str(self.t_forward_us),
            str(self.t_backward_us),
        ]

    @classmethod
    def from_row(cls, row: list[str]) -> "TrialRecord":
        return cls(
            scenario=row[0],
            planner=row[1],
            seed=int(row[2]),
            success=row[3] == "1",
            plan_time_us=int(row[4]),
            cost_raw=float(row[5]) if row[5] else None,
            cost_smoothed=float(row[6]) if row[6] else None,
            edges_checked=int(row[7]),
            configs_checked=int(row[8]),
            expansions=int(row[9]),
            astar_iterations=int(row[10]),
            deepest_layer_expanded=int(row[11]),
            deepest_layer_checked=int(row[12]),
            t_forward_us=int(row[13]),
            t_backward_us=int(row[14]),
        )


def run_planner(
    planner: str,
    scenario: Scenario,
    seed: int,
    w_t: float,
    *,
    graph=None,
    epsilon: float | None = None,
    rrt_step: float = 0.1,
):
    """One planner on one trial; returns (PlanResult, world)."""
    if planner not in PLANNERS:
        raise ValueError(f"unknown planner {planner!r}; expected one of {PLANNERS}")
    world = make_world(scenario)
    time_limit = scenario.time_limit_ms / 1000.0
    params = SearchParams(w_t=w_t, time_limit=time_limit, check_seed=seed)
    if planner == "rrtc":
        result = plan_rrt_connect(
            world, scenario.start, scenario.goal, step=rrt_step, seed=seed,
            time_limit=time_limit,
        )
        return result, world
    if graph is None:
        graph = make_graph(scenario, seed)
    args = (world, graph, scenario.start, scenario.goal, params)
    if planner == "sd":
        result = plan_sd(*args)
    elif planner == "sd-bi":
        result = plan_sd_bidirectional(*args)
    elif planner == "sd-anytime":
        result = plan_sd_anytime(*args, budget=time_limit)
    elif planner == "id":
        result = plan_iterative_deepening(*args)
    else:
        result = plan_baseline_graph(planner, *args, epsilon=epsilon)
    return result, world


def _to_record(scenario_name, planner, seed, result, cost_smoothed) -> TrialRecord:
    s = result.stats
    return TrialRecord(
        scenario=scenario_name,
        planner=planner,
        seed=seed,
        success=result.success,
        plan_time_us=int(round(s.wall_time * 1e6)),
        cost_raw=result.cost if result.success else None,
        cost_smoothed=cost_smoothed if result.success else None,
        edges_checked=s.edges_checked,
        configs_checked=s.configs_checked,
        expansions=s.expansions,
        astar_iterations=s.astar_iterations,
        deepest_layer_expanded=s.deepest_layer_expanded,
        deepest_layer_checked=s.deepest_layer_checked,
        t_forward_us=int(round(s.t_forward * 1e6)),
        t_backward_us=int(round(s.t_backward * 1e6)),
    )


def run_trial_seed(
    scenario: Scenario,
    planners: list[str],
    seed: int,
    w_t: float,
    smooth_iters: int = 500,
    epsilon: float | None = None,
    rrt_step: float = 0.1,
) -> list[TrialRecord]:
    """All planners on the roadmap built for one seed."""
    graph = None
    if any(p != "rrtc" for p in planners):
        graph = make_graph(scenario, seed)
    records = []
    for planner in planners:
        result, world = run_planner(
            planner, scenario, seed, w_t, graph=graph, epsilon=epsilon, rrt_step=rrt_step
        )
        cost_smoothed = None
        if result.success and len(result.path) >= 2:
            smoothed = shortcut(
                world, result.path, SmoothParams(iterations=smooth_iters, rng_seed=seed)
            )
            cost_smoothed = path_cost(smoothed)
        elif result.success:
            cost_smoothed = result.cost
        records.append(_to_record(scenario.name, planner, seed, result, cost_smoothed))
    return records


def run_benchmark(
    scenario: Scenario,
    planners: list[str],
    w_t: float,
    out_dir: str | None,
    *,
    jobs: int = 1,
    smooth_iters: int = 500,
    epsilon: float | None = None,
    rrt_step: float = 0.1,
    seed_base: int | None = None,
    trials: int | None = None,
) -> list[TrialRecord]:
    """The full protocol: `trials` seeds x every planner, written to CSV.

    Planner failures (no path, timeout) are data rows, not errors. Rows
    are ordered by (seed, planner order given) regardless of `jobs`.
    """
    if not planners:
        raise ValueError("at least one planner is required")
    for p in planners:
        if p not in PLANNERS:
            raise ValueError(f"unknown planner {p!r}; expected one of {PLANNERS}")
    seed_base = scenario.seed_base if seed_base is None else seed_base
    trials = scenario.trials if trials is None else trials
    seeds = list(range(seed_base, seed_base + trials))
    records: list[TrialRecord] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(
                    run_trial_seed, scenario, planners, seed, w_t,
                    smooth_iters, epsilon, rrt_step,
                )
                for seed in seeds
            ]
            for future in futures:
                records.extend(future.result())
    else:
        for seed in seeds:
            records.extend(
                run_trial_seed(
                    scenario, planners, seed, w_t,
                    smooth_iters=smooth_iters, epsilon=epsilon, rrt_step=rrt_step,
                )
            )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_records_csv(records, os.path.join(out_dir, "results.csv"))
    return records


def write_records_csv(records: list[TrialRecord], path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(record.to_row())


def read_records_csv(path: str) -> list[TrialRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV columns in {path}: {header}")
        return [TrialRecord.from_row(row) for row in reader]


def lower_median(values):
    """Median taking the lower of the two middle elements on even counts."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("no values")
    return ordered[(len(ordered) - 1) // 2]


def emit_curves(records: list[TrialRecord], out_dir: str, grid_points: int = 101):
    """Success-fraction-over-time and per-planner median cost summaries.

    Writes success_rate.csv (time grid x planner cumulative success
    fraction), medians.csv (lower-median raw and smoothed costs over
    successful trials; planners with no successes get a note row), and
    SVG plots of both.
    """
    os.makedirs(out_dir, exist_ok=True)
    planners = []
    for r in records:
        if r.planner not in planners:
            planners.append(r.planner)
    max_t = max((r.plan_time_us for r in records), default=0)
    grid = [round(max_t * i / (grid_points - 1)) for i in range(grid_points)]
    by_planner = {p: [r for r in records if r.planner == p] for p in planners}

    with open(os.path.join(out_dir, "success_rate.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_us"] + planners)
        for t in grid:
            row = [str(t)]
            for p in planners:
                rows = by_planner[p]
                frac = sum(1 for r in rows if r.success and r.plan_time_us <= t) / len(rows)
                row.append(f"{frac:.6g}")
            writer.writerow(row)

    with open(os.path.join(out_dir, "medians.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["planner", "successes", "median_cost_raw", "median_cost_smoothed", "note"])
        for p in planners:
            costs_raw = [r.cost_raw for r in by_planner[p] if r.success]
            costs_smooth = [r.cost_smoothed for r in by_planner[p] if r.success]
            if costs_raw:
                writer.writerow(
                    [p, str(len(costs_raw)),
                     f"{lower_median(costs_raw):.12g}",
                     f"{lower_median(costs_smooth):.12g}", ""]
                )
            else:
                writer.writerow([p, "0", "", "", "no successes"])

    success_series = {}
    for p in planners:
        rows = by_planner[p]
        pts = []
        for t in grid:
            frac = sum(1 for r in rows if r.success and r.plan_time_us <= t) / len(rows)
            pts.append((t / 1e6, frac))
        success_series[p] = pts
    emit_line_plot(
        os.path.join(out_dir, "success_rate.svg"),
        success_series,
        "Fraction of trials solved by time t",
        "time [s]",
        "success fraction",
    )
    median_series = {}
    for p in planners:
        costs_raw = [r.cost_raw for r in by_planner[p] if r.success]
        costs_smooth = [r.cost_smoothed for r in by_planner[p] if r.success]
        if costs_raw:
            idx = planners.index(p)
            median_series.setdefault("raw", []).append((idx, lower_median(costs_raw)))
            median_series.setdefault("smoothed", []).append((idx, lower_median(costs_smooth)))
    emit_line_plot(
        os.path.join(out_dir, "medians.svg"),
        median_series,
        "Median path cost per planner (index order: " + ", ".join(planners) + ")",
        "planner index",
        "median cost",
    )


def run_wt_sweep(
    scenario: Scenario,
    values: list[float],
    out_dir: str | None,
    *,
    jobs: int = 1,
    seed_base: int | None = None,
    trials: int | None = None,
) -> list[dict]:
    """Planner behavior across the planning-time weight.

    Runs the main planner for each weight over the trial seeds and
    records raw (pre-smoothing) cost, expansions, and timing. Writes
    sweep.csv plus SVG plots of the per-weight medians."""
    seed_base = scenario.seed_base if seed_base is None else seed_base
    trials = scenario.trials if trials is None else trials
    rows: list[dict] = []
    for w_t in values:
        records = run_benchmark(
            scenario, ["sd"], w_t, None,
            jobs=jobs, seed_base=seed_base, trials=trials,
        )
        for r in records:
            rows.append(
                {
                    "wt": w_t,
                    "seed": r.seed,
                    "success": r.success,
                    "cost_raw": r.cost_raw,
                    "expansions": r.expansions,
                    "edges_checked": r.edges_checked,
                    "plan_time_us": r.plan_time_us,
                }
            )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "sweep.csv"), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["wt", "seed", "success", "cost_raw", "expansions", "edges_checked", "plan_time_us"]
            )
            for row in rows:
                writer.writerow(
                    [
                        f"{row['wt']:.12g}",
                        str(row["seed"]),
                        "1" if row["success"] else "0",
                        "" if row["cost_raw"] is None else f"{row['cost_raw']:.12g}",
                        str(row["expansions"]),
                        str(row["edges_checked"]),
                        str(row["plan_time_us"]),
                    ]
                )
        cost_pts = []
        exp_pts = []
        time_pts = []
        for w_t in values:
            wt_rows = [r for r in rows if r["wt"] == w_t and r["success"]]
            if wt_rows:
                cost_pts.append((w_t, lower_median([r["cost_raw"] for r in wt_rows])))
                exp_pts.append((w_t, lower_median([r["expansions"] for r in wt_rows])))
                time_pts.append((w_t, lower_median([r["plan_time_us"] for r in wt_rows]) / 1e6))
        emit_line_plot(
            os.path.join(out_dir, "sweep_cost.svg"),
            {"median raw cost": cost_pts},
            "Raw path cost vs planning-time weight",
            "w_t",
            "median raw cost",
        )
        emit_line_plot(
            os.path.join(out_dir, "sweep_effort.svg"),
            {"median expansions": exp_pts, "median time [s]": time_pts},
            "Search effort vs planning-time weight",
            "w_t",
            "median effort",
        )
    return rows
