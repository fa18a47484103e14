import csv
import json
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from seldens.bench import (
    CSV_COLUMNS,
    WALL_TIME_COLUMNS,
    emit_curves,
    lower_median,
    read_records_csv,
    run_benchmark,
    run_wt_sweep,
    write_records_csv,
    TrialRecord,
)
from seldens.cli import main
from seldens.graph import LayeredGraph
from seldens.halton import HaltonSource
from seldens.scenario import Scenario, ScenarioError, load_scenario, make_world
from seldens.search import SearchParams, plan_sd
from seldens.svgviz import emit_svg_layers, emit_svg_scene
from seldens.world import CollisionWorld, OccupancyGrid, PointRobot


def small_scenario(tmp_path, name="tiny", obstacles=(), start=(0.1, 0.1), goal=(0.9, 0.9), **overrides):
    spec = {
        "name": name,
        "dims": 2,
        "robot": {"type": "point", "radius": 0.0},
        "grid": {
            "width": 32,
            "height": 32,
            "resolution": 0.03125,
            "obstacles": list(obstacles),
        },
        "start": list(start),
        "goal": list(goal),
        "graph": {"D": 5, "target_degree": 30.0, "seed_base": 7},
        "trials": 3,
        "time_limit_ms": 10000,
    }
    spec.update(overrides)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(spec))
    return str(path)


# -- scenario loading -----------------------------------------------------------


def test_load_bundled_gap2d():
    scenario = load_scenario("gap2d")
    assert scenario.dims == 2
    assert scenario.name == "gap2d"
    assert scenario.trials == 20


def test_load_scenario_file(tmp_path):
    scenario = load_scenario(small_scenario(tmp_path))
    assert scenario.D == 5
    assert scenario.seed_base == 7


def test_load_scenario_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError, match="could not parse"):
        load_scenario(str(bad))


def test_load_scenario_start_in_obstacle(tmp_path):
    path = small_scenario(
        tmp_path, obstacles=[{"x0": 2, "y0": 2, "x1": 5, "y1": 5}], start=(0.1, 0.1)
    )
    with pytest.raises(ScenarioError, match="start"):
        load_scenario(path)


def test_load_scenario_oob_obstacle(tmp_path):
    path = small_scenario(tmp_path, obstacles=[{"x0": 30, "y0": 0, "x1": 40, "y1": 2}])
    with pytest.raises(ScenarioError, match="obstacle 0"):
        load_scenario(path)


def test_load_scenario_missing_d_defaults_with_warning(tmp_path):
    path = small_scenario(tmp_path, graph={"seed_base": 3})
    with pytest.warns(UserWarning, match="graph.D"):
        scenario = load_scenario(path)
    assert scenario.D == 12
    assert scenario.seed_base == 3


def test_unknown_scenario_name():
    with pytest.raises(ScenarioError, match="bundled"):
        load_scenario("no-such-scenario")


# -- benchmark -------------------------------------------------------------------


def test_run_benchmark_row_count_and_csv(tmp_path):
    scenario = load_scenario(small_scenario(tmp_path))
    out = tmp_path / "out"
    records = run_benchmark(scenario, ["sd", "astar"], 1.0, str(out))
    assert len(records) == 2 * scenario.trials
    parsed = read_records_csv(out / "results.csv")
    assert len(parsed) == len(records)
    assert {r.planner for r in parsed} == {"sd", "astar"}
    assert all(r.success for r in parsed)  # empty-ish world, everything solves
    assert [r.seed for r in parsed if r.planner == "sd"] == [7, 8, 9]


def test_run_benchmark_empty_planner_list(tmp_path):
    scenario = load_scenario(small_scenario(tmp_path))
    with pytest.raises(ValueError, match="at least one planner"):
        run_benchmark(scenario, [], 1.0, None)
    with pytest.raises(ValueError, match="unknown planner"):
        run_benchmark(scenario, ["sd", "bogus"], 1.0, None)


def test_run_benchmark_deterministic_modulo_wall_time(tmp_path):
    scenario = load_scenario(
        small_scenario(tmp_path, obstacles=[{"x0": 14, "y0": 0, "x1": 15, "y1": 22}])
    )
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_benchmark(scenario, ["sd", "greedy", "rrtc"], 1.0, str(out_a))
    run_benchmark(scenario, ["sd", "greedy", "rrtc"], 1.0, str(out_b))
    rows_a = list(csv.reader(open(out_a / "results.csv")))
    rows_b = list(csv.reader(open(out_b / "results.csv")))
    assert rows_a[0] == rows_b[0] == CSV_COLUMNS
    wall_idx = [CSV_COLUMNS.index(c) for c in WALL_TIME_COLUMNS]
    for ra, rb in zip(rows_a[1:], rows_b[1:]):
        for i, (va, vb) in enumerate(zip(ra, rb)):
            if i not in wall_idx:
                assert va == vb, (CSV_COLUMNS[i], va, vb)


def test_benchmark_smoothed_cost_never_exceeds_raw(tmp_path):
    scenario = load_scenario(
        small_scenario(tmp_path, obstacles=[{"x0": 14, "y0": 0, "x1": 15, "y1": 22}])
    )
    records = run_benchmark(scenario, ["sd"], 1.0, None)
    for record in records:
        if record.success:
            assert record.cost_smoothed <= record.cost_raw + 1e-9


def test_run_benchmark_parallel_matches_serial(tmp_path):
    scenario = load_scenario(small_scenario(tmp_path))
    serial = run_benchmark(scenario, ["sd", "astar"], 1.0, None, jobs=1)
    parallel = run_benchmark(scenario, ["sd", "astar"], 1.0, None, jobs=2)
    for a, b in zip(serial, parallel):
        assert (a.planner, a.seed, a.success, a.cost_raw, a.expansions) == (
            b.planner, b.seed, b.success, b.cost_raw, b.expansions
        )


# -- curves ------------------------------------------------------------------------


def _record(planner, seed, success, time_us, cost):
    return TrialRecord(
        scenario="t", planner=planner, seed=seed, success=success,
        plan_time_us=time_us, cost_raw=cost, cost_smoothed=cost,
        edges_checked=0, configs_checked=0, expansions=0, astar_iterations=0,
        deepest_layer_expanded=0, deepest_layer_checked=0,
        t_forward_us=0, t_backward_us=0,
    )


def test_emit_curves_instant_success(tmp_path):
    records = [_record("sd", s, True, 0, 1.0) for s in range(4)]
    emit_curves(records, str(tmp_path))
    rows = list(csv.reader(open(tmp_path / "success_rate.csv")))
    assert rows[0] == ["time_us", "sd"]
    assert rows[1][1] == "1"  # fraction 1.0 at the first grid point


def test_emit_curves_zero_success_note(tmp_path):
    records = [_record("sd", s, True, 10, 2.0) for s in range(3)]
    records += [_record("rrtc", s, False, 10, None) for s in range(3)]
    emit_curves(records, str(tmp_path))
    rows = list(csv.reader(open(tmp_path / "medians.csv")))
    by_planner = {r[0]: r for r in rows[1:]}
    assert by_planner["rrtc"][4] == "no successes"
    assert by_planner["sd"][2] == "2"
    assert (tmp_path / "success_rate.svg").exists()
    assert (tmp_path / "medians.svg").exists()


def test_lower_median_rule():
    assert lower_median([3.0, 1.0]) == 1.0
    assert lower_median([4.0, 2.0, 3.0, 1.0]) == 2.0
    assert lower_median([5.0]) == 5.0


def test_records_csv_roundtrip(tmp_path):
    records = [
        _record("sd", 0, True, 123, 1.5),
        _record("rrtc", 1, False, 456, None),
    ]
    path = tmp_path / "r.csv"
    write_records_csv(records, str(path))
    back = read_records_csv(str(path))
    assert back == records


# -- svg ---------------------------------------------------------------------------


def solved_result():
    world = CollisionWorld(OccupancyGrid.empty(32, 32, 1 / 32), PointRobot(0.0))
    graph = LayeredGraph.build(HaltonSource(2, 3), D=4)
    result = plan_sd(world, graph, [0.2, 0.2], [0.4, 0.35], SearchParams(w_t=1.0))
    return world, graph, result


def test_svg_scene_single_blue_polyline(tmp_path):
    world, _graph, result = solved_result()
    assert result.success and result.stats.astar_iterations == 1
    path = tmp_path / "scene.svg"
    emit_svg_scene(world, result, str(path))
    text = path.read_text()
    assert text.count('stroke="blue"') == 1
    ET.fromstring(text)  # well-formed XML


def test_svg_layers_valid_and_deterministic(tmp_path):
    world, graph, result = solved_result()
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_svg_layers(graph, result, str(p1))
    emit_svg_layers(graph, result, str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    root = ET.fromstring(p1.read_text())
    assert root.tag.endswith("svg")


def test_svg_scene_draws_obstacles_and_verdicts(tmp_path):
    grid = OccupancyGrid.from_rects(32, 32, 1 / 32, [(14, 0, 15, 20)])
    world = CollisionWorld(grid, PointRobot(0.0))
    graph = LayeredGraph.build(HaltonSource(2, 5), D=5)
    result = plan_sd(world, graph, [0.1, 0.5], [0.9, 0.5], SearchParams(w_t=1.0))
    assert result.success
    out = tmp_path / "scene.svg"
    emit_svg_scene(world, result, str(out))
    text = out.read_text()
    assert 'fill="#f08080"' in text  # obstacle cells
    assert 'stroke="red"' in text  # at least one invalid edge on the way
    assert 'stroke="black"' in text


# -- CLI -----------------------------------------------------------------------------


def test_cli_plan_json_summary(tmp_path, capsys):
    path = small_scenario(tmp_path)
    rc = main(["plan", "--scenario", path, "--planner", "sd", "--wt", "1",
               "--seed", "3", "--svg", str(tmp_path / "viz")])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "path"
    assert out["cost_smoothed"] <= out["cost_raw"] + 1e-9
    assert os.path.exists(out["svg_scene"])
    assert os.path.exists(out["svg_layers"])


def test_cli_plan_rrtc(tmp_path, capsys):
    path = small_scenario(tmp_path)
    rc = main(["plan", "--scenario", path, "--planner", "rrtc", "--seed", "5"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "path"


def test_cli_bench_and_outputs(tmp_path, capsys):
    path = small_scenario(tmp_path)
    out_dir = tmp_path / "bench"
    rc = main(["bench", "--scenario", path, "--planners", "sd,id", "--wt", "1",
               "--out", str(out_dir)])
    assert rc == 0
    assert (out_dir / "results.csv").exists()
    assert (out_dir / "success_rate.csv").exists()
    assert (out_dir / "medians.csv").exists()
    records = read_records_csv(out_dir / "results.csv")
    assert len(records) == 6  # 2 planners x 3 trials


def test_cli_seed_base_env_override(tmp_path, monkeypatch):
    path = small_scenario(tmp_path)
    out_dir = tmp_path / "bench2"
    monkeypatch.setenv("SD_SEED_BASE", "55")
    rc = main(["bench", "--scenario", path, "--planners", "sd", "--out", str(out_dir)])
    assert rc == 0
    records = read_records_csv(out_dir / "results.csv")
    assert [r.seed for r in records] == [55, 56, 57]


def test_cli_sweep_wt(tmp_path, capsys):
    path = small_scenario(tmp_path)
    out_dir = tmp_path / "sweep"
    rc = main(["sweep-wt", "--scenario", path, "--values", "0,1", "--out", str(out_dir)])
    assert rc == 0
    assert (out_dir / "sweep.csv").exists()
    rows = list(csv.reader(open(out_dir / "sweep.csv")))
    assert len(rows) == 1 + 2 * 3  # header + 2 weights x 3 trials


def test_cli_error_paths(tmp_path, capsys):
    assert main(["plan", "--scenario", "missing", "--planner", "sd"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err
