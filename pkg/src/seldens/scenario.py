"""Scenario files: world geometry, robot, query, and benchmark settings.

A scenario is a JSON object:

    {
      "name": "gap2d",
      "dims": 2,
      "robot": {"type": "point", "radius": 0.0}
               | {"type": "arm", "link_lengths": [..], "base": [x, y]},
      "grid": {"width": W, "height": H, "resolution": meters_per_cell,
               "obstacles": [{"x0":..,"y0":..,"x1":..,"y1":..}, ...]},
      "start": [..], "goal": [..],
      "graph": {"D": layers, "target_degree": 30.0, "seed_base": 0},
      "trials": 20,
      "time_limit_ms": 20000
    }

Obstacle rectangles are inclusive cell ranges. Start and goal are
collision-checked at load time.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources

from .graph import LayeredGraph
from .halton import HaltonSource
from .world import CollisionWorld, OccupancyGrid, PlanarArm, PointRobot

DEFAULT_D = 12
DEFAULT_TARGET_DEGREE = 30.0
DEFAULT_TRIALS = 20
DEFAULT_TIME_LIMIT_MS = 20000


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    dims: int
    robot: dict
    grid: dict
    start: list[float]
    goal: list[float]
    graph: dict = field(default_factory=dict)
    trials: int = DEFAULT_TRIALS
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS

    @property
    def D(self) -> int:
        return self.graph["D"]

    @property
    def target_degree(self) -> float:
        return self.graph["target_degree"]

    @property
    def seed_base(self) -> int:
        return self.graph["seed_base"]


def bundled_scenarios() -> list[str]:
    """Names of the scenario files shipped with the package."""
    out = []
    for entry in (resources.files("seldens") / "data").iterdir():
        if entry.name.endswith(".json"):
            out.append(entry.name[: -len(".json")])
    return sorted(out)


def _read_scenario_text(path_or_name: str) -> tuple[str, str]:
    import os

    if os.path.exists(path_or_name):
        with open(path_or_name, "r", encoding="utf-8") as fh:
            return fh.read(), path_or_name
    candidate = resources.files("seldens") / "data" / (path_or_name + ".json")
    if candidate.is_file():
        return candidate.read_text(encoding="utf-8"), path_or_name
    raise ScenarioError(
        f"scenario {path_or_name!r} is neither a file nor a bundled name "
        f"(bundled: {', '.join(bundled_scenarios())})"
    )


def load_scenario(path_or_name: str) -> Scenario:
    """Parse and fully validate a scenario file or bundled scenario name."""
    text, origin = _read_scenario_text(path_or_name)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError(f"could not parse scenario {origin!r}: {err}") from err
    for key in ("name", "dims", "robot", "grid", "start", "goal"):
        if key not in raw:
            raise ScenarioError(f"scenario {origin!r} is missing required field {key!r}")

    graph_spec = dict(raw.get("graph", {}))
    if "D" not in graph_spec:
        warnings.warn(
            f"scenario {origin!r} has no graph.D; defaulting to {DEFAULT_D}",
            stacklevel=2,
        )
        graph_spec["D"] = DEFAULT_D
    graph_spec.setdefault("target_degree", DEFAULT_TARGET_DEGREE)
    graph_spec.setdefault("seed_base", 0)

    scenario = Scenario(
        name=raw["name"],
        dims=int(raw["dims"]),
        robot=raw["robot"],
        grid=raw["grid"],
        start=[float(v) for v in raw["start"]],
        goal=[float(v) for v in raw["goal"]],
        graph=graph_spec,
        trials=int(raw.get("trials", DEFAULT_TRIALS)),
        time_limit_ms=int(raw.get("time_limit_ms", DEFAULT_TIME_LIMIT_MS)),
    )
    _validate(scenario, origin)
    return scenario


def _validate(scenario: Scenario, origin: str):
    grid = scenario.grid
    for key in ("width", "height", "resolution"):
        if key not in grid:
            raise ScenarioError(f"scenario {origin!r}: grid is missing {key!r}")
    width, height = int(grid["width"]), int(grid["height"])
    for i, rect in enumerate(grid.get("obstacles", [])):
        x0, y0, x1, y1 = rect["x0"], rect["y0"], rect["x1"], rect["y1"]
        if not (0 <= x0 <= x1 < width and 0 <= y0 <= y1 < height):
            raise ScenarioError(
                f"scenario {origin!r}: obstacle {i} {(x0, y0, x1, y1)} "
                f"out of grid bounds {width}x{height}"
            )
    robot = scenario.robot
    kind = robot.get("type")
    if kind == "point":
        expected = 2
    elif kind == "arm":
        expected = len(robot.get("link_lengths", []))
        if expected < 1:
            raise ScenarioError(f"scenario {origin!r}: arm robot needs link_lengths")
        if "base" not in robot:
            raise ScenarioError(f"scenario {origin!r}: arm robot needs a base point")
    else:
        raise ScenarioError(f"scenario {origin!r}: unknown robot type {kind!r}")
    if scenario.dims != expected:
        raise ScenarioError(
            f"scenario {origin!r}: dims={scenario.dims} but robot implies {expected}"
        )
    if len(scenario.start) != scenario.dims:
        raise ScenarioError(f"scenario {origin!r}: start has wrong dimension")
    if len(scenario.goal) != scenario.dims:
        raise ScenarioError(f"scenario {origin!r}: goal has wrong dimension")
    world = make_world(scenario)
    if not world.is_config_valid(scenario.start):
        raise ScenarioError(
            f"scenario {origin!r}: start configuration is in collision or out of bounds"
        )
    if not world.is_config_valid(scenario.goal):
        raise ScenarioError(
            f"scenario {origin!r}: goal configuration is in collision or out of bounds"
        )


def make_world(scenario: Scenario, check_step: float | None = None) -> CollisionWorld:
    """Fresh collision world (and counters) for one trial."""
    grid_spec = scenario.grid
    rects = [
        (r["x0"], r["y0"], r["x1"], r["y1"]) for r in grid_spec.get("obstacles", [])
    ]
    grid = OccupancyGrid.from_rects(
        int(grid_spec["width"]),
        int(grid_spec["height"]),
        float(grid_spec["resolution"]),
        rects,
    )
    robot_spec = scenario.robot
    if robot_spec["type"] == "point":
        robot = PointRobot(radius=float(robot_spec.get("radius", 0.0)))
    else:
        robot = PlanarArm(robot_spec["link_lengths"], robot_spec["base"])
    if check_step is None:
        check_step = float(grid_spec.get("check_step", 0.02))
    return CollisionWorld(grid, robot, check_step=check_step)


def make_graph(scenario: Scenario, seed: int) -> LayeredGraph:
    """Layered roadmap for one trial seed."""
    source = HaltonSource(scenario.dims, seed)
    return LayeredGraph.build(source, scenario.D, scenario.target_degree)
