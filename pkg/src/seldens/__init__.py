"""Layered multi-density roadmap motion planning.

A roadmap built from nested Halton point sets is organized into layers of
increasing density joined by zero-cost edges between copies of the same
configuration. Queries run A* over the optimistic (lazily evaluated) graph
with a heuristic that trades path cost against expected remaining search
effort, collision-checking only the edges of candidate paths.
"""

from .halton import HaltonSource, radical_inverse
from .world import (
    CollisionWorld,
    OccupancyGrid,
    PlanarArm,
    PointRobot,
    SweptCache,
    discretize,
)
from .graph import (
    GOAL,
    START,
    Edge,
    EdgeState,
    EdgeStateStore,
    LayeredGraph,
    connection_radius,
)
from .search import (
    PlanResult,
    SearchParams,
    SearchStats,
    astar_optimistic,
    check_edges,
    h_sd,
    h_x,
    plan_sd,
    plan_sd_anytime,
    plan_sd_bidirectional,
)
from .baselines import (
    plan_baseline_graph,
    plan_iterative_deepening,
    plan_rrt_connect,
)
from .smooth import SmoothParams, shortcut
from .scenario import Scenario, ScenarioError, load_scenario, make_graph, make_world
from .bench import TrialRecord, emit_curves, run_benchmark, run_wt_sweep
from .svgviz import emit_svg_layers, emit_svg_scene

__version__ = "0.1.0"

__all__ = [
    "HaltonSource",
    "radical_inverse",
    "CollisionWorld",
    "OccupancyGrid",
    "PointRobot",
    "PlanarArm",
    "SweptCache",
    "discretize",
    "LayeredGraph",
    "Edge",
    "EdgeState",
    "EdgeStateStore",
    "connection_radius",
    "START",
    "GOAL",
    "SearchParams",
    "SearchStats",
    "PlanResult",
    "h_x",
    "h_sd",
    "astar_optimistic",
    "check_edges",
    "plan_sd",
    "plan_sd_bidirectional",
    "plan_sd_anytime",
    "plan_baseline_graph",
    "plan_iterative_deepening",
    "plan_rrt_connect",
    "SmoothParams",
    "shortcut",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "make_world",
    "make_graph",
    "TrialRecord",
    "run_benchmark",
    "run_wt_sweep",
    "emit_curves",
    "emit_svg_scene",
    "emit_svg_layers",
]
