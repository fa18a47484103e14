"""Comparison planners: classic heuristics on the same roadmap, plus RRT-connect.

The graph baselines reuse the lazy evaluation loop with different node
priorities; the sampling baseline plans off the roadmap entirely.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .graph import EdgeStateStore
from .search import (
    NO_PATH,
    PATH,
    TIMED_OUT,
    InvalidConfigurationError,
    PlanResult,
    SearchParams,
    SearchStats,
    _Run,
    prepare_query,
)

GRAPH_BASELINES = ("astar", "wastar", "greedy")


def default_wastar_epsilon(graph, params: SearchParams) -> float:
    """Uniform inflation matched to the densest layer: 1 + w_t * n_D."""
    return 1.0 + params.w_t * graph.layer_sizes[-1]


def plan_baseline_graph(
    kind: str,
    world,
    graph,
    q_s,
    q_g,
    params: SearchParams | None = None,
    *,
    epsilon: float | None = None,
    store=None,
    swept_cache=None,
) -> PlanResult:
    """Lazy search over the full roadmap with a classic priority rule.

    kind: "astar" orders by cost-to-come plus Euclidean cost-to-go;
    "wastar" inflates the cost-to-go uniformly over all layers by
    `epsilon` (> 1, default 1 + w_t * n_D); "greedy" orders by
    cost-to-go alone (cost-to-come still tracked for the path cost).
    Checking and edge-state semantics are identical to the main planner.
    """
    if kind not in GRAPH_BASELINES:
        raise ValueError(f"unknown graph baseline {kind!r}; expected one of {GRAPH_BASELINES}")
    params = params or SearchParams()
    if kind == "wastar":
        if epsilon is None:
            epsilon = default_wastar_epsilon(graph, params)
        if epsilon <= 1.0:
            raise ValueError("wastar epsilon must be > 1")
    store, trivial = prepare_query(world, graph, q_s, q_g, store)
    if trivial is not None:
        return trivial
    run = _Run(world, graph, params)
    if kind == "wastar":
        mults = [epsilon] * graph.D
    else:
        mults = [1.0] * graph.D
    greedy = kind == "greedy"
    while True:
        status, vertices = run.iteration(
            store, params.direction, mults, greedy=greedy, swept_cache=swept_cache
        )
        if status == "retry":
            continue
        return run.finish(status, vertices)


def plan_iterative_deepening(
    world, graph, q_s, q_g, params: SearchParams | None = None, *, store=None, swept_cache=None
) -> PlanResult:
    """Exhaust one layer at a time, sparsest first.

    Runs the lazy loop restricted to a single layer with the plain
    Euclidean heuristic; only when a layer provably has no path does the
    search move one layer denser. Edge verdicts persist across layers
    through the shared store, so a pair refuted on a sparse layer is
    never re-checked on a denser one.
    """
    params = params or SearchParams()
    store, trivial = prepare_query(world, graph, q_s, q_g, store)
    if trivial is not None:
        return trivial
    run = _Run(world, graph, params)
    mults = [1.0] * graph.D
    for layer in range(1, graph.D + 1):
        while True:
            status, vertices = run.iteration(
                store, "forward", mults, layer=layer, swept_cache=swept_cache
            )
            if status == "retry":
                continue
            break
        if status == PATH:
            return run.finish(PATH, vertices)
        if status == TIMED_OUT:
            return run.finish(TIMED_OUT)
    return run.finish(NO_PATH)


def plan_rrt_connect(
    world,
    q_s,
    q_g,
    step: float = 0.1,
    seed: int = 0,
    time_limit: float | None = 10.0,
    max_samples: int = 200_000,
) -> PlanResult:
    """Two trees grown toward uniform samples, greedily connected.

    Deterministic for a fixed seed as long as the sample cap (not the
    wall clock) is what stops an unsuccessful run. Edges are validated
    with the world's discretized edge check; the returned path endpoints
    are exactly q_s and q_g. Cannot certify that no path exists, so a
    sealed query ends in TIMED_OUT.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    q_s = np.asarray(q_s, dtype=float)
    q_g = np.asarray(q_g, dtype=float)
    stats = SearchStats()
    t0 = time.perf_counter()
    edge_snap = world.edge_check_count
    config_snap = world.config_check_count
    if not world.is_config_valid(q_s):
        raise InvalidConfigurationError("start configuration is invalid")
    if not world.is_config_valid(q_g):
        raise InvalidConfigurationError("goal configuration is invalid")

    def finish(status, path=None, cost=None, edge_log=None):
        stats.edges_checked = world.edge_check_count - edge_snap
        stats.configs_checked = world.config_check_count - config_snap
        stats.wall_time = time.perf_counter() - t0
        return PlanResult(
            status=status,
            path=path,
            cost=cost,
            stats=stats,
            edge_log=edge_log or [],
        )

    if np.array_equal(q_s, q_g):
        return finish(PATH, np.asarray([q_s]), 0.0)

    rng = np.random.Generator(np.random.PCG64(seed))
    deadline = t0 + time_limit if time_limit is not None else None
    dims = len(q_s)
    tree_a = _Tree(q_s)
    tree_b = _Tree(q_g)
    a_is_start = True
    edge_log: list = []

    def extend(tree: _Tree, q_target) -> tuple[str, int]:
        near_idx = tree.nearest(q_target)
        q_near = tree.points[near_idx]
        delta = q_target - q_near
        d = float(np.linalg.norm(delta))
        if d < 1e-12:
            return "reached", near_idx
        if d <= step:
            q_new = q_target.copy()
            status = "reached"
        else:
            q_new = q_near + delta * (step / d)
            status = "advanced"
        ok = world.is_edge_valid(q_near, q_new)
        edge_log.append((0, tuple(q_near), tuple(q_new), ok))
        if not ok:
            return "trapped", near_idx
        new_idx = tree.add(q_new, near_idx)
        stats.expansions += 1
        return status, new_idx

    for _ in range(max_samples):
        if deadline is not None and time.perf_counter() > deadline:
            return finish(TIMED_OUT, edge_log=edge_log)
        q_rand = rng.random(dims)
        status, new_idx = extend(tree_a, q_rand)
        if status != "trapped":
            q_new = tree_a.points[new_idx]
            while True:
                status_b, idx_b = extend(tree_b, q_new)
                if status_b == "reached":
                    chain_a = tree_a.chain(new_idx)
                    chain_b = tree_b.chain(idx_b)
                    if a_is_start:
                        configs = chain_a[::-1] + chain_b[1:]
                    else:
                        configs = chain_b[::-1] + chain_a[1:]
                    path = np.array(configs, dtype=float)
                    cost = sum(
                        math.dist(a, b) for a, b in zip(configs[:-1], configs[1:])
                    )
                    return finish(PATH, path, cost, edge_log)
                if status_b == "trapped":
                    break
        tree_a, tree_b = tree_b, tree_a
        a_is_start = not a_is_start
    return finish(TIMED_OUT, edge_log=edge_log)


class _Tree:
    """Array-backed tree with vectorized nearest-neighbor lookup."""

    def __init__(self, root):
        root = np.asarray(root, dtype=float)
        self._buf = np.empty((64, len(root)))
        self._buf[0] = root
        self.size = 1
        self.parents = [-1]

    @property
    def points(self) -> np.ndarray:
        return self._buf[: self.size]

    def add(self, q, parent: int) -> int:
        if self.size == len(self._buf):
            self._buf = np.vstack([self._buf, np.empty_like(self._buf)])
        self._buf[self.size] = q
        self.parents.append(parent)
        self.size += 1
        return self.size - 1

    def nearest(self, q) -> int:
        d = np.linalg.norm(self.points - q, axis=1)
        return int(np.argmin(d))

    def chain(self, idx: int) -> list[tuple]:
        """Configurations from idx back to the root."""
        out = []
        while idx >= 0:
            out.append(tuple(self._buf[idx]))
            idx = self.parents[idx]
        return out
