"""Planner core: optimistic A* plus lazy edge evaluation over the roadmap.

Each query repeats a best-first search that assumes unevaluated edges are
collision-free, then collision-checks the candidate path's edges in
order, recording the verdicts so later iterations avoid known-bad edges.
The search heuristic inflates the Euclidean cost-to-go by a per-layer
factor eps_i = 1 + w_t * n_i, steering exploration toward sparse layers
and bounding suboptimality per layer.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .graph import GOAL, START, EdgeState, EdgeStateStore

PATH = "path"
NO_PATH = "no_path"
TIMED_OUT = "timed_out"

_TIME_CHECK_MASK = 63  # poll the deadline every 64 expansions


class InvalidConfigurationError(ValueError):
    pass


@dataclass
class SearchParams:
    """Knobs shared by all graph planners.

    w_t weights estimated remaining search effort against path cost;
    eps_i = 1 + w_t * n_i is >= 1 and non-decreasing with depth. The only
    implemented open-list tie-break pops lower f first, then higher g
    (deeper progress), then ascending (layer, node).
    """

    w_t: float = 1.0
    check_step: float | None = None  # None: use the world's step
    time_limit: float | None = None  # seconds
    tie_break: str = "f-then-deeper-g-then-vertex"
    direction: str = "forward"  # "forward" | "backward"
    check_order: str = "random"  # per-edge config order: "random" | "inorder"
    check_seed: int = 0
    record_expansions: bool = False

    def __post_init__(self):
        if self.w_t < 0:
            raise ValueError("w_t must be >= 0")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.check_order not in ("random", "inorder"):
            raise ValueError(f"unknown check_order {self.check_order!r}")
        if self.tie_break != "f-then-deeper-g-then-vertex":
            raise ValueError(f"unknown tie_break {self.tie_break!r}")

    def layer_multipliers(self, graph) -> list[float]:
        return [1.0 + self.w_t * n for n in graph.layer_sizes]


@dataclass
class SearchStats:
    expansions: int = 0
    astar_iterations: int = 0
    edges_checked: int = 0
    configs_checked: int = 0
    deepest_layer_expanded: int = 0
    deepest_layer_checked: int = 0
    t_forward: float = 0.0
    t_backward: float = 0.0
    wall_time: float = 0.0


@dataclass
class PlanResult:
    """Planner outcome plus bookkeeping for analysis and rendering.

    On success `path` holds the configuration sequence (vertical hops
    elided) and `cost` its summed Euclidean length. `edge_log` records
    every fresh edge collision check as (layer, q_a, q_b, valid);
    `astar_times` records per-iteration search durations by direction.
    """

    status: str
    path: np.ndarray | None
    cost: float | None
    stats: SearchStats
    vertex_path: list | None = None
    edge_log: list = field(default_factory=list)
    astar_times: list = field(default_factory=list)
    expanded_log: list | None = None

    @property
    def success(self) -> bool:
        return self.status == PATH


def h_x(graph, v, target) -> float:
    """Euclidean distance from a vertex's configuration to the target."""
    return math.dist(graph.config_of(v), tuple(target))


def h_sd(graph, v, target, w_t: float) -> float:
    """Layer-inflated cost-to-go: h_x * (1 + w_t * n_layer)."""
    return h_x(graph, v, target) * (1.0 + w_t * graph.n_of(v[0]))


@dataclass
class AstarOutcome:
    status: str
    vertices: list | None
    expansions: int
    deepest_layer: int
    expanded_log: list | None = None


def _astar(
    graph,
    store: EdgeStateStore,
    starts,
    goals,
    target,
    mults,
    *,
    greedy: bool = False,
    layer: int | None = None,
    deadline: float | None = None,
    prune_bound: float | None = None,
    record: bool = False,
) -> AstarOutcome:
    """Best-first search over the optimistic graph.

    Unknown edges are traversed, invalid edges skipped. Cost-to-come of a
    node already closed may still be lowered but the node is not
    re-opened; stale heap entries are dropped on pop. Reaching any goal
    copy terminates (goal copies are linked by zero-cost vertical edges).
    """
    target_t = tuple(target)
    goal_set = set(goals)
    g: dict = {}
    parent: dict = {}
    closed: set = set()
    heap: list = []
    state_map = store._map
    dist = math.dist
    config_of = graph.config_of
    successors = graph.successors
    expanded_log: list | None = [] if record else None

    for s in starts:
        g[s] = 0.0
        h = dist(config_of(s), target_t)
        f = h if greedy else h * mults[s[0] - 1]
        heapq.heappush(heap, (f, -0.0, s[0], s[1]))

    expansions = 0
    deepest = 0
    while heap:
        f, neg_g, v_layer, v_node = heapq.heappop(heap)
        v = (v_layer, v_node)
        if v in closed:
            continue
        gv = g[v]
        if -neg_g > gv + 1e-15:  # stale entry: g improved after this push
            continue
        closed.add(v)
        expansions += 1
        if v_layer > deepest:
            deepest = v_layer
        if record:
            expanded_log.append((v, gv))
        if expansions & _TIME_CHECK_MASK == 0 and deadline is not None:
            if time.perf_counter() > deadline:
                return AstarOutcome(TIMED_OUT, None, expansions, deepest, expanded_log)
        if v in goal_set:
            path = [v]
            while path[-1] in parent:
                path.append(parent[path[-1]])
            path.reverse()
            return AstarOutcome(PATH, path, expansions, deepest, expanded_log)
        for u_layer, u_node, cost, within in successors(v, layer):
            if within:
                a, b = v_node, u_node
                key = (a, b) if a <= b else (b, a)
                if state_map.get(key, 0) == 2:  # INVALID
                    continue
            u = (u_layer, u_node)
            ng = gv + cost
            old = g.get(u)
            if old is None or ng < old:
                g[u] = ng
                parent[u] = v
                if u not in closed:
                    hq = dist(config_of(u), target_t)
                    if prune_bound is not None and ng + hq >= prune_bound:
                        continue
                    f = hq if greedy else ng + hq * mults[u_layer - 1]
                    heapq.heappush(heap, (f, -ng, u_layer, u_node))
    return AstarOutcome(NO_PATH, None, expansions, deepest, expanded_log)


def astar_optimistic(graph, store, starts, goals, target, params: SearchParams | None = None, *, layer: int | None = None) -> AstarOutcome:
    """Single optimistic search with the layer-inflated heuristic.

    starts/goals are vertex sets (normally every layer copy of the query
    endpoints, all seeded with zero cost-to-come; the zero-cost vertical
    chains make this equivalent to seeding one copy)."""
    params = params or SearchParams()
    deadline = (
        time.perf_counter() + params.time_limit if params.time_limit is not None else None
    )
    return _astar(
        graph,
        store,
        starts,
        goals,
        target,
        params.layer_multipliers(graph),
        layer=layer,
        deadline=deadline,
        record=params.record_expansions,
    )


def check_edges(
    world,
    graph,
    store: EdgeStateStore,
    vertex_path,
    order: str = "random",
    check_seed: int = 0,
    *,
    step: float | None = None,
    swept_cache=None,
    stats: SearchStats | None = None,
    edge_log: list | None = None,
) -> bool:
    """Collision-check the path's within-layer edges in path order.

    Unknown edges are checked against the world; the first failure is
    marked invalid and ends the pass immediately (later edges stay
    unknown), passing edges are marked valid as they go. Known-valid
    edges cost nothing. Returns True iff every edge is valid.
    """
    for v, u in zip(vertex_path[:-1], vertex_path[1:]):
        if v[1] == u[1]:
            continue  # zero-cost vertical hop
        state = store.state(v[1], u[1])
        if state == EdgeState.VALID:
            continue
        if state == EdgeState.INVALID:
            raise AssertionError("optimistic path traversed a known-invalid edge")
        qa = graph.config_of(v)
        qb = graph.config_of(u)
        if swept_cache is not None:
            ok = world.is_edge_valid_cached(swept_cache, qa, qb, step=step)
        else:
            seed = None if order == "inorder" else check_seed + world.edge_check_count
            ok = world.is_edge_valid(qa, qb, order=seed, step=step)
        if stats is not None and v[0] > stats.deepest_layer_checked:
            stats.deepest_layer_checked = v[0]
        if edge_log is not None:
            edge_log.append((v[0], qa, qb, ok))
        if not ok:
            store.set_state(v[1], u[1], EdgeState.INVALID)
            return False
        store.set_state(v[1], u[1], EdgeState.VALID)
    return True


# -- plan loop plumbing ------------------------------------------------------


class _Run:
    """Mutable bookkeeping for one planner invocation."""

    def __init__(self, world, graph, params: SearchParams):
        self.world = world
        self.graph = graph
        self.params = params
        self.stats = SearchStats()
        self.edge_log: list = []
        self.astar_times: list = []
        self.expanded_log: list | None = [] if params.record_expansions else None
        self.t0 = time.perf_counter()
        self._edge_snap = world.edge_check_count
        self._config_snap = world.config_check_count
        self.deadline = (
            self.t0 + params.time_limit if params.time_limit is not None else None
        )

    def endpoint_sets(self, direction: str, layer: int | None = None):
        graph = self.graph
        if layer is not None:
            starts_fwd, goals_fwd = [(layer, START)], [(layer, GOAL)]
        else:
            starts_fwd, goals_fwd = graph.start_copies(), graph.goal_copies()
        if direction == "forward":
            return starts_fwd, goals_fwd, graph.query.q_g
        return goals_fwd, starts_fwd, graph.query.q_s

    def iteration(
        self,
        store,
        direction: str,
        mults,
        *,
        greedy=False,
        layer=None,
        prune_bound=None,
        swept_cache=None,
        deadline=None,
    ):
        """One optimistic search plus one checking pass.

        Returns (status, vertices): status PATH with the validated vertex
        path, "retry" after a failed check, or NO_PATH / TIMED_OUT.
        """
        starts, goals, target = self.endpoint_sets(direction, layer)
        deadline = deadline if deadline is not None else self.deadline
        t_a = time.perf_counter()
        out = _astar(
            self.graph,
            store,
            starts,
            goals,
            target,
            mults,
            greedy=greedy,
            layer=layer,
            deadline=deadline,
            prune_bound=prune_bound,
            record=self.params.record_expansions,
        )
        dt = time.perf_counter() - t_a
        if direction == "forward":
            self.stats.t_forward += dt
        else:
            self.stats.t_backward += dt
        self.astar_times.append((direction, dt))
        self.stats.astar_iterations += 1
        self.stats.expansions += out.expansions
        if out.deepest_layer > self.stats.deepest_layer_expanded:
            self.stats.deepest_layer_expanded = out.deepest_layer
        if self.expanded_log is not None and out.expanded_log:
            self.expanded_log.extend(out.expanded_log)
        if out.status != PATH:
            return out.status, None
        vertices = out.vertices
        if direction == "backward":
            vertices = list(reversed(vertices))
        ok = check_edges(
            self.world,
            self.graph,
            store,
            vertices,
            order=self.params.check_order,
            check_seed=self.params.check_seed,
            step=self.params.check_step,
            swept_cache=swept_cache,
            stats=self.stats,
            edge_log=self.edge_log,
        )
        if ok:
            return PATH, vertices
        if deadline is not None and time.perf_counter() > deadline:
            return TIMED_OUT, None
        return "retry", None

    def finish(self, status: str, vertices=None) -> PlanResult:
        self.stats.edges_checked = self.world.edge_check_count - self._edge_snap
        self.stats.configs_checked = self.world.config_check_count - self._config_snap
        self.stats.wall_time = time.perf_counter() - self.t0
        path = None
        cost = None
        if status == PATH:
            configs = [self.graph.config_of(v) for v in vertices]
            deduped = [configs[0]]
            for c in configs[1:]:
                if c != deduped[-1]:
                    deduped.append(c)
            path = np.array(deduped, dtype=float)
            cost = sum(math.dist(a, b) for a, b in zip(deduped[:-1], deduped[1:]))
        return PlanResult(
            status=status,
            path=path,
            cost=cost,
            stats=self.stats,
            vertex_path=vertices,
            edge_log=self.edge_log,
            astar_times=self.astar_times,
            expanded_log=self.expanded_log,
        )


def _trivial_result(q_s) -> PlanResult:
    return PlanResult(
        status=PATH,
        path=np.asarray([q_s], dtype=float),
        cost=0.0,
        stats=SearchStats(),
        vertex_path=[],
    )


def prepare_query(world, graph, q_s, q_g, store: EdgeStateStore | None = None):
    """Validate endpoints and splice them into the graph.

    Returns (store, trivial_result): trivial_result is a zero-cost path
    when start and goal coincide (no search), otherwise None.
    """
    q_s = np.asarray(q_s, dtype=float)
    q_g = np.asarray(q_g, dtype=float)
    if np.array_equal(q_s, q_g):
        if not world.is_config_valid(q_s):
            raise InvalidConfigurationError("start configuration is invalid")
        return None, _trivial_result(q_s)
    if not world.is_config_valid(q_s):
        raise InvalidConfigurationError("start configuration is invalid")
    if not world.is_config_valid(q_g):
        raise InvalidConfigurationError("goal configuration is invalid")
    store = store if store is not None else EdgeStateStore()
    graph.insert_query(q_s, q_g, store=store)
    return store, None


def plan_sd(world, graph, q_s, q_g, params: SearchParams | None = None, *, store=None, swept_cache=None) -> PlanResult:
    """Repeated optimistic search + edge checking until a valid path.

    Returns the validated path, or NO_PATH once the optimistic graph is
    exhausted at the built density, or TIMED_OUT past the time limit.
    """
    params = params or SearchParams()
    store, trivial = prepare_query(world, graph, q_s, q_g, store)
    if trivial is not None:
        return trivial
    run = _Run(world, graph, params)
    mults = params.layer_multipliers(graph)
    while True:
        status, vertices = run.iteration(
            store, params.direction, mults, swept_cache=swept_cache
        )
        if status == "retry":
            continue
        return run.finish(status, vertices)


def plan_sd_bidirectional(
    world,
    graph,
    q_s,
    q_g,
    params: SearchParams | None = None,
    *,
    policy: str = "balance",
    store=None,
    swept_cache=None,
) -> PlanResult:
    """Lazy search alternating direction between iterations.

    The default policy runs the direction with less accumulated search
    time (clocked around the optimistic search only, not edge checking);
    "alternate" flips direction every iteration as a baseline. Edge
    states are shared between directions.
    """
    params = params or SearchParams()
    if policy not in ("balance", "alternate"):
        raise ValueError(f"unknown policy {policy!r}")
    store, trivial = prepare_query(world, graph, q_s, q_g, store)
    if trivial is not None:
        return trivial
    run = _Run(world, graph, params)
    mults = params.layer_multipliers(graph)
    iteration = 0
    while True:
        if policy == "balance":
            direction = "forward" if run.stats.t_forward <= run.stats.t_backward else "backward"
        else:
            direction = "forward" if iteration % 2 == 0 else "backward"
        iteration += 1
        status, vertices = run.iteration(store, direction, mults, swept_cache=swept_cache)
        if status == "retry":
            continue
        return run.finish(status, vertices)


def plan_sd_anytime(
    world,
    graph,
    q_s,
    q_g,
    params: SearchParams | None = None,
    budget: float = 1.0,
    *,
    store=None,
    swept_cache=None,
) -> PlanResult:
    """First solve, then refine within the budget.

    After a path is found its cost gates node insertion (a node enters
    the open list only if cost-to-come plus admissible cost-to-go beats
    the best cost), so each refinement either strictly improves the path
    or exhausts the open list, at which point the best path is optimal
    over the roadmap. Cost never increases across refinements.
    """
    params = params or SearchParams()
    store, trivial = prepare_query(world, graph, q_s, q_g, store)
    if trivial is not None:
        return trivial
    run = _Run(world, graph, params)
    budget_deadline = run.t0 + budget
    mults = params.layer_multipliers(graph)
    best_vertices = None
    best_cost = None
    while True:  # first solve, under params.time_limit only
        status, vertices = run.iteration(store, params.direction, mults, swept_cache=swept_cache)
        if status == "retry":
            continue
        if status != PATH:
            return run.finish(status)
        best_vertices = vertices
        best_cost = _vertex_path_cost(graph, vertices)
        break
    while time.perf_counter() < budget_deadline:
        status, vertices = run.iteration(
            store,
            params.direction,
            mults,
            prune_bound=best_cost,
            swept_cache=swept_cache,
            deadline=budget_deadline,
        )
        if status == "retry":
            continue
        if status == PATH:
            cost = _vertex_path_cost(graph, vertices)
            if cost < best_cost:
                best_vertices, best_cost = vertices, cost
            continue
        break  # open list exhausted below the bound, or out of time
    return run.finish(PATH, best_vertices)


def _vertex_path_cost(graph, vertices) -> float:
    configs = [graph.config_of(v) for v in vertices]
    return sum(math.dist(a, b) for a, b in zip(configs[:-1], configs[1:]))
