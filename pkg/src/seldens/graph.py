"""Layered roadmap: nested r-disk graphs joined by zero-cost vertical edges.

Layer i holds the first n_i = 2^i configurations of the source sequence
with connection radius r_i chosen for a target expected degree. Copies of
the same configuration on adjacent layers are linked by zero-cost edges,
so moving between densities is free while within-layer edges cost their
Euclidean length. Start and goal are spliced into every layer at query
time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

# Reserved node ids for the query endpoints; present on every layer.
START = -1
GOAL = -2


class DegenerateQueryError(ValueError):
    pass


class EdgeState(IntEnum):
    UNKNOWN = 0
    VALID = 1
    INVALID = 2


@dataclass(frozen=True)
class Edge:
    """Graph edge between two (layer, node) vertices."""

    u: tuple[int, int]
    v: tuple[int, int]
    kind: str  # "within" | "inter"
    cost: float


class EdgeStateStore:
    """Per-query map from canonical node pair to collision state.

    The key is the unordered node-index pair, so a state set on one layer
    is shared by every layer carrying the same configuration pair (edge
    validity depends only on the endpoint configurations). States move
    from UNKNOWN to VALID or INVALID exactly once. Inter-layer edges are
    valid by construction and never stored.
    """

    def __init__(self):
        self._map: dict[tuple[int, int], int] = {}

    @staticmethod
    def key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a <= b else (b, a)

    def state(self, a: int, b: int) -> EdgeState:
        return EdgeState(self._map.get(self.key(a, b), 0))

    def set_state(self, a: int, b: int, state: EdgeState):
        if a == b:
            raise ValueError("inter-layer edges are never stored")
        if state == EdgeState.UNKNOWN:
            raise ValueError("cannot set an edge back to UNKNOWN")
        key = self.key(a, b)
        prev = self._map.get(key, 0)
        if prev != 0 and prev != int(state):
            raise AssertionError(
                f"edge {key} already {EdgeState(prev).name}, cannot set {state.name}"
            )
        self._map[key] = int(state)

    def reset_sentinels(self):
        """Drop states involving the query endpoints (called on re-query)."""
        self._map = {k: v for k, v in self._map.items() if k[0] >= 0}

    def items(self):
        return [(k, EdgeState(v)) for k, v in self._map.items()]

    def __len__(self) -> int:
        return len(self._map)


def unit_ball_volume(dims: int) -> float:
    return math.pi ** (dims / 2.0) / math.gamma(dims / 2.0 + 1.0)


def connection_radius(n_i: int, dims: int, target_degree: float) -> float:
    """Radius giving an expected degree of target_degree for n_i uniform
    points in the unit cube (boundary effects ignored)."""
    if n_i < 1 or dims < 1 or target_degree <= 0:
        raise ValueError("n_i >= 1, dims >= 1 and target_degree > 0 required")
    return (target_degree / (n_i * unit_ball_volume(dims))) ** (1.0 / dims)


class _BucketIndex:
    """Uniform grid buckets with cell size equal to the query radius."""

    def __init__(self, points: np.ndarray, radius: float):
        self.points = points
        self.radius = radius
        self._cells: dict[tuple, list[int]] = {}
        keys = np.floor(points / radius).astype(np.int64)
        for idx, key in enumerate(map(tuple, keys)):
            self._cells.setdefault(key, []).append(idx)
        self._offsets = list(
            np.ndindex(*([3] * points.shape[1]))
        )  # 3^dims neighbor offsets

    def within(self, q: np.ndarray, exclude: int | None = None) -> list[tuple[int, float]]:
        """Indices (and distances) of points strictly within the radius of q,
        ascending by index."""
        base = np.floor(q / self.radius).astype(np.int64)
        found: list[tuple[int, float]] = []
        r = self.radius
        pts = self.points
        for off in self._offsets:
            key = tuple(base[d] + off[d] - 1 for d in range(len(base)))
            bucket = self._cells.get(key)
            if not bucket:
                continue
            for idx in bucket:
                if idx == exclude:
                    continue
                d = float(np.linalg.norm(pts[idx] - q))
                if d < r:
                    found.append((idx, d))
        found.sort()
        return found


class LayeredGraph:
    """Immutable multi-density roadmap plus a mutable query slot.

    Everything except the query slot is fixed after build and safe to
    share across threads; each query owns the slot and its edge-state
    store, so concurrent queries should clone the graph (the config table
    is shared storage).
    """

    def __init__(self, dims, D, seed, target_degree, configs, precompute_threshold=4096):
        self.dims = dims
        self.D = D
        self.seed = seed
        self.target_degree = target_degree
        self.configs = np.asarray(configs, dtype=float)
        self.configs.setflags(write=False)
        self.layer_sizes = [2**i for i in range(1, D + 1)]
        if self.configs.shape != (self.layer_sizes[-1], dims):
            raise ValueError("config table size must be (2^D, dims)")
        self.radii = [
            connection_radius(n, dims, target_degree) for n in self.layer_sizes
        ]
        for r_prev, r_next in zip(self.radii, self.radii[1:]):
            assert r_next < r_prev, "radii must strictly decrease with density"
        self._configs_t = [tuple(c) for c in self.configs]
        self._index = [
            _BucketIndex(self.configs[:n], r)
            for n, r in zip(self.layer_sizes, self.radii)
        ]
        self._adj: list[list[list[tuple[int, float]]] | None] = []
        for layer in range(1, D + 1):
            n = self.layer_sizes[layer - 1]
            if n <= precompute_threshold:
                self._adj.append(self._build_adjacency(layer))
            else:
                self._adj.append(None)
        self._adj_memo: dict[tuple[int, int], list[tuple[int, float]]] = {}
        self.query = None
        self._succ_memo: dict = {}

    # -- construction ----------------------------------------------------

    @classmethod
    def build(cls, source, D: int, target_degree: float = 30.0, precompute_threshold: int = 4096):
        """Build from the first 2^D configurations of a sequence source.

        Deterministic in (source seed, D, target_degree). The source needs
        a `dims` attribute and either `prefix(count)` or `config_at(index)`.
        """
        if D < 1:
            raise ValueError("D must be >= 1")
        n_total = 2**D
        if hasattr(source, "prefix"):
            configs = source.prefix(n_total)
        else:
            configs = np.stack([source.config_at(i + 1) for i in range(n_total)])
        seed = getattr(source, "seed", 0)
        return cls(source.dims, D, seed, target_degree, configs, precompute_threshold)

    def _build_adjacency(self, layer: int) -> list[list[tuple[int, float]]]:
        n = self.layer_sizes[layer - 1]
        r = self.radii[layer - 1]
        pts = self.configs[:n]
        index = self._index[layer - 1]
        adj: list[list[tuple[int, float]]] = []
        for j in range(n):
            adj.append(index.within(pts[j], exclude=j))
        return adj

    # -- lookups ----------------------------------------------------------

    def n_of(self, layer: int) -> int:
        return self.layer_sizes[layer - 1]

    def r_of(self, layer: int) -> float:
        return self.radii[layer - 1]

    def config_of(self, v: tuple[int, int]):
        """Configuration tuple of a vertex; identical across its layer copies."""
        node = v[1]
        if node == START:
            return self.query.q_s_t
        if node == GOAL:
            return self.query.q_g_t
        return self._configs_t[node]

    def _layer_adjacency(self, layer: int, j: int) -> list[tuple[int, float]]:
        adj = self._adj[layer - 1]
        if adj is not None:
            return adj[j]
        key = (layer, j)
        memo = self._adj_memo.get(key)
        if memo is None:
            memo = self._index[layer - 1].within(self.configs[j], exclude=j)
            self._adj_memo[key] = memo
        return memo

    # -- query insertion ---------------------------------------------------

    def insert_query(self, q_s, q_g, store: EdgeStateStore | None = None):
        """Splice start/goal vertices into every layer.

        Adds 2D vertices (one start and one goal copy per layer) chained by
        zero-cost vertical edges, with within-layer edges to every node
        inside the layer radius. Replaces any previous query; sentinel
        edge states in `store`, if given, are reset.
        """
        q_s = np.asarray(q_s, dtype=float)
        q_g = np.asarray(q_g, dtype=float)
        if q_s.shape != (self.dims,) or q_g.shape != (self.dims,):
            raise ValueError(f"query configurations must have {self.dims} dims")
        if np.array_equal(q_s, q_g):
            raise DegenerateQueryError("start and goal configurations are identical")
        s_near = []
        g_near = []
        for layer in range(1, self.D + 1):
            idx = self._index[layer - 1]
            s_near.append(dict(idx.within(q_s)))
            g_near.append(dict(idx.within(q_g)))
        sg_dist = float(np.linalg.norm(q_s - q_g))
        self.query = _QuerySlot(
            q_s=q_s,
            q_g=q_g,
            q_s_t=tuple(q_s),
            q_g_t=tuple(q_g),
            s_near=s_near,
            g_near=g_near,
            sg_dist=sg_dist,
        )
        self._succ_memo.clear()
        if store is not None:
            store.reset_sentinels()

    # -- traversal ----------------------------------------------------------

    def successors(self, v: tuple[int, int], layer_restrict: int | None = None):
        """Successor tuples (layer, node, cost, within_layer) of a vertex.

        Deterministic order: within-layer neighbors ascending by node
        index, then start/goal sentinels, then the vertical copy one layer
        up (sparser) followed by one layer down (denser). layer_restrict
        drops the vertical moves for single-layer searches.
        """
        key = (v, layer_restrict)
        memo = self._succ_memo.get(key)
        if memo is not None:
            return memo
        layer, node = v
        out = []
        q = self.query
        if node == START or node == GOAL:
            if q is None:
                raise ValueError("no query inserted")
            near = q.s_near[layer - 1] if node == START else q.g_near[layer - 1]
            for j, d in sorted(near.items()):
                out.append((layer, j, d, True))
            if q.sg_dist < self.radii[layer - 1]:
                other = GOAL if node == START else START
                out.append((layer, other, q.sg_dist, True))
            if layer_restrict is None:
                if layer > 1:
                    out.append((layer - 1, node, 0.0, False))
                if layer < self.D:
                    out.append((layer + 1, node, 0.0, False))
        else:
            for j, d in self._layer_adjacency(layer, node):
                out.append((layer, j, d, True))
            if q is not None:
                r = self.radii[layer - 1]
                ds = q.s_near[layer - 1].get(node)
                if ds is not None:
                    out.append((layer, START, ds, True))
                dg = q.g_near[layer - 1].get(node)
                if dg is not None:
                    out.append((layer, GOAL, dg, True))
            if layer_restrict is None:
                if layer > 1 and node < self.layer_sizes[layer - 2]:
                    out.append((layer - 1, node, 0.0, False))
                if layer < self.D:
                    out.append((layer + 1, node, 0.0, False))
        self._succ_memo[key] = out
        return out

    def neighbors(self, v: tuple[int, int]):
        """All (Edge, vertex) pairs incident to v, in deterministic order."""
        out = []
        for layer, node, cost, within in self.successors(v):
            u = (layer, node)
            kind = "within" if within else "inter"
            out.append((Edge(u=v, v=u, kind=kind, cost=cost), u))
        return out

    def start_copies(self) -> list[tuple[int, int]]:
        return [(layer, START) for layer in range(1, self.D + 1)]

    def goal_copies(self) -> list[tuple[int, int]]:
        return [(layer, GOAL) for layer in range(1, self.D + 1)]

    # -- serialization -------------------------------------------------------

    def save(self, path):
        """Header JSON line, then the config table as little-endian float64."""
        header = {
            "dims": self.dims,
            "D": self.D,
            "seed": self.seed,
            "target_degree": self.target_degree,
        }
        with open(path, "wb") as fh:
            fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
            fh.write(b"\n")
            fh.write(np.ascontiguousarray(self.configs, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path, precompute_threshold: int = 4096) -> "LayeredGraph":
        with open(path, "rb") as fh:
            header = json.loads(fh.readline().decode("utf-8"))
            raw = fh.read()
        dims, D = header["dims"], header["D"]
        configs = np.frombuffer(raw, dtype="<f8").reshape(2**D, dims)
        return cls(
            dims,
            D,
            header["seed"],
            header["target_degree"],
            configs.astype(float),
            precompute_threshold,
        )

    # -- statistics -----------------------------------------------------------

    def layer_edge_count(self, layer: int) -> int:
        n = self.layer_sizes[layer - 1]
        return sum(len(self._layer_adjacency(layer, j)) for j in range(n)) // 2

    def layer_mean_degree(self, layer: int) -> float:
        n = self.layer_sizes[layer - 1]
        return 2.0 * self.layer_edge_count(layer) / n

    def layer_edges(self, layer: int):
        """Within-layer edges as (j, k, dist) with j < k."""
        n = self.layer_sizes[layer - 1]
        for j in range(n):
            for k, d in self._layer_adjacency(layer, j):
                if k > j:
                    yield (j, k, d)


class _QuerySlot:
    __slots__ = ("q_s", "q_g", "q_s_t", "q_g_t", "s_near", "g_near", "sg_dist")

    def __init__(self, q_s, q_g, q_s_t, q_g_t, s_near, g_near, sg_dist):
        self.q_s = q_s
        self.q_g = q_g
        self.q_s_t = q_s_t
        self.q_g_t = q_g_t
        self.s_near = s_near
        self.g_near = g_near
        self.sg_dist = sg_dist
