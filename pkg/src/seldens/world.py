"""Occupancy-grid collision world, robot models, and edge validity.

The configuration space is normalized to the unit cube [0, 1)^dims. A 2D
point robot maps a configuration directly onto the grid extent; a planar
arm maps each coordinate affinely to a joint angle in [-pi, pi). Cells
outside the grid are treated as occupied, so any footprint leaving the
grid makes the configuration invalid.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

DEFAULT_CHECK_STEP = 0.02


class DimensionMismatchError(ValueError):
    pass


class UnsupportedRobotError(TypeError):
    pass


@dataclass(frozen=True)
class OccupancyGrid:
    """Immutable boolean occupancy over width x height cells."""

    width: int
    height: int
    resolution: float
    occupied: np.ndarray  # bool, shape (width, height), indexed [x, y]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        occ = np.asarray(self.occupied, dtype=bool)
        if occ.shape != (self.width, self.height):
            raise ValueError(
                f"occupancy shape {occ.shape} != ({self.width}, {self.height})"
            )
        occ = occ.copy()
        occ.setflags(write=False)
        object.__setattr__(self, "occupied", occ)

    @classmethod
    def empty(cls, width: int, height: int, resolution: float) -> "OccupancyGrid":
        return cls(width, height, resolution, np.zeros((width, height), dtype=bool))

    @classmethod
    def from_rects(
        cls, width: int, height: int, resolution: float, rects
    ) -> "OccupancyGrid":
        """Build from inclusive cell-range rectangles (x0, y0, x1, y1)."""
        occ = np.zeros((width, height), dtype=bool)
        for x0, y0, x1, y1 in rects:
            if not (0 <= x0 <= x1 < width and 0 <= y0 <= y1 < height):
                raise ValueError(f"rectangle {(x0, y0, x1, y1)} out of grid bounds")
            occ[x0 : x1 + 1, y0 : y1 + 1] = True
        return cls(width, height, resolution, occ)

    @property
    def extent(self) -> tuple[float, float]:
        """Workspace size in meters."""
        return (self.width * self.resolution, self.height * self.resolution)


class PointRobot:
    """Disk robot in a 2D workspace; radius 0 degenerates to a single cell."""

    def __init__(self, radius: float = 0.0):
        if radius < 0:
            raise ValueError("radius must be >= 0")
        self.radius = radius
        self.cspace_dims = 2

    def workspace_point(self, grid: OccupancyGrid, q) -> tuple[float, float]:
        w, h = grid.extent
        return (q[0] * w, q[1] * h)

    def footprint(self, grid: OccupancyGrid, q) -> tuple[np.ndarray, bool]:
        """Cells intersecting the robot disk and an out-of-grid flag.

        Returned cells are an (m, 2) int array; the flag is True when the
        disk extends past the grid extent (treated as collision).
        """
        px, py = self.workspace_point(grid, q)
        res = grid.resolution
        r = self.radius
        if r == 0.0:
            cx = int(px / res)
            cy = int(py / res)
            oob = not (0 <= cx < grid.width and 0 <= cy < grid.height)
            if oob:
                return np.empty((0, 2), dtype=np.int64), True
            return np.array([[cx, cy]], dtype=np.int64), False
        w_m, h_m = grid.extent
        if px - r < 0 or py - r < 0 or px + r > w_m or py + r > h_m:
            return np.empty((0, 2), dtype=np.int64), True
        x_lo = int((px - r) / res)
        x_hi = int((px + r) / res)
        y_lo = int((py - r) / res)
        y_hi = int((py + r) / res)
        xs = np.arange(x_lo, min(x_hi, grid.width - 1) + 1)
        ys = np.arange(y_lo, min(y_hi, grid.height - 1) + 1)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        # Distance from the disk center to each candidate cell rectangle.
        dx = np.maximum(np.maximum(gx * res - px, px - (gx + 1) * res), 0.0)
        dy = np.maximum(np.maximum(gy * res - py, py - (gy + 1) * res), 0.0)
        keep = dx * dx + dy * dy <= r * r
        cells = np.stack([gx[keep], gy[keep]], axis=1).astype(np.int64)
        return cells, False


class PlanarArm:
    """Planar serial arm with cumulative joint angles, rasterized link footprints.

    Each unit-cube coordinate maps affinely to a joint angle in [-pi, pi);
    angular wrap-around is not used, so the C-space metric stays Euclidean.
    Link segments are rasterized with a supercover traversal and dilated by
    one cell for a conservative footprint.
    """

    def __init__(self, link_lengths, base: tuple[float, float]):
        lengths = [float(v) for v in link_lengths]
        if not lengths or any(v <= 0 for v in lengths):
            raise ValueError("link lengths must be positive")
        self.link_lengths = lengths
        self.base = (float(base[0]), float(base[1]))
        self.cspace_dims = len(lengths)

    def joint_angles(self, q) -> list[float]:
        return [-math.pi + 2.0 * math.pi * qi for qi in q]

    def joint_points(self, q) -> list[tuple[float, float]]:
        """Base plus successive joint positions in workspace meters."""
        pts = [self.base]
        angle = 0.0
        x, y = self.base
        for theta, length in zip(self.joint_angles(q), self.link_lengths):
            angle += theta
            x += length * math.cos(angle)
            y += length * math.sin(angle)
            pts.append((x, y))
        return pts

    def workspace_point(self, grid: OccupancyGrid, q) -> tuple[float, float]:
        """End-effector position (used for 2D visualization)."""
        return self.joint_points(q)[-1]

    def footprint(self, grid: OccupancyGrid, q) -> tuple[np.ndarray, bool]:
        pts = self.joint_points(q)
        res = grid.resolution
        cells: set[tuple[int, int]] = set()
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            for cx, cy in _supercover_cells(x0 / res, y0 / res, x1 / res, y1 / res):
                cells.add((cx, cy))
        dilated: set[tuple[int, int]] = set()
        for cx, cy in cells:
            for ox in (-1, 0, 1):
                for oy in (-1, 0, 1):
                    dilated.add((cx + ox, cy + oy))
        out = np.array(sorted(dilated), dtype=np.int64).reshape(-1, 2)
        oob = bool(
            (out[:, 0] < 0).any()
            or (out[:, 1] < 0).any()
            or (out[:, 0] >= grid.width).any()
            or (out[:, 1] >= grid.height).any()
        )
        if oob:
            return np.empty((0, 2), dtype=np.int64), True
        return out, False


def _supercover_cells(x0, y0, x1, y1):
    """All integer cells a segment touches, in grid-cell units.

    Amanatides-Woo traversal by boundary-crossing parameter; near-corner
    crossings emit both axis-adjacent cells so the cover stays
    conservative. Terminates because every step advances a crossing
    parameter by a fixed positive amount.
    """
    cx, cy = int(math.floor(x0)), int(math.floor(y0))
    cells = [(cx, cy)]
    dx, dy = x1 - x0, y1 - y0
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    t_max_x = ((cx + (step_x > 0)) - x0) / dx if dx != 0 else math.inf
    t_max_y = ((cy + (step_y > 0)) - y0) / dy if dy != 0 else math.inf
    t_dx = abs(1.0 / dx) if dx != 0 else math.inf
    t_dy = abs(1.0 / dy) if dy != 0 else math.inf
    while min(t_max_x, t_max_y) <= 1.0:
        if abs(t_max_x - t_max_y) < 1e-12:
            cells.append((cx + step_x, cy))
            cells.append((cx, cy + step_y))
            cx += step_x
            cy += step_y
            t_max_x += t_dx
            t_max_y += t_dy
        elif t_max_x < t_max_y:
            cx += step_x
            t_max_x += t_dx
        else:
            cy += step_y
            t_max_y += t_dy
        cells.append((cx, cy))
    cells.append((int(math.floor(x1)), int(math.floor(y1))))
    return cells


def discretize(q1, q2, step: float) -> np.ndarray:
    """Evenly spaced configurations along a segment, endpoints inclusive.

    Emits ceil(||q1 - q2|| / step) + 1 configurations with consecutive
    spacing <= step. The parameterization always runs from the
    lexicographically smaller endpoint so both argument orders yield the
    same lattice (reversed), making edge checks bit-exactly symmetric.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    a = np.asarray(q1, dtype=float)
    b = np.asarray(q2, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    dist = float(np.linalg.norm(b - a))
    if dist == 0.0:
        return a[np.newaxis, :].copy()
    swapped = tuple(b) < tuple(a)
    if swapped:
        a, b = b, a
    n_intervals = math.ceil(dist / step)
    t = np.linspace(0.0, 1.0, n_intervals + 1)
    pts = a[np.newaxis, :] + t[:, np.newaxis] * (b - a)[np.newaxis, :]
    pts[0] = a
    pts[-1] = b
    if swapped:
        pts = pts[::-1].copy()
    return pts


class SweptCache:
    """Environment-independent swept footprints keyed by config pair.

    The cached cell set is the union of per-configuration footprints along
    the discretized edge, so it depends only on the robot, the grid
    geometry, and the discretization step; the obstacle content is
    intersected at query time.
    """

    def __init__(self):
        self._cells: dict[tuple, np.ndarray] = {}
        self._oob: dict[tuple, bool] = {}

    @staticmethod
    def key(q1, q2) -> tuple:
        a, b = tuple(float(v) for v in q1), tuple(float(v) for v in q2)
        return (a, b) if a <= b else (b, a)

    def __len__(self) -> int:
        return len(self._cells)

    def __contains__(self, key) -> bool:
        return key in self._cells

    def get(self, key):
        if key not in self._cells:
            return None
        return self._cells[key], self._oob[key]

    def put(self, key, cells: np.ndarray, oob: bool):
        self._cells[key] = cells
        self._oob[key] = oob


class CollisionWorld:
    """Collision queries against one grid with one robot model.

    The grid and robot are immutable and shareable; the check counters are
    per-query state, so parallel trials should each own their own wrapper
    over the shared grid.
    """

    def __init__(self, grid: OccupancyGrid, robot, check_step: float = DEFAULT_CHECK_STEP):
        if check_step <= 0:
            raise ValueError("check_step must be positive")
        self.grid = grid
        self.robot = robot
        self.check_step = check_step
        self.config_check_count = 0
        self.edge_check_count = 0
        self._occ_rects = None  # lazy (4, k) array of occupied cell bounds, meters

    @property
    def dims(self) -> int:
        return self.robot.cspace_dims

    def _require_dims(self, q):
        if len(q) != self.dims:
            raise DimensionMismatchError(
                f"configuration has {len(q)} dims, robot expects {self.dims}"
            )

    def _config_free(self, q) -> bool:
        for qi in q:
            if not (0.0 <= qi < 1.0):
                return False
        cells, oob = self.robot.footprint(self.grid, q)
        if oob:
            return False
        return not self.grid.occupied[cells[:, 0], cells[:, 1]].any()

    def is_config_valid(self, q) -> bool:
        """True iff the footprint of q avoids every occupied cell."""
        self._require_dims(q)
        self.config_check_count += 1
        return self._config_free(q)

    def _points_free(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized validity for a batch of in-cube configurations."""
        if isinstance(self.robot, PointRobot) and self.robot.radius == 0.0:
            in_cube = ((pts >= 0.0) & (pts < 1.0)).all(axis=1)
            cx = np.floor(pts[:, 0] * self.grid.width).astype(np.int64)
            cy = np.floor(pts[:, 1] * self.grid.height).astype(np.int64)
            cx = np.clip(cx, 0, self.grid.width - 1)
            cy = np.clip(cy, 0, self.grid.height - 1)
            return in_cube & ~self.grid.occupied[cx, cy]
        return np.array([self._config_free(p) for p in pts], dtype=bool)

    def is_edge_valid(self, q1, q2, order=None, step: float | None = None) -> bool:
        """Check the densely discretized segment between q1 and q2.

        order: None checks configurations along the edge in order; an int
        seed checks them in a seeded random permutation, which tends to
        find collisions sooner. The boolean result is order-independent.
        Counts one edge check plus one config check per configuration
        examined before the first collision.
        """
        self._require_dims(q1)
        self._require_dims(q2)
        self.edge_check_count += 1
        pts = discretize(q1, q2, step if step is not None else self.check_step)
        valid = self._points_free(pts)
        n = len(pts)
        if order is None:
            indices = range(n)
        else:
            indices = list(range(n))
            random.Random(order).shuffle(indices)
        checked = 0
        ok = True
        for i in indices:
            checked += 1
            if not valid[i]:
                ok = False
                break
        self.config_check_count += checked
        return ok

    def swept_footprint(self, q1, q2, step: float | None = None):
        """Union of footprints along the discretized edge, plus an OOB flag."""
        pts = discretize(q1, q2, step if step is not None else self.check_step)
        all_cells: set[tuple[int, int]] = set()
        for p in pts:
            for qi in p:
                if not (0.0 <= qi < 1.0):
                    return np.empty((0, 2), dtype=np.int64), True
            cells, oob = self.robot.footprint(self.grid, p)
            if oob:
                return np.empty((0, 2), dtype=np.int64), True
            all_cells.update(map(tuple, cells))
        return np.array(sorted(all_cells), dtype=np.int64).reshape(-1, 2), False

    def is_edge_valid_cached(self, cache: SweptCache, q1, q2, step: float | None = None) -> bool:
        """Edge validity via the swept-footprint cache.

        On a hit the cached cells are intersected with the current grid
        without any new config checks; on a miss the footprint union is
        computed (counting its config checks), inserted, and used. Always
        agrees with is_edge_valid for the same edge.
        """
        self._require_dims(q1)
        self._require_dims(q2)
        self.edge_check_count += 1
        key = SweptCache.key(q1, q2)
        hit = cache.get(key)
        if hit is None:
            pts_count = len(discretize(q1, q2, step if step is not None else self.check_step))
            cells, oob = self.swept_footprint(q1, q2, step)
            self.config_check_count += pts_count
            cache.put(key, cells, oob)
        else:
            cells, oob = hit
        if oob:
            return False
        if len(cells) == 0:
            return True
        return not self.grid.occupied[cells[:, 0], cells[:, 1]].any()

    def _occupied_rects(self) -> np.ndarray:
        if self._occ_rects is None:
            xs, ys = np.nonzero(self.grid.occupied)
            res = self.grid.resolution
            self._occ_rects = np.stack(
                [xs * res, ys * res, (xs + 1) * res, (ys + 1) * res], axis=0
            )
        return self._occ_rects

    def clearance(self, q) -> float:
        """C-space distance from q to the nearest invalid configuration.

        Point robot only. Computed from exact point-to-cell distances over
        the occupied cells and the grid border, minus the robot radius,
        normalized conservatively by the larger workspace extent, and
        clamped at zero. A ball of the returned radius around q is
        guaranteed collision-free.
        """
        self._require_dims(q)
        if not isinstance(self.robot, PointRobot):
            raise UnsupportedRobotError("clearance requires a point robot")
        if not self._config_free(q):
            return 0.0
        px, py = self.robot.workspace_point(self.grid, q)
        w_m, h_m = self.grid.extent
        d_border = min(px, w_m - px, py, h_m - py)
        rects = self._occupied_rects()
        if rects.shape[1] > 0:
            dx = np.maximum(np.maximum(rects[0] - px, px - rects[2]), 0.0)
            dy = np.maximum(np.maximum(rects[1] - py, py - rects[3]), 0.0)
            d_occ = float(np.sqrt(dx * dx + dy * dy).min())
        else:
            d_occ = math.inf
        d = min(d_occ, d_border) - self.robot.radius
        return max(0.0, d / max(w_m, h_m))

    def path_clearance(self, path) -> float:
        """Minimum clearance over the densely discretized path."""
        path = np.asarray(path, dtype=float)
        if path.ndim != 2:
            raise ValueError("path must be a (m, dims) array")
        if len(path) == 1:
            return self.clearance(path[0])
        best = math.inf
        for a, b in zip(path[:-1], path[1:]):
            for p in discretize(a, b, self.check_step):
                best = min(best, self.clearance(p))
        return best
