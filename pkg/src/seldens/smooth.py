"""Shortcut smoothing: splice in random straight segments that check out.

Cut points are drawn by arc length rather than at vertices, so shortcuts
can begin and end inside segments and the output is no longer confined to
roadmap edges. Cost is non-increasing, endpoints never move, and the
result is deterministic in the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# A splice must beat the arc it replaces by this margin, which keeps the
# cost-descent accounting finite.
_MIN_GAIN = 1e-12


@dataclass
class SmoothParams:
    iterations: int = 500
    rng_seed: int = 0
    check_step: float | None = None  # None: use the world's step

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def shortcut(world, path, params: SmoothParams | None = None) -> np.ndarray:
    """Repeatedly try to replace a random sub-arc with a straight segment.

    Expects every existing segment of `path` to be valid; returns a path
    with cost <= the input cost whose segments all validate. Paths with
    fewer than two configurations are returned unchanged.
    """
    params = params or SmoothParams()
    pts = [np.asarray(p, dtype=float) for p in np.asarray(path, dtype=float)]
    if len(pts) < 2:
        return np.asarray(path, dtype=float)
    rng = np.random.Generator(np.random.PCG64(params.rng_seed))
    seg_len = [math.dist(a, b) for a, b in zip(pts[:-1], pts[1:])]
    total = sum(seg_len)
    if total <= 0.0:
        return np.array(pts)
    for _ in range(params.iterations):
        u = rng.random(2) * total
        t1, t2 = (float(u.min()), float(u.max()))
        if t2 - t1 <= _MIN_GAIN:
            continue
        i1, p1 = _point_at(pts, seg_len, t1)
        i2, p2 = _point_at(pts, seg_len, t2)
        direct = math.dist(p1, p2)
        if direct >= (t2 - t1) - _MIN_GAIN:
            continue
        if not world.is_edge_valid(p1, p2, step=params.check_step):
            continue
        # The flanking pieces are collinear with previously valid segments
        # but re-discretize on their own lattice, so they must pass their
        # own check before the splice is accepted.
        if math.dist(pts[i1], p1) > 1e-15 and not world.is_edge_valid(
            pts[i1], p1, step=params.check_step
        ):
            continue
        if math.dist(p2, pts[i2 + 1]) > 1e-15 and not world.is_edge_valid(
            p2, pts[i2 + 1], step=params.check_step
        ):
            continue
        new_pts = pts[: i1 + 1] + [p1, p2] + pts[i2 + 1 :]
        pts = [new_pts[0]]
        for p in new_pts[1:]:
            if math.dist(p, pts[-1]) > 1e-15:
                pts.append(p)
        seg_len = [math.dist(a, b) for a, b in zip(pts[:-1], pts[1:])]
        total = sum(seg_len)
    return np.array(pts)


def _point_at(pts, seg_len, t: float):
    """Segment index and interpolated point at arc-length parameter t."""
    acc = 0.0
    for i, length in enumerate(seg_len):
        if t <= acc + length or i == len(seg_len) - 1:
            frac = (t - acc) / length if length > 0 else 0.0
            frac = min(max(frac, 0.0), 1.0)
            return i, pts[i] + frac * (pts[i + 1] - pts[i])
        acc += length
    raise AssertionError("unreachable")


def path_cost(path) -> float:
    """Summed Euclidean length of a configuration sequence."""
    pts = np.asarray(path, dtype=float)
    if len(pts) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
