import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import edt_clearance, point_config_free, point_edge_free
from seldens.world import (
    CollisionWorld,
    DimensionMismatchError,
    OccupancyGrid,
    PlanarArm,
    PointRobot,
    SweptCache,
    UnsupportedRobotError,
    discretize,
)


def make_world(rects=(), size=20, radius=0.0, check_step=0.02):
    grid = OccupancyGrid.from_rects(size, size, 1.0 / size, rects)
    return CollisionWorld(grid, PointRobot(radius), check_step=check_step)


# -- config validity ---------------------------------------------------------


def test_empty_grid_everything_valid():
    world = make_world()
    for q in ([0.01, 0.01], [0.5, 0.5], [0.99, 0.99]):
        assert world.is_config_valid(q)


def test_full_grid_everything_invalid():
    grid = OccupancyGrid(4, 4, 0.25, np.ones((4, 4), dtype=bool))
    world = CollisionWorld(grid, PointRobot(0.0))
    for q in ([0.1, 0.1], [0.5, 0.5], [0.9, 0.9]):
        assert not world.is_config_valid(q)


def test_point_robot_in_single_occupied_cell():
    world = make_world(rects=[(10, 10, 10, 10)], size=20)
    # center of cell (10, 10) in a 20x20 grid
    assert not world.is_config_valid([0.525, 0.525])
    assert world.is_config_valid([0.475, 0.525])


def test_out_of_cube_rejected():
    world = make_world()
    assert not world.is_config_valid([1.0, 0.5])
    assert not world.is_config_valid([-0.01, 0.5])


def test_dimension_mismatch():
    world = make_world()
    with pytest.raises(DimensionMismatchError):
        world.is_config_valid([0.1, 0.2, 0.3])
    with pytest.raises(DimensionMismatchError):
        world.is_edge_valid([0.1], [0.2])


def test_config_check_counter():
    world = make_world()
    world.is_config_valid([0.1, 0.1])
    world.is_config_valid([0.2, 0.2])
    assert world.config_check_count == 2


def test_disk_footprint_matches_bruteforce():
    grid = OccupancyGrid.empty(20, 20, 0.05)
    robot = PointRobot(0.08)
    q = [0.43, 0.57]
    cells, oob = robot.footprint(grid, q)
    assert not oob
    px, py = q[0], q[1]  # extent is 1.0 so workspace == unit coords
    expected = set()
    for cx in range(20):
        for cy in range(20):
            dx = max(cx * 0.05 - px, px - (cx + 1) * 0.05, 0.0)
            dy = max(cy * 0.05 - py, py - (cy + 1) * 0.05, 0.0)
            if dx * dx + dy * dy <= 0.08 * 0.08:
                expected.add((cx, cy))
    assert set(map(tuple, cells)) == expected


def test_disk_touching_border_is_invalid():
    world = make_world(radius=0.1)
    assert not world.is_config_valid([0.05, 0.5])  # disk pokes past x=0
    assert world.is_config_valid([0.2, 0.5])


# -- discretize ---------------------------------------------------------------


def test_discretize_zero_length():
    pts = discretize([0.3, 0.4], [0.3, 0.4], 0.1)
    assert pts.shape == (1, 2)


def test_discretize_exact_division():
    pts = discretize([0.0, 0.0], [1.0, 0.0], 0.25)
    assert pts.shape == (5, 2)
    np.testing.assert_allclose(pts[:, 0], [0, 0.25, 0.5, 0.75, 1.0])


def test_discretize_ceil_behavior():
    pts = discretize([0.0, 0.0], [0.3, 0.0], 0.2)
    assert pts.shape == (3, 2)  # ceil(1.5) + 1
    spacing = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    np.testing.assert_allclose(spacing, 0.15)


def test_discretize_symmetric_lattice():
    a, b = [0.12, 0.77], [0.91, 0.13]
    fwd = discretize(a, b, 0.07)
    rev = discretize(b, a, 0.07)
    np.testing.assert_array_equal(fwd, rev[::-1])


@given(
    st.lists(st.floats(0, 0.999), min_size=2, max_size=2),
    st.lists(st.floats(0, 0.999), min_size=2, max_size=2),
    st.floats(0.01, 0.5),
)
@settings(max_examples=60, deadline=None)
def test_discretize_spacing_property(a, b, step):
    pts = discretize(a, b, step)
    assert np.array_equal(pts[0], np.asarray(a)) or np.allclose(pts[0], a)
    assert np.allclose(pts[-1], b)
    if len(pts) > 1:
        spacing = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        assert (spacing <= step + 1e-12).all()


# -- edge validity ------------------------------------------------------------


def test_edge_valid_empty_grid():
    world = make_world()
    assert world.is_edge_valid([0.05, 0.05], [0.95, 0.95])


def test_edge_midpoint_blocked_under_both_orders():
    world = make_world(rects=[(9, 9, 10, 10)], size=20)
    q1, q2 = [0.1, 0.5], [0.9, 0.5]
    assert not world.is_edge_valid(q1, q2, order=None)
    for seed in range(5):
        assert not world.is_edge_valid(q1, q2, order=seed)
    assert not point_edge_free(world.grid, q1, q2, world.check_step)


def test_edge_symmetry():
    rng = np.random.default_rng(5)
    world = make_world(rects=[(4, 4, 8, 12), (12, 2, 14, 17)], size=20)
    for _ in range(50):
        q1, q2 = rng.random(2), rng.random(2)
        assert world.is_edge_valid(q1, q2) == world.is_edge_valid(q2, q1)


def test_edge_order_independence_random_instances():
    rng = np.random.default_rng(6)
    world = make_world(rects=[(6, 0, 8, 14)], size=20)
    for trial in range(40):
        q1, q2 = rng.random(2), rng.random(2)
        in_order = world.is_edge_valid(q1, q2, order=None)
        randomized = world.is_edge_valid(q1, q2, order=trial)
        assert in_order == randomized
        assert in_order == point_edge_free(world.grid, q1, q2, world.check_step)


def test_edge_counters_short_circuit():
    world = make_world(rects=[(9, 0, 10, 15)], size=20)  # wall with open top
    q1, q2 = [0.05, 0.5], [0.95, 0.5]
    n_total = len(discretize(q1, q2, world.check_step))
    world.is_edge_valid(q1, q2, order=None)
    assert world.edge_check_count == 1
    # in-order check stops at the first config inside the wall
    first_bad = next(
        i
        for i, p in enumerate(discretize(q1, q2, world.check_step))
        if not point_config_free(world.grid, p)
    )
    assert world.config_check_count == first_bad + 1
    world.is_edge_valid([0.05, 0.95], [0.95, 0.95], order=None)  # free edge
    assert world.config_check_count == first_bad + 1 + len(
        discretize([0.05, 0.95], [0.95, 0.95], world.check_step)
    )
    assert n_total > 0


def test_step_halving_never_validates_invalid_edge():
    # Monotone refinement holds when the coarse lattice is a subset of the
    # fine one, i.e. when the interval count divides evenly after halving.
    rng = np.random.default_rng(7)
    world = make_world(rects=[(5, 5, 9, 9), (13, 2, 15, 11)], size=20)
    tested = 0
    for _ in range(300):
        q1, q2 = rng.random(2), rng.random(2)
        step = float(rng.uniform(0.02, 0.2))
        d = float(np.linalg.norm(q1 - q2))
        if d == 0:
            continue
        coarse_n = math.ceil(d / step)
        fine_n = math.ceil(d / (step / 2))
        if fine_n % coarse_n != 0:
            continue
        tested += 1
        coarse = world.is_edge_valid(q1, q2, step=step)
        fine = world.is_edge_valid(q1, q2, step=step / 2)
        if not coarse:
            assert not fine
    assert tested >= 20


# -- swept cache ---------------------------------------------------------------


def test_cached_equals_uncached_exhaustive_small_worlds():
    rng = np.random.default_rng(8)
    for world_seed in range(6):
        w = int(rng.integers(2, 6))
        h = int(rng.integers(2, 6))
        x0 = int(rng.integers(0, 10 - w))
        y0 = int(rng.integers(0, 10 - h))
        world = make_world(rects=[(x0, y0, x0 + w - 1, y0 + h - 1)], size=10)
        cache = SweptCache()
        for _ in range(60):
            q1, q2 = rng.random(2), rng.random(2)
            plain = world.is_edge_valid(q1, q2)
            cached_cold = world.is_edge_valid_cached(cache, q1, q2)
            cached_warm = world.is_edge_valid_cached(cache, q1, q2)
            assert plain == cached_cold == cached_warm


def test_cache_hit_skips_config_checks():
    world = make_world()
    cache = SweptCache()
    q1, q2 = [0.1, 0.1], [0.8, 0.3]
    world.is_edge_valid_cached(cache, q1, q2)
    configs_after_miss = world.config_check_count
    world.is_edge_valid_cached(cache, q1, q2)
    assert world.config_check_count == configs_after_miss
    assert world.edge_check_count == 2


def test_cache_reflects_swapped_environment():
    # Populate offline on an empty grid, then swap in obstacles.
    empty = make_world(size=16)
    cache = SweptCache()
    q1, q2 = [0.1, 0.5], [0.9, 0.5]
    assert empty.is_edge_valid_cached(cache, q1, q2)
    blocked = make_world(rects=[(7, 7, 8, 8)], size=16)
    assert not blocked.is_edge_valid_cached(cache, q1, q2)
    assert len(cache) == 1  # reused entry, not recomputed


# -- clearance -----------------------------------------------------------------


def test_clearance_empty_world_center():
    world = make_world(size=32)
    assert world.clearance([0.5, 0.5]) == pytest.approx(0.5, abs=1e-9)
    assert world.clearance([0.5, 0.5]) == pytest.approx(
        edt_clearance(world.grid, [0.5, 0.5]), abs=2.0 / 32
    )


def test_clearance_adjacent_to_obstacle():
    world = make_world(rects=[(16, 16, 17, 17)], size=32)
    q = [0.48, 16.5 / 32]  # half a cell left of the obstacle
    expected = 16 / 32 - 0.48  # distance to the rectangle face at x = 0.5
    assert world.clearance(q) == pytest.approx(expected, abs=1e-9)


def test_clearance_occupied_is_zero():
    world = make_world(rects=[(10, 10, 12, 12)], size=32)
    assert world.clearance([11.5 / 32, 11.5 / 32]) == 0.0


def test_clearance_unsupported_for_arm():
    grid = OccupancyGrid.empty(32, 32, 1 / 32)
    world = CollisionWorld(grid, PlanarArm([0.2, 0.2], (0.5, 0.5)))
    with pytest.raises(UnsupportedRobotError):
        world.clearance([0.5, 0.5])


def test_clearance_matches_edt_oracle_randomly():
    rng = np.random.default_rng(9)
    world = make_world(rects=[(8, 2, 12, 20), (20, 14, 27, 18)], size=32)
    for _ in range(40):
        q = rng.random(2)
        if not world.is_config_valid(q):
            continue
        # EDT oracle is cell-granular; agree within ~1.5 cells
        assert world.clearance(q) == pytest.approx(
            edt_clearance(world.grid, q), abs=1.5 / 32
        )


def test_path_clearance_single_config():
    world = make_world(size=32)
    q = [0.3, 0.4]
    assert world.path_clearance([q]) == world.clearance(q)


def test_path_clearance_corridor():
    # Corridor between two slabs: free band y in (10/32, 13/32),
    # path along its centerline y = 11.5/32.
    world = make_world(rects=[(0, 0, 31, 9), (0, 13, 31, 31)], size=32)
    path = [[0.2, 11.5 / 32], [0.8, 11.5 / 32]]
    half_width = 1.5 / 32
    assert world.path_clearance(path) == pytest.approx(half_width, abs=1e-9)


def test_path_clearance_empty_world_straight():
    world = make_world(size=32)
    path = [[0.25, 0.5], [0.75, 0.5]]
    assert world.path_clearance(path) == pytest.approx(0.25, abs=1e-9)


# -- planar arm ----------------------------------------------------------------


def test_arm_joint_points():
    arm = PlanarArm([0.2, 0.2], (0.5, 0.5))
    pts = arm.joint_points([0.5, 0.5])  # both angles zero: straight +x
    np.testing.assert_allclose(pts[0], (0.5, 0.5))
    np.testing.assert_allclose(pts[1], (0.7, 0.5), atol=1e-12)
    np.testing.assert_allclose(pts[2], (0.9, 0.5), atol=1e-12)
    pts_up = arm.joint_points([0.75, 0.5])  # first joint +pi/2
    np.testing.assert_allclose(pts_up[1], (0.5, 0.7), atol=1e-12)
    np.testing.assert_allclose(pts_up[2], (0.5, 0.9), atol=1e-12)


def test_arm_footprint_deterministic_and_conservative():
    grid = OccupancyGrid.empty(32, 32, 1 / 32)
    arm = PlanarArm([0.3], (0.5, 0.5))
    q = [0.61]
    cells_a, oob_a = arm.footprint(grid, q)
    cells_b, oob_b = arm.footprint(grid, q)
    assert not oob_a and not oob_b
    np.testing.assert_array_equal(cells_a, cells_b)
    # every sampled point of the link lies in a covered cell
    pts = arm.joint_points(q)
    covered = set(map(tuple, cells_a))
    for t in np.linspace(0, 1, 50):
        x = pts[0][0] + t * (pts[1][0] - pts[0][0])
        y = pts[0][1] + t * (pts[1][1] - pts[0][1])
        assert (int(x * 32), int(y * 32)) in covered


def test_arm_collision_with_slab():
    grid = OccupancyGrid.from_rects(32, 32, 1 / 32, [(0, 20, 31, 22)])
    world = CollisionWorld(grid, PlanarArm([0.3], (0.5, 0.5)))
    assert world.is_config_valid([0.5])  # pointing +x, below the slab
    assert not world.is_config_valid([0.75])  # pointing up, through the slab


def test_arm_oob_invalid():
    grid = OccupancyGrid.empty(16, 16, 1 / 16)
    world = CollisionWorld(grid, PlanarArm([0.45, 0.45], (0.5, 0.5)))
    assert not world.is_config_valid([0.5, 0.5])  # reaches x = 1.4, out of grid
