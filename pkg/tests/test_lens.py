from __future__ import annotations

import math

import numpy as np
import pytest

from distbrush.closeness import ClosenessParams, ClosenessResult, PointClass
from distbrush.errors import DegenerateError, EmptyContourError, ParameterError
from distbrush.lens import (
    DensityGrid,
    RelocationClass,
    apply_plan,
    build_inner,
    build_lens,
    build_outer,
    build_plan,
    convex_hull,
    kde_grid,
    marching_squares,
    point_in_polygon,
    points_in_polygon,
    polygon_area,
    polygon_centroid,
    ray_polygon_hit,
    relocation_ray,
)

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def closeness_result(values, members=()):
    values = np.asarray(values, dtype=np.float64)
    mask = np.zeros(len(values), dtype=bool)
    for m in members:
        mask[m] = True
    classes = []
    for i, v in enumerate(values):
        if mask[i]:
            classes.append(PointClass.MEMBER)
        elif v == 1.0:
            classes.append(PointClass.TRUE_NEIGHBOR)
        elif v == 0.0:
            classes.append(PointClass.NON_NEIGHBOR)
        else:
            classes.append(PointClass.UNCERTAIN)
    return ClosenessResult(values=values, classes=classes, member_mask=mask)


# ------------------------------------------------------------------ kde


def test_kde_single_point_peak():
    grid = kde_grid(np.array([[0.3, -0.2]]), 32, 0.5)
    peak = np.unravel_index(np.argmax(grid.values), grid.values.shape)
    pos = grid.origin + np.array(peak) * grid.cell_size
    assert np.linalg.norm(pos - [0.3, -0.2]) <= grid.cell_size


def test_kde_linearity_for_duplicates():
    one = kde_grid(np.array([[0.1, 0.4]]), 24, 0.7)
    two = kde_grid(np.array([[0.1, 0.4], [0.1, 0.4]]), 24, 0.7)
    np.testing.assert_allclose(two.values, 2.0 * one.values, rtol=1e-12)


def test_kde_wide_bandwidth_uniform():
    xs, ys = np.meshgrid(np.arange(10.0), np.arange(10.0))
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    grid = kde_grid(pts, 128, 50.0)
    # nodes within the point lattice's own bounding box vary by < 5%
    coords = grid.origin + np.arange(grid.resolution)[:, None] * grid.cell_size
    ix = np.flatnonzero((coords[:, 0] >= 0.0) & (coords[:, 0] <= 9.0))
    interior = grid.values[np.ix_(ix, ix)]
    assert (interior.max() - interior.min()) / interior.max() < 0.05


def test_kde_parameter_errors():
    with pytest.raises(ParameterError):
        kde_grid(np.array([[0.0, 0.0]]), 32, 0.0)
    with pytest.raises(ParameterError):
        kde_grid(np.array([[0.0, 0.0]]), 4, 1.0)


# ------------------------------------------------------- marching squares


def test_marching_squares_constant_zero():
    grid = DensityGrid(origin=np.zeros(2), cell_size=1.0, values=np.zeros((16, 16)))
    with pytest.raises(EmptyContourError):
        marching_squares(grid, 0.5)


def test_marching_squares_above_max():
    grid = kde_grid(np.array([[0.0, 0.0]]), 32, 1.0)
    with pytest.raises(EmptyContourError):
        marching_squares(grid, float(grid.values.max()) * 1.01)


def test_marching_squares_gaussian_circle():
    grid = kde_grid(np.array([[0.0, 0.0]]), 64, 1.0)
    loops = marching_squares(grid, 0.5 * float(grid.values.max()))
    assert len(loops) == 1
    radii = np.linalg.norm(loops[0], axis=1)
    assert (radii.max() - radii.min()) / radii.mean() < 0.1


def test_marching_squares_two_components():
    pts = np.array([[0.0, 0.0], [10.0, 0.0]])
    grid = kde_grid(pts, 64, 0.5)
    loops = marching_squares(grid, 0.5 * float(grid.values.max()))
    assert len(loops) == 2


# ------------------------------------------------------------------ hull


def test_hull_drops_interior_point():
    pts = np.vstack([SQUARE, [[0.5, 0.5]]])
    hull = convex_hull(pts)
    assert len(hull) == 4
    assert set(map(tuple, hull.tolist())) == set(map(tuple, SQUARE.tolist()))


def test_hull_triangle_identity():
    tri = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.5]])
    hull = convex_hull(tri)
    assert set(map(tuple, hull.tolist())) == set(map(tuple, tri.tolist()))


def test_hull_contains_all_inputs():
    rng = np.random.default_rng(2)
    angles = rng.uniform(0, 2 * math.pi, 100)
    radii = np.sqrt(rng.uniform(0, 1, 100))
    pts = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    hull = convex_hull(pts)
    assert points_in_polygon(hull, pts, 1e-12).all()


def test_hull_ccw_orientation():
    rng = np.random.default_rng(3)
    hull = convex_hull(rng.normal(0, 1, (40, 2)))
    assert polygon_area(hull) > 0


def test_hull_degenerate():
    with pytest.raises(DegenerateError):
        convex_hull(np.array([[0.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(DegenerateError):
        convex_hull(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]))


# ------------------------------------------------------------ build_inner


def test_build_inner_singleton_fallback():
    poly = build_inner(np.array([[2.0, 3.0]]), 0.15, 64, 0.5)
    assert len(poly) == 12
    np.testing.assert_allclose(np.linalg.norm(poly - [2.0, 3.0], axis=1), 0.5, rtol=1e-12)


def test_build_inner_pair_fallback():
    poly = build_inner(np.array([[0.0, 0.0], [2.0, 0.0]]), 0.15, 64, 0.7)
    assert len(poly) == 12
    np.testing.assert_allclose(np.linalg.norm(poly - [1.0, 0.0], axis=1), 0.7, rtol=1e-12)


def test_build_inner_blob_containment():
    rng = np.random.default_rng(8)
    pts = rng.normal(0, 1, (50, 2))
    poly = build_inner(pts, 0.15, 64, 1.0)
    inside = points_in_polygon(poly, pts, 1e-9)
    assert inside.mean() >= 0.9


def test_build_inner_outlier_excluded():
    rng = np.random.default_rng(9)
    pts = np.vstack([rng.normal(0, 1, (40, 2)), [[25.0, 25.0]]])
    poly = build_inner(pts, 0.15, 64, 1.0, anchor=np.array([0.0, 0.0]))
    assert not point_in_polygon(poly, np.array([25.0, 25.0]), 1e-9)
    inside = points_in_polygon(poly, pts[:40], 1e-9)
    assert inside.mean() >= 0.9


# ------------------------------------------------------------ build_outer


def test_outer_square_diagonal_offsets():
    margin = 0.3
    outer, bisectors = build_outer(SQUARE, margin)
    # every corner moves exactly `margin` along its diagonal
    np.testing.assert_allclose(np.linalg.norm(outer - SQUARE, axis=1), margin, atol=1e-12)
    diag = 1.0 / math.sqrt(2.0)
    np.testing.assert_allclose(np.abs(bisectors), diag, atol=1e-12)
    # edge-to-edge gap is margin / sqrt(2): bottom edge y = -margin/sqrt(2)
    np.testing.assert_allclose(outer[0, 1], -margin * diag, atol=1e-12)


def test_outer_hexagon_gap():
    margin = 0.5
    angles = np.arange(6) * math.pi / 3.0
    hexagon = np.column_stack([np.cos(angles), np.sin(angles)])
    outer, _ = build_outer(hexagon, margin)
    # apothem grows by margin * cos(30 deg)
    inner_apothem = math.cos(math.pi / 6.0)
    mid = (outer[0] + outer[1]) / 2.0
    np.testing.assert_allclose(
        np.linalg.norm(mid), inner_apothem + margin * math.cos(math.pi / 6.0), atol=1e-12
    )


def test_outer_margin_validation():
    with pytest.raises(ParameterError):
        build_outer(SQUARE, 0.0)


# -------------------------------------------------------- relocation rays


def test_ray_hits_square():
    hit = ray_polygon_hit(np.array([0.5, 0.5]), np.array([1.0, 0.0]), SQUARE)
    np.testing.assert_allclose(hit, [1.0, 0.5], atol=1e-12)


def test_ray_direction_on_corner_bisector():
    lens = build_lens(SQUARE, 0.4)
    ray = relocation_ray(lens, np.array([2.0, 2.0]))
    np.testing.assert_allclose(ray.direction, [1 / math.sqrt(2)] * 2, atol=1e-9)


def test_ray_direction_at_edge_midline():
    lens = build_lens(SQUARE, 0.4)
    ray = relocation_ray(lens, np.array([3.0, 0.5]))
    np.testing.assert_allclose(ray.direction, [1.0, 0.0], atol=1e-9)


def test_ray_degenerate_center_defaults_plus_x():
    # p exactly at the centroid is treated as lying radially along +x
    lens = build_lens(SQUARE, 0.4)
    ray = relocation_ray(lens, np.array([0.5, 0.5]))
    np.testing.assert_allclose(ray.direction, [1.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(ray.inner_hit, [1.0, 0.5], atol=1e-12)


def test_ray_hits_are_radial():
    lens = build_lens(SQUARE, 0.4)
    p = np.array([1.7, 1.1])
    ray = relocation_ray(lens, p)
    v = p - lens.centroid
    for hit in (ray.inner_hit, ray.outer_hit):
        w = hit - lens.centroid
        assert abs(v[0] * w[1] - v[1] * w[0]) < 1e-9
    assert point_in_polygon(lens.inner, ray.inner_hit, 1e-9)
    assert point_in_polygon(lens.outer, ray.outer_hit, 1e-9)


def test_ray_direction_continuity_sweep():
    rng = np.random.default_rng(4)
    pts = rng.normal(0, 1, (60, 2))
    inner = build_inner(pts, 0.15, 64, 0.8)
    lens = build_lens(inner, 0.3)
    radius = 3.0
    steps = 720
    angles = np.linspace(0, 2 * math.pi, steps, endpoint=False)
    dirs = []
    for a in angles:
        p = lens.centroid + radius * np.array([math.cos(a), math.sin(a)])
        dirs.append(relocation_ray(lens, p).direction)
    dirs = np.array(dirs)
    dots = np.clip(np.sum(dirs * np.roll(dirs, -1, axis=0), axis=1), -1, 1)
    max_jump = np.degrees(np.max(np.arccos(dots)))
    assert max_jump < 5.0


# ------------------------------------------------------------- build_plan


def lens_and_params(margin=0.4, theta_out=0.5):
    return build_lens(SQUARE, margin), ClosenessParams(theta_in=0.35, theta_out=theta_out)


def test_plan_keeper_inside_stays():
    lens, params = lens_and_params()
    live = np.array([[0.5, 0.5]])
    plan = build_plan(lens, closeness_result([1.0]), params, live, [])
    assert plan.class_of[0] is RelocationClass.STAY_INSIDE
    assert plan.targets == {}


def test_plan_pushes_non_neighbor_from_center():
    lens, params = lens_and_params()
    live = np.array([[0.5, 0.5]])
    plan = build_plan(lens, closeness_result([0.0]), params, live, [])
    assert plan.class_of[0] is RelocationClass.PUSH_OUT
    assert not point_in_polygon(lens.outer, plan.targets[0])


def test_plan_pull_in_strictly_inside():
    lens, params = lens_and_params()
    live = np.array([[4.0, 0.5], [9.0, 0.5]])
    plan = build_plan(lens, closeness_result([1.0, 1.0]), params, live, [])
    for i in (0, 1):
        assert plan.class_of[i] is RelocationClass.PULL_IN
        assert point_in_polygon(lens.inner, plan.targets[i])
    # farther origin lands deeper (smaller radial fraction)
    r0 = np.linalg.norm(plan.targets[0] - lens.centroid)
    r1 = np.linalg.norm(plan.targets[1] - lens.centroid)
    assert r1 < r0
    assert len(plan.traces) == 2


def test_plan_member_outlier_parks_on_boundary():
    lens, params = lens_and_params()
    live = np.array([[4.0, 0.5]])
    plan = build_plan(lens, closeness_result([1.0], members=[0]), params, live, [0])
    target = plan.targets[0]
    assert point_in_polygon(lens.inner, target)
    assert np.linalg.norm(target - lens.centroid) > 0.99 * 0.5


def test_plan_uncertain_interpolation_endpoints():
    lens, params = lens_and_params(theta_out=0.5)
    live = np.array([[2.0, 0.5], [2.0, 0.5]])
    close_hi = 1.0 - 1e-9
    plan = build_plan(lens, closeness_result([close_hi, 0.5]), params, live, [])
    ray_hit_inner = np.array([1.0, 0.5])
    ray_hit_outer = np.array([1.0 + 0.4 / math.sqrt(2), 0.5])
    np.testing.assert_allclose(plan.targets[0], ray_hit_inner, atol=1e-6)
    np.testing.assert_allclose(plan.targets[1], ray_hit_outer, atol=1e-9)


def test_plan_theta_out_gates_outside_points():
    lens, params = lens_and_params(theta_out=0.6)
    live = np.array([[5.0, 0.5], [5.0, 0.5]])
    plan = build_plan(lens, closeness_result([0.59, 0.61]), params, live, [])
    assert plan.class_of[0] is RelocationClass.UNTOUCHED
    assert 0 not in plan.targets
    assert plan.class_of[1] is RelocationClass.ANNULUS_PLACE
    assert 1 in plan.targets


def test_plan_uncertain_inside_relocated_regardless_of_theta_out():
    lens, params = lens_and_params(theta_out=0.9)
    live = np.array([[1.05, 0.5]])  # inside the annulus already
    plan = build_plan(lens, closeness_result([0.2]), params, live, [])
    assert plan.class_of[0] is RelocationClass.ANNULUS_PLACE


def test_plan_annulus_ordering_by_closeness():
    lens, params = lens_and_params(theta_out=0.0)
    values = [0.9, 0.6, 0.3]
    live = np.array([[2.0, 0.5]] * 3)
    plan = build_plan(lens, closeness_result(values), params, live, [])
    dists = [np.linalg.norm(plan.targets[i] - np.array([1.0, 0.5])) for i in range(3)]
    assert dists[0] < dists[1] < dists[2]
    for i in range(3):
        assert point_in_polygon(lens.outer, plan.targets[i], 1e-9)
        assert not point_in_polygon(lens.inner, plan.targets[i], -1e-9)


def test_plan_full_invariants_random():
    rng = np.random.default_rng(77)
    for trial in range(10):
        pts = rng.normal(0, 1, (40, 2))
        inner = build_inner(pts, 0.15, 48, 0.8)
        lens = build_lens(inner, 0.35)
        n = 120
        live = rng.normal(0, 3, (n, 2))
        values = rng.uniform(0, 1, n)
        values[rng.random(n) < 0.25] = 1.0
        values[rng.random(n) < 0.25] = 0.0
        members = list(rng.choice(n, size=5, replace=False))
        values[members] = 1.0
        result = closeness_result(values, members=members)
        params = ClosenessParams(theta_in=0.3, theta_out=float(rng.uniform(0, 1)))
        plan = build_plan(lens, result, params, live, members)
        new = apply_plan(live, plan)
        scale = max(np.abs(new).max(), 1.0)
        tol = 1e-9 * scale
        for i in range(n):
            v = result.values[i]
            is_member = result.member_mask[i]
            if v == 0.0 and not is_member:
                assert not point_in_polygon(lens.outer, new[i], -tol)
            if v == 1.0 or is_member:
                assert point_in_polygon(lens.inner, new[i], tol)
            if plan.class_of[i] is RelocationClass.ANNULUS_PLACE:
                assert point_in_polygon(lens.outer, new[i], tol)
                assert not point_in_polygon(lens.inner, new[i], -tol)


def test_plan_deterministic():
    lens, params = lens_and_params()
    rng = np.random.default_rng(5)
    live = rng.normal(0.5, 2.0, (50, 2))
    values = rng.uniform(0, 1, 50)
    result = closeness_result(values)
    p1 = build_plan(lens, result, params, live, [])
    p2 = build_plan(lens, result, params, live, [])
    assert p1.class_of == p2.class_of
    assert set(p1.targets) == set(p2.targets)
    for i in p1.targets:
        np.testing.assert_array_equal(p1.targets[i], p2.targets[i])


def test_polygon_centroid_square():
    np.testing.assert_allclose(polygon_centroid(SQUARE), [0.5, 0.5], atol=1e-12)
