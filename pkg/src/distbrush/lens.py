"""Lens construction and point relocation geometry.

Pipeline for the inner boundary: Gaussian kernel density over a grid, iso
contour by marching squares, then the convex hull of the chosen loop.  The
outer boundary offsets every inner corner outward along its exterior-angle
bisector.  Relocation directions interpolate between successive corner
bisectors so the correction field stays continuous around the lens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .closeness import ClosenessParams, ClosenessResult
from .errors import (
    DegenerateError,
    EmptyContourError,
    GeometryError,
    ParameterError,
)
from .mathx import exp_neg

# fraction of the centroid->boundary radius where brush outliers are parked:
# visually on the boundary, numerically strictly inside
_OUTLIER_PULL = 0.995


@dataclass(frozen=True)
class DensityGrid:
    """Square grid of kernel-density samples; node (i, j) sits at
    origin + (i, j) * cell_size."""

    origin: np.ndarray
    cell_size: float
    values: np.ndarray

    @property
    def resolution(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Lens:
    """Convex inner/outer boundary pair with per-corner relocation rays."""

    inner: np.ndarray
    outer: np.ndarray
    margin: float
    bisectors: np.ndarray
    centroid: np.ndarray
    corner_angles: np.ndarray = field(repr=False)
    bisector_angles: np.ndarray = field(repr=False)
    diameter: float = 0.0


@dataclass(frozen=True)
class RelocationRay:
    direction: np.ndarray
    inner_hit: np.ndarray
    outer_hit: np.ndarray


class RelocationClass(str, Enum):
    STAY_INSIDE = "stay_inside"
    PULL_IN = "pull_in"
    PUSH_OUT = "push_out"
    ANNULUS_PLACE = "annulus_place"
    UNTOUCHED = "untouched"


@dataclass(frozen=True)
class RelocationPlan:
    """Target positions for every point the lens relocates.

    ``traces`` records (index, from, to) for points pulled in from beyond
    the outer boundary, feeding the transient red-path rendering.
    """

    targets: dict[int, np.ndarray]
    class_of: list[RelocationClass]
    traces: list[tuple[int, np.ndarray, np.ndarray]]


def kde_grid(points: np.ndarray, resolution: int, bandwidth: float) -> DensityGrid:
    """Gaussian-kernel density sampled on a square grid.

    The grid covers the points' bounding box padded by 3 bandwidths, so the
    field decays to ~0 at the border and iso contours always close.  The
    kernel is evaluated separably per point and accumulated in index order,
    keeping the result identical across implementations.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2 or len(points) < 1:
        raise ParameterError("kde_grid needs an m x 2 array with m >= 1")
    if not bandwidth > 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    if resolution < 8:
        raise ParameterError(f"grid resolution must be >= 8, got {resolution}")

    lo = points.min(axis=0) - 3.0 * bandwidth
    hi = points.max(axis=0) + 3.0 * bandwidth
    span = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    center = (lo + hi) / 2.0
    cell = span / (resolution - 1)
    origin = center - span / 2.0

    xs = origin[0] + np.arange(resolution, dtype=np.float64) * cell
    ys = origin[1] + np.arange(resolution, dtype=np.float64) * cell
    inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth)
    dx = xs[None, :] - points[:, 0][:, None]
    dy = ys[None, :] - points[:, 1][:, None]
    ex = exp_neg(-(dx * dx) * inv_two_h2)
    ey = exp_neg(-(dy * dy) * inv_two_h2)
    values = np.zeros((resolution, resolution), dtype=np.float64)
    for i in range(len(points)):  # fixed accumulation order, portable rounding
        values += ex[i][:, None] * ey[i][None, :]
    return DensityGrid(origin=origin, cell_size=cell, values=values)


# local edges of a cell: 0 bottom, 1 right, 2 top, 3 left
_CASE_EDGES = {
    1: [(3, 0)],
    2: [(0, 1)],
    3: [(3, 1)],
    4: [(1, 2)],
    6: [(0, 2)],
    7: [(3, 2)],
    8: [(2, 3)],
    9: [(2, 0)],
    11: [(2, 1)],
    12: [(1, 3)],
    13: [(1, 0)],
    14: [(0, 3)],
}


def marching_squares(grid: DensityGrid, alpha: float) -> list[np.ndarray]:
    """Closed iso-contour loops of the grid at level alpha.

    Linear interpolation along cell edges; the two ambiguous saddle cases
    are split by comparing the cell-center average against alpha.  Loops
    are returned as (m, 2) vertex arrays in walk order.
    """
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    v = grid.values
    g = grid.resolution
    inside = v > alpha
    # the grid frame counts as outside so every loop closes within the grid
    inside[0, :] = inside[-1, :] = False
    inside[:, 0] = inside[:, -1] = False
    if not inside.any():
        raise EmptyContourError(f"no grid value exceeds level {alpha}")

    # crossing position on a grid edge, computed once per edge
    cross_pos: dict[tuple[int, int, str], np.ndarray] = {}

    def edge_point(i0: int, j0: int, i1: int, j1: int, key: tuple[int, int, str]) -> np.ndarray:
        pt = cross_pos.get(key)
        if pt is None:
            v0 = v[i0, j0]
            v1 = v[i1, j1]
            t = (alpha - v0) / (v1 - v0) if v1 != v0 else 0.5
            t = min(max(t, 0.0), 1.0)  # frame-forced cells can push t out of range
            x = (grid.origin[0] + i0 * grid.cell_size) + t * ((i1 - i0) * grid.cell_size)
            y = (grid.origin[1] + j0 * grid.cell_size) + t * ((j1 - j0) * grid.cell_size)
            pt = np.array([x, y])
            cross_pos[key] = pt
        return pt

    def local_edge_key(ci: int, cj: int, e: int) -> tuple[int, int, str]:
        if e == 0:
            return (ci, cj, "h")
        if e == 1:
            return (ci + 1, cj, "v")
        if e == 2:
            return (ci, cj + 1, "h")
        return (ci, cj, "v")

    def local_edge_nodes(ci: int, cj: int, e: int):
        if e == 0:
            return (ci, cj, ci + 1, cj)
        if e == 1:
            return (ci + 1, cj, ci + 1, cj + 1)
        if e == 2:
            return (ci, cj + 1, ci + 1, cj + 1)
        return (ci, cj, ci, cj + 1)

    cases = (
        inside[:-1, :-1].astype(np.int8)
        + 2 * inside[1:, :-1]
        + 4 * inside[1:, 1:]
        + 8 * inside[:-1, 1:]
    )
    active = np.argwhere((cases != 0) & (cases != 15))  # row-major: deterministic

    segments: list[tuple[tuple, tuple]] = []
    for ci, cj in active:
        ci, cj = int(ci), int(cj)
        case = int(cases[ci, cj])
        if case in (5, 10):
            center = (v[ci, cj] + v[ci + 1, cj] + v[ci + 1, cj + 1] + v[ci, cj + 1]) / 4.0
            joined = center > alpha
            if case == 5:  # c0 and c2 inside
                pairs = [(3, 0), (1, 2)] if not joined else [(3, 2), (1, 0)]
            else:  # c1 and c3 inside
                pairs = [(0, 1), (2, 3)] if not joined else [(0, 3), (2, 1)]
        else:
            pairs = _CASE_EDGES[case]
        for ea, eb in pairs:
            ka = local_edge_key(ci, cj, ea)
            kb = local_edge_key(ci, cj, eb)
            edge_point(*local_edge_nodes(ci, cj, ea), ka)
            edge_point(*local_edge_nodes(ci, cj, eb), kb)
            segments.append((ka, kb))

    if not segments:
        raise EmptyContourError(f"no cell edge crosses level {alpha}")

    # chain segments into loops via shared grid-edge keys
    incident: dict[tuple, list[int]] = {}
    for idx, (ka, kb) in enumerate(segments):
        incident.setdefault(ka, []).append(idx)
        incident.setdefault(kb, []).append(idx)

    used = [False] * len(segments)
    loops: list[np.ndarray] = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        ka, kb = segments[start]
        chain = [ka, kb]
        current = kb
        closed = False
        while True:
            nxt = None
            for idx in incident[current]:
                if not used[idx]:
                    nxt = idx
                    break
            if nxt is None:
                break
            used[nxt] = True
            a, b = segments[nxt]
            current = b if a == current else a
            if current == chain[0]:
                closed = True
                break
            chain.append(current)
        if closed and len(chain) >= 3:
            loops.append(np.array([cross_pos[key] for key in chain]))
    if not loops:
        raise EmptyContourError("contour segments do not form a closed loop")
    return loops


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Counterclockwise convex hull, collinear interior vertices dropped."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParameterError("convex_hull needs an m x 2 array")
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) < 3:
        raise DegenerateError(f"need >= 3 distinct points, got {len(uniq)}")

    def half(seq):
        h: list[tuple[float, float]] = []
        for p in seq:
            while len(h) >= 2 and _cross(np.array(h[-2]), np.array(h[-1]), np.array(p)) <= 0:
                h.pop()
            h.append(p)
        return h

    lower = half(uniq)
    upper = half(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateError("all points are collinear")
    return np.array(hull)


def polygon_area(poly: np.ndarray) -> float:
    # sequential accumulation: summation order is part of the replay contract
    xs = poly[:, 0].tolist()
    ys = poly[:, 1].tolist()
    m = len(xs)
    total = 0.0
    for i in range(m):
        j = (i + 1) % m
        total += xs[i] * ys[j] - xs[j] * ys[i]
    return 0.5 * total


def polygon_centroid(poly: np.ndarray) -> np.ndarray:
    """Area centroid; falls back to the vertex mean for near-zero area."""
    xs = poly[:, 0].tolist()
    ys = poly[:, 1].tolist()
    m = len(xs)
    area2 = 0.0
    cx = 0.0
    cy = 0.0
    for i in range(m):
        j = (i + 1) % m
        w = xs[i] * ys[j] - xs[j] * ys[i]
        area2 += w
        cx += (xs[i] + xs[j]) * w
        cy += (ys[i] + ys[j]) * w
    area = 0.5 * area2
    if abs(area) < 1e-300:
        total_x = 0.0
        total_y = 0.0
        for i in range(m):
            total_x += xs[i]
            total_y += ys[i]
        return np.array([total_x / m, total_y / m])
    return np.array([cx / (6.0 * area), cy / (6.0 * area)])


def polygon_diameter(poly: np.ndarray) -> float:
    dx = poly[:, 0][:, None] - poly[:, 0][None, :]
    dy = poly[:, 1][:, None] - poly[:, 1][None, :]
    return float(np.sqrt(np.max(dx * dx + dy * dy)))


def point_in_polygon(poly: np.ndarray, p: np.ndarray, tol: float = 0.0) -> bool:
    """Containment test for a CCW convex polygon; boundary counts as inside.

    ``tol`` loosens the test by an absolute cross-product slack (shrinks
    when negative).
    """
    m = len(poly)
    for i in range(m):
        if _cross(poly[i], poly[(i + 1) % m], p) < -tol:
            return False
    return True


def points_in_polygon(poly: np.ndarray, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Vectorized point_in_polygon over an (n, 2) position array."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    ex = (b[:, 0] - a[:, 0])[None, :]
    ey = (b[:, 1] - a[:, 1])[None, :]
    px = pts[:, 0][:, None] - a[:, 0][None, :]
    py = pts[:, 1][:, None] - a[:, 1][None, :]
    cross = ex * py - ey * px
    return np.all(cross >= -tol, axis=1)


def ray_polygon_hit(origin: np.ndarray, direction: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """First intersection of ray origin + t*direction (t > 0) with the polygon."""
    best_t = math.inf
    m = len(poly)
    for i in range(m):
        a = poly[i]
        b = poly[(i + 1) % m]
        ex = b[0] - a[0]
        ey = b[1] - a[1]
        denom = direction[0] * ey - direction[1] * ex
        if denom == 0.0:
            continue
        qx = a[0] - origin[0]
        qy = a[1] - origin[1]
        t = (qx * ey - qy * ex) / denom
        s = (qx * direction[1] - qy * direction[0]) / denom
        if t > 0.0 and -1e-12 <= s <= 1.0 + 1e-12 and t < best_t:
            best_t = t
    if not math.isfinite(best_t):
        raise GeometryError("ray does not intersect polygon")
    return np.array([origin[0] + best_t * direction[0], origin[1] + best_t * direction[1]])


def _regular_polygon(center: np.ndarray, radius: float, sides: int = 12) -> np.ndarray:
    angles = 2.0 * math.pi * np.arange(sides) / sides
    return np.column_stack([
        center[0] + radius * np.cos(angles),
        center[1] + radius * np.sin(angles),
    ])


def default_bandwidth(brush_positions: np.ndarray, projection_extent: float) -> float:
    """Kernel bandwidth: a quarter of the brush bounding-box diagonal,
    floored at 1% of the projection extent so tiny brushes keep a visible lens."""
    pts = np.asarray(brush_positions, dtype=np.float64)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    dx, dy = hi[0] - lo[0], hi[1] - lo[1]
    diag = math.sqrt(dx * dx + dy * dy)
    return max(0.25 * diag, 0.01 * projection_extent)


def _bisector_angles_of(poly: np.ndarray) -> np.ndarray:
    m = len(poly)
    angles = np.empty(m)
    for j in range(m):
        n_prev = _outward_normal(poly[(j - 1) % m], poly[j])
        n_next = _outward_normal(poly[j], poly[(j + 1) % m])
        b = n_prev + n_next
        angles[j] = math.atan2(b[1], b[0])
    return angles


def _smooth_corner_field(poly: np.ndarray, ratio_cap: float = 40.0,
                         min_vertices: int = 8) -> np.ndarray:
    """Merge corners whose bisector turn is packed into a tiny angular gap.

    Contour hulls carry near-coincident vertices; a few degrees of turn
    across a milliradian of arc would make the relocation-direction field
    slew arbitrarily fast.  Dropping the offending vertex spreads its turn
    over the neighboring sector, keeping the field's angular velocity below
    ratio_cap (degrees of direction change per degree swept).
    """
    poly = poly.copy()
    while len(poly) > min_vertices:
        m = len(poly)
        centroid = polygon_centroid(poly)
        alpha = np.arctan2(poly[:, 1] - centroid[1], poly[:, 0] - centroid[0])
        beta = _bisector_angles_of(poly)
        gap_a = (alpha[(np.arange(m) + 1) % m] - alpha) % (2.0 * math.pi)
        gap_b = beta[(np.arange(m) + 1) % m] - beta
        gap_b = np.abs((gap_b + math.pi) % (2.0 * math.pi) - math.pi)
        with np.errstate(divide="ignore"):
            ratios = np.where(gap_a > 0.0, gap_b / np.where(gap_a > 0, gap_a, 1.0), np.inf)
        worst = int(np.argmax(ratios))
        if ratios[worst] <= ratio_cap:
            break
        # drop the endpoint whose other adjacent sector is flatter
        j0, j1 = worst, (worst + 1) % m
        drop = j0 if ratios[(worst - 1) % m] <= ratios[j1] else j1
        poly = np.delete(poly, drop, axis=0)
    return poly


def build_inner(
    brush_positions: np.ndarray,
    alpha_fraction: float,
    resolution: int,
    bandwidth: float,
    anchor: np.ndarray | None = None,
) -> np.ndarray:
    """Convex inner boundary enclosing the bulk of the brushed points.

    Fewer than 3 points cannot support a density contour, so they get a
    regular 12-gon of radius ``bandwidth`` around their centroid.  When the
    iso level yields several loops, the loop containing ``anchor`` wins
    (largest-area loop if none does), keeping the boundary a single
    component.
    """
    pts = np.asarray(brush_positions, dtype=np.float64)
    if len(pts) < 1:
        raise ParameterError("build_inner needs at least one point")
    if not 0.0 < alpha_fraction < 1.0:
        raise ParameterError(f"alpha_fraction must be in (0, 1), got {alpha_fraction}")
    center = pts.mean(axis=0)
    if len(pts) < 3:
        return _regular_polygon(center, bandwidth)
    grid = kde_grid(pts, resolution, bandwidth)
    alpha = alpha_fraction * float(grid.values.max())
    loops = marching_squares(grid, alpha)
    chosen = None
    if anchor is not None and len(loops) > 1:
        for loop in loops:
            if _point_in_loop(loop, anchor):
                chosen = loop
                break
    if chosen is None:
        chosen = max(loops, key=lambda lp: abs(polygon_area(lp)))
    try:
        return _smooth_corner_field(convex_hull(chosen))
    except DegenerateError:
        return _regular_polygon(center, bandwidth)


def _point_in_loop(loop: np.ndarray, p: np.ndarray) -> bool:
    """Ray-cast containment for an arbitrary (possibly nonconvex) closed loop."""
    inside = False
    m = len(loop)
    for i in range(m):
        x0, y0 = loop[i]
        x1, y1 = loop[(i + 1) % m]
        if (y0 > p[1]) != (y1 > p[1]):
            xt = x0 + (p[1] - y0) / (y1 - y0) * (x1 - x0)
            if xt > p[0]:
                inside = not inside
    return inside


def build_outer(inner: np.ndarray, margin: float) -> tuple[np.ndarray, np.ndarray]:
    """Outer boundary by offsetting every inner corner along its exterior bisector."""
    if not margin > 0:
        raise ParameterError(f"margin must be positive, got {margin}")
    m = len(inner)
    if m < 3:
        raise DegenerateError("inner polygon needs >= 3 vertices")
    bisectors = np.empty((m, 2), dtype=np.float64)
    for j in range(m):
        prev_v = inner[(j - 1) % m]
        here = inner[j]
        next_v = inner[(j + 1) % m]
        n_prev = _outward_normal(prev_v, here)
        n_next = _outward_normal(here, next_v)
        b = n_prev + n_next
        norm = math.sqrt(b[0] * b[0] + b[1] * b[1])
        if norm == 0.0:
            raise GeometryError(f"undefined bisector at corner {j}")
        bisectors[j] = b / norm
    outer = inner + margin * bisectors
    for j in range(m):
        if _cross(outer[j], outer[(j + 1) % m], outer[(j + 2) % m]) < 0:
            raise GeometryError("offset corners produced a non-convex outer boundary")
    return outer, bisectors


def _outward_normal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unit outward normal of edge a->b of a CCW polygon."""
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    norm = math.sqrt(dx * dx + dy * dy)
    return np.array([dy / norm, -dx / norm])


def build_lens(inner: np.ndarray, margin: float) -> Lens:
    """Assemble a Lens (outer boundary, bisectors, ray lookup tables) from
    an inner polygon."""
    outer, bisectors = build_outer(inner, margin)
    centroid = polygon_centroid(inner)
    corner_angles = np.arctan2(inner[:, 1] - centroid[1], inner[:, 0] - centroid[0])
    bisector_angles = np.arctan2(bisectors[:, 1], bisectors[:, 0])
    return Lens(
        inner=inner,
        outer=outer,
        margin=margin,
        bisectors=bisectors,
        centroid=centroid,
        corner_angles=corner_angles,
        bisector_angles=bisector_angles,
        diameter=polygon_diameter(inner),
    )


def _wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    while a <= -math.pi:
        a += 2.0 * math.pi
    while a > math.pi:
        a -= 2.0 * math.pi
    return a


def relocation_ray(lens: Lens, p: np.ndarray) -> RelocationRay:
    """Relocation direction and boundary hits for an arbitrary position.

    The direction interpolates (by angle about the inner centroid) between
    the bisectors of the two corners whose angular sector contains p; the
    boundary hits lie on the radial ray from the centroid through p.
    """
    vx = p[0] - lens.centroid[0]
    vy = p[1] - lens.centroid[1]
    if vx == 0.0 and vy == 0.0:
        radial = np.array([1.0, 0.0])
    else:
        norm = math.sqrt(vx * vx + vy * vy)
        radial = np.array([vx / norm, vy / norm])
    phi = math.atan2(radial[1], radial[0])

    m = len(lens.inner)
    best_j = 0
    best_off = math.inf
    for j in range(m):
        off = phi - lens.corner_angles[j]
        while off < 0.0:
            off += 2.0 * math.pi
        if off < best_off:
            best_off = off
            best_j = j
    j0 = best_j
    j1 = (best_j + 1) % m
    sector = lens.corner_angles[j1] - lens.corner_angles[j0]
    while sector <= 0.0:
        sector += 2.0 * math.pi
    t = best_off / sector if sector > 0.0 else 0.0
    t = min(max(t, 0.0), 1.0)
    delta = _wrap_angle(lens.bisector_angles[j1] - lens.bisector_angles[j0])
    angle = lens.bisector_angles[j0] + t * delta
    direction = np.array([math.cos(angle), math.sin(angle)])

    inner_hit = ray_polygon_hit(lens.centroid, radial, lens.inner)
    outer_hit = ray_polygon_hit(lens.centroid, radial, lens.outer)
    return RelocationRay(direction=direction, inner_hit=inner_hit, outer_hit=outer_hit)


def _batch_radials(lens: Lens, pts: np.ndarray) -> np.ndarray:
    """Unit direction from the centroid through each point; +x when degenerate."""
    vx = pts[:, 0] - lens.centroid[0]
    vy = pts[:, 1] - lens.centroid[1]
    norm = np.sqrt(vx * vx + vy * vy)
    degenerate = norm == 0.0
    safe = np.where(degenerate, 1.0, norm)
    return np.column_stack([
        np.where(degenerate, 1.0, vx / safe),
        np.where(degenerate, 0.0, vy / safe),
    ])


def _batch_directions(lens: Lens, radials: np.ndarray) -> np.ndarray:
    """Bisector-interpolated relocation direction for each radial angle."""
    phi = np.arctan2(radials[:, 1], radials[:, 0])
    alpha = lens.corner_angles
    beta = lens.bisector_angles
    m = len(alpha)
    offs = phi[:, None] - alpha[None, :]
    offs = np.where(offs < 0.0, offs + 2.0 * math.pi, offs)
    j0 = np.argmin(offs, axis=1)
    best_off = offs[np.arange(len(phi)), j0]
    j1 = (j0 + 1) % m
    gaps = alpha[j1] - alpha[j0]
    gaps = np.where(gaps <= 0.0, gaps + 2.0 * math.pi, gaps)
    t = np.minimum(np.maximum(best_off / gaps, 0.0), 1.0)
    deltas = beta[j1] - beta[j0]
    deltas = np.where(deltas <= -math.pi, deltas + 2.0 * math.pi, deltas)
    deltas = np.where(deltas > math.pi, deltas - 2.0 * math.pi, deltas)
    angle = beta[j0] + t * deltas
    return np.column_stack([np.cos(angle), np.sin(angle)])


def _batch_hits(lens: Lens, radials: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Radial-ray intersection with the polygon for every direction at once."""
    origin = lens.centroid
    a = poly
    b = np.roll(poly, -1, axis=0)
    ex = (b[:, 0] - a[:, 0])[None, :]
    ey = (b[:, 1] - a[:, 1])[None, :]
    qx = (a[:, 0] - origin[0])[None, :]
    qy = (a[:, 1] - origin[1])[None, :]
    dx = radials[:, 0][:, None]
    dy = radials[:, 1][:, None]
    denom = dx * ey - dy * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qx * ey - qy * ex) / denom
        s = (qx * dy - qy * dx) / denom
    valid = (denom != 0.0) & (t > 0.0) & (s >= -1e-12) & (s <= 1.0 + 1e-12)
    t = np.where(valid, t, np.inf)
    best = t.min(axis=1)
    if not np.all(np.isfinite(best)):
        raise GeometryError("radial ray does not intersect polygon")
    return np.column_stack([
        origin[0] + best * radials[:, 0],
        origin[1] + best * radials[:, 1],
    ])


def build_plan(
    lens: Lens,
    closeness: ClosenessResult,
    params: ClosenessParams,
    live_positions: np.ndarray,
    brushed,
) -> RelocationPlan:
    """Target positions for every point class around the lens.

    * members / true neighbors already inside the inner boundary stay put;
    * true neighbors outside get pulled inside, farther points landing
      deeper toward the centroid (radial fraction 1 / (1 + d / diameter));
    * brushed outliers are parked on the inner boundary;
    * non-neighbors inside the outer boundary are pushed half a margin
      beyond it;
    * uncertain points are spread across the annulus, higher closeness
      nearer the inner boundary; outside the outer boundary they are only
      attracted when closeness reaches theta_out.
    """
    live = np.asarray(live_positions, dtype=np.float64)
    n = len(live)
    values = closeness.values
    member = closeness.member_mask.copy()
    for i in brushed:
        member[int(i)] = True
    scale = max(lens.diameter, 1e-300)
    tol = 1e-12 * scale * scale

    in_inner = points_in_polygon(lens.inner, live, tol)
    in_outer = points_in_polygon(lens.outer, live, tol)
    keepers = member | (values == 1.0)
    non_neighbor = (values == 0.0) & ~member
    uncertain = ~keepers & ~non_neighbor

    stay = keepers & in_inner
    pull = keepers & ~in_inner
    push = non_neighbor & in_outer
    annulus = uncertain & (in_outer | (values >= params.theta_out))

    need = pull | push | annulus
    idx = np.flatnonzero(need)
    targets: dict[int, np.ndarray] = {}
    traces: list[tuple[int, np.ndarray, np.ndarray]] = []

    if idx.size:
        radials = _batch_radials(lens, live[idx])
        inner_hits = _batch_hits(lens, radials, lens.inner)
        outer_hits = _batch_hits(lens, radials, lens.outer)
        directions = _batch_directions(lens, radials)
        pos_sub = live[idx]
        pull_sub = pull[idx]
        push_sub = push[idx]
        ann_sub = annulus[idx]
        member_sub = member[idx]

        tgt = np.empty_like(pos_sub)

        # pull in: radial fraction shrinks with the distance still to travel
        if pull_sub.any():
            dxp = inner_hits[pull_sub, 0] - pos_sub[pull_sub, 0]
            dyp = inner_hits[pull_sub, 1] - pos_sub[pull_sub, 1]
            d = np.sqrt(dxp * dxp + dyp * dyp)
            f = np.where(member_sub[pull_sub], _OUTLIER_PULL, 1.0 / (1.0 + d / scale))
            tgt[pull_sub] = lens.centroid + f[:, None] * (inner_hits[pull_sub] - lens.centroid)

        if push_sub.any():
            step = 0.5 * lens.margin
            cand = outer_hits[push_sub] + step * directions[push_sub]
            still_inside = points_in_polygon(lens.outer, cand, tol)
            if still_inside.any():
                # interpolated direction grazed the boundary; eject radially
                sub_rad = radials[push_sub]
                sub_hit = outer_hits[push_sub]
                for row in np.flatnonzero(still_inside):
                    leap = step
                    fix = sub_hit[row] + leap * sub_rad[row]
                    while point_in_polygon(lens.outer, fix, tol):
                        leap *= 2.0
                        fix = sub_hit[row] + leap * sub_rad[row]
                    cand[row] = fix
            tgt[push_sub] = cand

        if ann_sub.any():
            v = values[idx][ann_sub]
            if params.theta_out >= 1.0:
                t = np.ones(len(v))
            else:
                t = (1.0 - v) / (1.0 - params.theta_out)
                t = np.minimum(np.maximum(t, 0.0), 1.0)
            tgt[ann_sub] = inner_hits[ann_sub] + t[:, None] * (
                outer_hits[ann_sub] - inner_hits[ann_sub]
            )

        moved_from_outside = ~in_outer[idx]
        for row, i in enumerate(idx):
            targets[int(i)] = tgt[row]
            if moved_from_outside[row] and (pull_sub[row] or ann_sub[row]):
                traces.append((int(i), live[i].copy(), tgt[row]))

    class_of: list[RelocationClass] = []
    for i in range(n):
        if stay[i]:
            class_of.append(RelocationClass.STAY_INSIDE)
        elif pull[i]:
            class_of.append(RelocationClass.PULL_IN)
        elif push[i]:
            class_of.append(RelocationClass.PUSH_OUT)
        elif annulus[i]:
            class_of.append(RelocationClass.ANNULUS_PLACE)
        else:
            class_of.append(RelocationClass.UNTOUCHED)
    return RelocationPlan(targets=targets, class_of=class_of, traces=traces)


def apply_plan(live_positions: np.ndarray, plan: RelocationPlan) -> np.ndarray:
    """New position matrix with all plan targets applied."""
    out = live_positions.copy()
    for i, target in plan.targets.items():
        out[i] = target
    return out
