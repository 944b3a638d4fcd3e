/**
 * Lens construction and point relocation geometry.
 *
 * Every formula mirrors the reference engine operation for operation, so a
 * session exported from the browser replays in the CLI to identical
 * positions: kernel density over a padded grid, marching-squares iso
 * contour, convex hull with corner-field smoothing, bisector-offset outer
 * boundary, and per-class relocation targets.
 */

import { expNeg } from "./mathx.js";
import type { ClosenessParams, ClosenessResult } from "./closeness.js";

export class GeometryError extends Error {}

export interface DensityGrid {
  origin: [number, number];
  cellSize: number;
  values: Float64Array; // resolution x resolution, row-major [i * g + j]
  resolution: number;
}

export interface Lens {
  inner: number[][];
  outer: number[][];
  margin: number;
  bisectors: number[][];
  centroid: [number, number];
  cornerAngles: number[];
  bisectorAngles: number[];
  diameter: number;
}

export type RelocationClass =
  | "stay_inside"
  | "pull_in"
  | "push_out"
  | "annulus_place"
  | "untouched";

export interface RelocationPlan {
  targets: Map<number, [number, number]>;
  classOf: RelocationClass[];
  traces: { index: number; from: [number, number]; to: [number, number] }[];
}

const OUTLIER_PULL = 0.995;

export function kdeGrid(points: number[][], resolution: number, bandwidth: number): DensityGrid {
  if (points.length < 1) throw new GeometryError("kde needs at least one point");
  if (!(bandwidth > 0)) throw new GeometryError("bandwidth must be positive");
  if (resolution < 8) throw new GeometryError("grid resolution must be >= 8");
  let loX = Infinity, loY = Infinity, hiX = -Infinity, hiY = -Infinity;
  for (const [x, y] of points) {
    if (x < loX) loX = x;
    if (y < loY) loY = y;
    if (x > hiX) hiX = x;
    if (y > hiY) hiY = y;
  }
  loX -= 3.0 * bandwidth;
  loY -= 3.0 * bandwidth;
  hiX += 3.0 * bandwidth;
  hiY += 3.0 * bandwidth;
  const span = Math.max(hiX - loX, hiY - loY);
  const centerX = (loX + hiX) / 2.0;
  const centerY = (loY + hiY) / 2.0;
  const cell = span / (resolution - 1);
  const originX = centerX - span / 2.0;
  const originY = centerY - span / 2.0;

  const xs = new Float64Array(resolution);
  const ys = new Float64Array(resolution);
  for (let i = 0; i < resolution; i++) {
    xs[i] = originX + i * cell;
    ys[i] = originY + i * cell;
  }
  const invTwoH2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const values = new Float64Array(resolution * resolution);
  const ex = new Float64Array(resolution);
  const ey = new Float64Array(resolution);
  for (const [px, py] of points) {
    for (let i = 0; i < resolution; i++) {
      const dx = xs[i] - px;
      ex[i] = expNeg(-(dx * dx) * invTwoH2);
      const dy = ys[i] - py;
      ey[i] = expNeg(-(dy * dy) * invTwoH2);
    }
    for (let i = 0; i < resolution; i++) {
      const exi = ex[i];
      for (let j = 0; j < resolution; j++) {
        values[i * resolution + j] += exi * ey[j];
      }
    }
  }
  return { origin: [originX, originY], cellSize: cell, values, resolution };
}

// local edges of a cell: 0 bottom, 1 right, 2 top, 3 left
const CASE_EDGES: Record<number, [number, number][]> = {
  1: [[3, 0]],
  2: [[0, 1]],
  3: [[3, 1]],
  4: [[1, 2]],
  6: [[0, 2]],
  7: [[3, 2]],
  8: [[2, 3]],
  9: [[2, 0]],
  11: [[2, 1]],
  12: [[1, 3]],
  13: [[1, 0]],
  14: [[0, 3]],
};

export function marchingSquares(grid: DensityGrid, alpha: number): number[][][] {
  if (!(alpha > 0)) throw new GeometryError("alpha must be positive");
  const g = grid.resolution;
  const v = (i: number, j: number) => grid.values[i * g + j];
  const inside = (i: number, j: number) =>
    i > 0 && j > 0 && i < g - 1 && j < g - 1 && v(i, j) > alpha;

  let anyInside = false;
  for (let i = 1; i < g - 1 && !anyInside; i++) {
    for (let j = 1; j < g - 1; j++) {
      if (v(i, j) > alpha) {
        anyInside = true;
        break;
      }
    }
  }
  if (!anyInside) throw new GeometryError(`no grid value exceeds level ${alpha}`);

  const crossPos = new Map<string, [number, number]>();
  const edgePoint = (
    i0: number, j0: number, i1: number, j1: number, key: string,
  ): [number, number] => {
    let pt = crossPos.get(key);
    if (pt === undefined) {
      const v0 = v(i0, j0);
      const v1 = v(i1, j1);
      let t = v1 !== v0 ? (alpha - v0) / (v1 - v0) : 0.5;
      t = Math.min(Math.max(t, 0.0), 1.0);
      const x = (grid.origin[0] + i0 * grid.cellSize) + t * ((i1 - i0) * grid.cellSize);
      const y = (grid.origin[1] + j0 * grid.cellSize) + t * ((j1 - j0) * grid.cellSize);
      pt = [x, y];
      crossPos.set(key, pt);
    }
    return pt;
  };

  const localEdgeKey = (ci: number, cj: number, e: number): string => {
    if (e === 0) return `${ci},${cj},h`;
    if (e === 1) return `${ci + 1},${cj},v`;
    if (e === 2) return `${ci},${cj + 1},h`;
    return `${ci},${cj},v`;
  };
  const localEdgeNodes = (ci: number, cj: number, e: number): [number, number, number, number] => {
    if (e === 0) return [ci, cj, ci + 1, cj];
    if (e === 1) return [ci + 1, cj, ci + 1, cj + 1];
    if (e === 2) return [ci, cj + 1, ci + 1, cj + 1];
    return [ci, cj, ci, cj + 1];
  };

  const segments: [string, string][] = [];
  for (let ci = 0; ci < g - 1; ci++) {
    for (let cj = 0; cj < g - 1; cj++) {
      const c0 = inside(ci, cj) ? 1 : 0;
      const c1 = inside(ci + 1, cj) ? 2 : 0;
      const c2 = inside(ci + 1, cj + 1) ? 4 : 0;
      const c3 = inside(ci, cj + 1) ? 8 : 0;
      const caseId = c0 | c1 | c2 | c3;
      if (caseId === 0 || caseId === 15) continue;
      let pairs: [number, number][];
      if (caseId === 5 || caseId === 10) {
        const center = (v(ci, cj) + v(ci + 1, cj) + v(ci + 1, cj + 1) + v(ci, cj + 1)) / 4.0;
        const joined = center > alpha;
        if (caseId === 5) {
          pairs = !joined ? [[3, 0], [1, 2]] : [[3, 2], [1, 0]];
        } else {
          pairs = !joined ? [[0, 1], [2, 3]] : [[0, 3], [2, 1]];
        }
      } else {
        pairs = CASE_EDGES[caseId];
      }
      for (const [ea, eb] of pairs) {
        const ka = localEdgeKey(ci, cj, ea);
        const kb = localEdgeKey(ci, cj, eb);
        const [a0, a1, a2, a3] = localEdgeNodes(ci, cj, ea);
        edgePoint(a0, a1, a2, a3, ka);
        const [b0, b1, b2, b3] = localEdgeNodes(ci, cj, eb);
        edgePoint(b0, b1, b2, b3, kb);
        segments.push([ka, kb]);
      }
    }
  }
  if (segments.length === 0) {
    throw new GeometryError(`no cell edge crosses level ${alpha}`);
  }

  const incident = new Map<string, number[]>();
  segments.forEach(([ka, kb], idx) => {
    (incident.get(ka) ?? incident.set(ka, []).get(ka)!).push(idx);
    (incident.get(kb) ?? incident.set(kb, []).get(kb)!).push(idx);
  });

  const used = new Array(segments.length).fill(false);
  const loops: number[][][] = [];
  for (let start = 0; start < segments.length; start++) {
    if (used[start]) continue;
    used[start] = true;
    const [ka, kb] = segments[start];
    const chain = [ka, kb];
    let current = kb;
    let closed = false;
    for (;;) {
      let next = -1;
      for (const idx of incident.get(current) ?? []) {
        if (!used[idx]) {
          next = idx;
          break;
        }
      }
      if (next < 0) break;
      used[next] = true;
      const [a, b] = segments[next];
      current = a === current ? b : a;
      if (current === chain[0]) {
        closed = true;
        break;
      }
      chain.push(current);
    }
    if (closed && chain.length >= 3) {
      loops.push(chain.map((key) => {
        const p = crossPos.get(key)!;
        return [p[0], p[1]];
      }));
    }
  }
  if (loops.length === 0) {
    throw new GeometryError("contour segments do not form a closed loop");
  }
  return loops;
}

function cross(ox: number, oy: number, ax: number, ay: number, bx: number, by: number): number {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

export function convexHull(points: number[][]): number[][] {
  const sorted = points
    .map((p) => [p[0], p[1]] as [number, number])
    .sort((a, b) => (a[0] !== b[0] ? a[0] - b[0] : a[1] - b[1]));
  const uniq: [number, number][] = [];
  for (const p of sorted) {
    const last = uniq[uniq.length - 1];
    if (!last || last[0] !== p[0] || last[1] !== p[1]) uniq.push(p);
  }
  if (uniq.length < 3) throw new GeometryError(`need >= 3 distinct points, got ${uniq.length}`);

  const half = (seq: [number, number][]) => {
    const h: [number, number][] = [];
    for (const p of seq) {
      while (
        h.length >= 2 &&
        cross(h[h.length - 2][0], h[h.length - 2][1], h[h.length - 1][0], h[h.length - 1][1], p[0], p[1]) <= 0
      ) {
        h.pop();
      }
      h.push(p);
    }
    return h;
  };
  const lower = half(uniq);
  const upper = half([...uniq].reverse());
  const hull = lower.slice(0, -1).concat(upper.slice(0, -1));
  if (hull.length < 3) throw new GeometryError("all points are collinear");
  return hull.map((p) => [p[0], p[1]]);
}

export function polygonArea(poly: number[][]): number {
  let total = 0.0;
  const m = poly.length;
  for (let i = 0; i < m; i++) {
    const j = (i + 1) % m;
    total += poly[i][0] * poly[j][1] - poly[j][0] * poly[i][1];
  }
  return 0.5 * total;
}

export function polygonCentroid(poly: number[][]): [number, number] {
  const m = poly.length;
  let area2 = 0.0;
  let cx = 0.0;
  let cy = 0.0;
  for (let i = 0; i < m; i++) {
    const j = (i + 1) % m;
    const w = poly[i][0] * poly[j][1] - poly[j][0] * poly[i][1];
    area2 += w;
    cx += (poly[i][0] + poly[j][0]) * w;
    cy += (poly[i][1] + poly[j][1]) * w;
  }
  const area = 0.5 * area2;
  if (Math.abs(area) < 1e-300) {
    let tx = 0.0;
    let ty = 0.0;
    for (let i = 0; i < m; i++) {
      tx += poly[i][0];
      ty += poly[i][1];
    }
    return [tx / m, ty / m];
  }
  return [cx / (6.0 * area), cy / (6.0 * area)];
}

export function polygonDiameter(poly: number[][]): number {
  let best = 0.0;
  for (let i = 0; i < poly.length; i++) {
    for (let j = 0; j < poly.length; j++) {
      const dx = poly[i][0] - poly[j][0];
      const dy = poly[i][1] - poly[j][1];
      const d2 = dx * dx + dy * dy;
      if (d2 > best) best = d2;
    }
  }
  return Math.sqrt(best);
}

export function pointInPolygon(poly: number[][], p: [number, number] | number[], tol = 0.0): boolean {
  const m = poly.length;
  for (let i = 0; i < m; i++) {
    const a = poly[i];
    const b = poly[(i + 1) % m];
    if ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < -tol) return false;
  }
  return true;
}

function regularPolygon(center: [number, number], radius: number, sides = 12): number[][] {
  const out: number[][] = [];
  for (let j = 0; j < sides; j++) {
    const angle = (2.0 * Math.PI * j) / sides;
    out.push([center[0] + radius * Math.cos(angle), center[1] + radius * Math.sin(angle)]);
  }
  return out;
}

function outwardNormal(a: number[], b: number[]): [number, number] {
  const dx = b[0] - a[0];
  const dy = b[1] - a[1];
  const norm = Math.sqrt(dx * dx + dy * dy);
  return [dy / norm, -dx / norm];
}

function bisectorAnglesOf(poly: number[][]): number[] {
  const m = poly.length;
  const angles = new Array<number>(m);
  for (let j = 0; j < m; j++) {
    const nPrev = outwardNormal(poly[(j - 1 + m) % m], poly[j]);
    const nNext = outwardNormal(poly[j], poly[(j + 1) % m]);
    angles[j] = Math.atan2(nPrev[1] + nNext[1], nPrev[0] + nNext[0]);
  }
  return angles;
}

/** Merge corners whose bisector turn is packed into a tiny angular gap. */
function smoothCornerField(polyIn: number[][], ratioCap = 40.0, minVertices = 8): number[][] {
  let poly = polyIn.map((p) => [p[0], p[1]]);
  while (poly.length > minVertices) {
    const m = poly.length;
    const centroid = polygonCentroid(poly);
    const alpha = poly.map((p) => Math.atan2(p[1] - centroid[1], p[0] - centroid[0]));
    const beta = bisectorAnglesOf(poly);
    const ratios = new Array<number>(m);
    for (let j = 0; j < m; j++) {
      const jn = (j + 1) % m;
      let gapA = (alpha[jn] - alpha[j]) % (2.0 * Math.PI);
      if (gapA < 0) gapA += 2.0 * Math.PI;
      let gapB = beta[jn] - beta[j];
      gapB = ((gapB + Math.PI) % (2.0 * Math.PI) + 2.0 * Math.PI) % (2.0 * Math.PI) - Math.PI;
      gapB = Math.abs(gapB);
      ratios[j] = gapA > 0.0 ? gapB / gapA : Infinity;
    }
    let worst = 0;
    for (let j = 1; j < m; j++) {
      if (ratios[j] > ratios[worst]) worst = j;
    }
    if (ratios[worst] <= ratioCap) break;
    const j1 = (worst + 1) % m;
    const drop = ratios[(worst - 1 + m) % m] <= ratios[j1] ? worst : j1;
    poly.splice(drop, 1);
  }
  return poly;
}

export function buildInner(
  brushPositions: number[][],
  alphaFraction: number,
  resolution: number,
  bandwidth: number,
  anchor: [number, number] | null = null,
): number[][] {
  if (brushPositions.length < 1) throw new GeometryError("need at least one point");
  let cx = 0.0;
  let cy = 0.0;
  for (const [x, y] of brushPositions) {
    cx += x;
    cy += y;
  }
  const center: [number, number] = [cx / brushPositions.length, cy / brushPositions.length];
  if (brushPositions.length < 3) return regularPolygon(center, bandwidth);
  const grid = kdeGrid(brushPositions, resolution, bandwidth);
  let max = -Infinity;
  for (const value of grid.values) if (value > max) max = value;
  const loops = marchingSquares(grid, alphaFraction * max);
  let chosen: number[][] | null = null;
  if (anchor !== null && loops.length > 1) {
    for (const loop of loops) {
      if (pointInLoop(loop, anchor)) {
        chosen = loop;
        break;
      }
    }
  }
  if (chosen === null) {
    chosen = loops[0];
    let bestArea = Math.abs(polygonArea(chosen));
    for (const loop of loops.slice(1)) {
      const a = Math.abs(polygonArea(loop));
      if (a > bestArea) {
        chosen = loop;
        bestArea = a;
      }
    }
  }
  try {
    return smoothCornerField(convexHull(chosen));
  } catch (err) {
    if (err instanceof GeometryError) return regularPolygon(center, bandwidth);
    throw err;
  }
}

function pointInLoop(loop: number[][], p: [number, number]): boolean {
  let inside = false;
  const m = loop.length;
  for (let i = 0; i < m; i++) {
    const [x0, y0] = loop[i];
    const [x1, y1] = loop[(i + 1) % m];
    if ((y0 > p[1]) !== (y1 > p[1])) {
      const xt = x0 + ((p[1] - y0) / (y1 - y0)) * (x1 - x0);
      if (xt > p[0]) inside = !inside;
    }
  }
  return inside;
}

export function buildOuter(inner: number[][], margin: number): { outer: number[][]; bisectors: number[][] } {
  if (!(margin > 0)) throw new GeometryError("margin must be positive");
  const m = inner.length;
  if (m < 3) throw new GeometryError("inner polygon needs >= 3 vertices");
  const bisectors: number[][] = [];
  for (let j = 0; j < m; j++) {
    const nPrev = outwardNormal(inner[(j - 1 + m) % m], inner[j]);
    const nNext = outwardNormal(inner[j], inner[(j + 1) % m]);
    const bx = nPrev[0] + nNext[0];
    const by = nPrev[1] + nNext[1];
    const norm = Math.sqrt(bx * bx + by * by);
    if (norm === 0.0) throw new GeometryError(`undefined bisector at corner ${j}`);
    bisectors.push([bx / norm, by / norm]);
  }
  const outer = inner.map((p, j) => [p[0] + margin * bisectors[j][0], p[1] + margin * bisectors[j][1]]);
  for (let j = 0; j < m; j++) {
    const a = outer[j];
    const b = outer[(j + 1) % m];
    const c = outer[(j + 2) % m];
    if ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) < 0) {
      throw new GeometryError("offset corners produced a non-convex outer boundary");
    }
  }
  return { outer, bisectors };
}

export function buildLens(inner: number[][], margin: number): Lens {
  const { outer, bisectors } = buildOuter(inner, margin);
  const centroid = polygonCentroid(inner);
  return {
    inner,
    outer,
    margin,
    bisectors,
    centroid,
    cornerAngles: inner.map((p) => Math.atan2(p[1] - centroid[1], p[0] - centroid[0])),
    bisectorAngles: bisectors.map((b) => Math.atan2(b[1], b[0])),
    diameter: polygonDiameter(inner),
  };
}

function radialOf(lens: Lens, px: number, py: number): [number, number] {
  const vx = px - lens.centroid[0];
  const vy = py - lens.centroid[1];
  if (vx === 0.0 && vy === 0.0) return [1.0, 0.0];
  const norm = Math.sqrt(vx * vx + vy * vy);
  return [vx / norm, vy / norm];
}

function directionOf(lens: Lens, radial: [number, number]): [number, number] {
  const phi = Math.atan2(radial[1], radial[0]);
  const alpha = lens.cornerAngles;
  const beta = lens.bisectorAngles;
  const m = alpha.length;
  let j0 = 0;
  let bestOff = Infinity;
  for (let j = 0; j < m; j++) {
    let off = phi - alpha[j];
    if (off < 0.0) off += 2.0 * Math.PI;
    if (off < bestOff) {
      bestOff = off;
      j0 = j;
    }
  }
  const j1 = (j0 + 1) % m;
  let gap = alpha[j1] - alpha[j0];
  if (gap <= 0.0) gap += 2.0 * Math.PI;
  const t = Math.min(Math.max(bestOff / gap, 0.0), 1.0);
  let delta = beta[j1] - beta[j0];
  if (delta <= -Math.PI) delta += 2.0 * Math.PI;
  if (delta > Math.PI) delta -= 2.0 * Math.PI;
  const angle = beta[j0] + t * delta;
  return [Math.cos(angle), Math.sin(angle)];
}

function hitOf(lens: Lens, radial: [number, number], poly: number[][]): [number, number] {
  const [ox, oy] = lens.centroid;
  let best = Infinity;
  const m = poly.length;
  for (let i = 0; i < m; i++) {
    const a = poly[i];
    const b = poly[(i + 1) % m];
    const ex = b[0] - a[0];
    const ey = b[1] - a[1];
    const denom = radial[0] * ey - radial[1] * ex;
    if (denom === 0.0) continue;
    const qx = a[0] - ox;
    const qy = a[1] - oy;
    const t = (qx * ey - qy * ex) / denom;
    const s = (qx * radial[1] - qy * radial[0]) / denom;
    if (t > 0.0 && s >= -1e-12 && s <= 1.0 + 1e-12 && t < best) best = t;
  }
  if (!Number.isFinite(best)) throw new GeometryError("radial ray does not intersect polygon");
  return [ox + best * radial[0], oy + best * radial[1]];
}

export interface RelocationRay {
  direction: [number, number];
  innerHit: [number, number];
  outerHit: [number, number];
}

export function relocationRay(lens: Lens, p: [number, number] | number[]): RelocationRay {
  const radial = radialOf(lens, p[0], p[1]);
  return {
    direction: directionOf(lens, radial),
    innerHit: hitOf(lens, radial, lens.inner),
    outerHit: hitOf(lens, radial, lens.outer),
  };
}

export function buildPlan(
  lens: Lens,
  closeness: ClosenessResult,
  params: ClosenessParams,
  live: number[][],
  brushed: Iterable<number>,
): RelocationPlan {
  const n = live.length;
  const member = closeness.memberMask.slice();
  for (const i of brushed) member[i] = true;
  const values = closeness.values;
  const scale = Math.max(lens.diameter, 1e-300);
  const tol = 1e-12 * scale * scale;

  const targets = new Map<number, [number, number]>();
  const classOf: RelocationClass[] = new Array(n);
  const traces: RelocationPlan["traces"] = [];

  for (let i = 0; i < n; i++) {
    const pos = live[i];
    const v = values[i];
    const isMember = member[i];
    const inInner = pointInPolygon(lens.inner, pos, tol);
    const inOuter = pointInPolygon(lens.outer, pos, tol);
    const keeper = isMember || v === 1.0;

    if (keeper && inInner) {
      classOf[i] = "stay_inside";
      continue;
    }
    if (keeper) {
      const radial = radialOf(lens, pos[0], pos[1]);
      const innerHit = hitOf(lens, radial, lens.inner);
      let f: number;
      if (isMember) {
        f = OUTLIER_PULL;
      } else {
        const dx = innerHit[0] - pos[0];
        const dy = innerHit[1] - pos[1];
        const d = Math.sqrt(dx * dx + dy * dy);
        f = 1.0 / (1.0 + d / scale);
      }
      const target: [number, number] = [
        lens.centroid[0] + f * (innerHit[0] - lens.centroid[0]),
        lens.centroid[1] + f * (innerHit[1] - lens.centroid[1]),
      ];
      targets.set(i, target);
      classOf[i] = "pull_in";
      if (!inOuter) traces.push({ index: i, from: [pos[0], pos[1]], to: target });
      continue;
    }
    if (v === 0.0) {
      if (inOuter) {
        const radial = radialOf(lens, pos[0], pos[1]);
        const outerHit = hitOf(lens, radial, lens.outer);
        const direction = directionOf(lens, radial);
        let step = 0.5 * lens.margin;
        let target: [number, number] = [
          outerHit[0] + step * direction[0],
          outerHit[1] + step * direction[1],
        ];
        if (pointInPolygon(lens.outer, target, tol)) {
          target = [outerHit[0] + step * radial[0], outerHit[1] + step * radial[1]];
          while (pointInPolygon(lens.outer, target, tol)) {
            step *= 2.0;
            target = [outerHit[0] + step * radial[0], outerHit[1] + step * radial[1]];
          }
        }
        targets.set(i, target);
        classOf[i] = "push_out";
      } else {
        classOf[i] = "untouched";
      }
      continue;
    }
    // uncertain
    if (!inOuter && v < params.thetaOut) {
      classOf[i] = "untouched";
      continue;
    }
    const radial = radialOf(lens, pos[0], pos[1]);
    const innerHit = hitOf(lens, radial, lens.inner);
    const outerHit = hitOf(lens, radial, lens.outer);
    let t: number;
    if (params.thetaOut >= 1.0) {
      t = 1.0;
    } else {
      t = (1.0 - v) / (1.0 - params.thetaOut);
      t = Math.min(Math.max(t, 0.0), 1.0);
    }
    const target: [number, number] = [
      innerHit[0] + t * (outerHit[0] - innerHit[0]),
      innerHit[1] + t * (outerHit[1] - innerHit[1]),
    ];
    targets.set(i, target);
    classOf[i] = "annulus_place";
    if (!inOuter) traces.push({ index: i, from: [pos[0], pos[1]], to: target });
  }
  return { targets, classOf, traces };
}

export function applyPlan(live: number[][], plan: RelocationPlan): number[][] {
  const out = live.map((p) => [p[0], p[1]]);
  for (const [i, target] of plan.targets) {
    out[i] = [target[0], target[1]];
  }
  return out;
}

export function defaultBandwidth(brushPositions: number[][], projectionExtent: number): number {
  let loX = Infinity, loY = Infinity, hiX = -Infinity, hiY = -Infinity;
  for (const [x, y] of brushPositions) {
    if (x < loX) loX = x;
    if (y < loY) loY = y;
    if (x > hiX) hiX = x;
    if (y > hiY) hiY = y;
  }
  const dx = hiX - loX;
  const dy = hiY - loY;
  const diag = Math.sqrt(dx * dx + dy * dy);
  return Math.max(0.25 * diag, 0.01 * projectionExtent);
}
