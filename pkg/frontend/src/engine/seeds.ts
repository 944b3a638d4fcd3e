/** Painter coverage and single-cluster seed selection. */

import type { SnnModel } from "./snn.js";
import type { ClosenessParams } from "./closeness.js";

export interface Painter {
  center: [number, number];
  radius: number;
}

export function coveredPoints(live: number[][], painter: Painter): number[] {
  const out: number[] = [];
  const r2 = painter.radius * painter.radius;
  for (let i = 0; i < live.length; i++) {
    const dx = live[i][0] - painter.center[0];
    const dy = live[i][1] - painter.center[1];
    if (dx * dx + dy * dy <= r2) out.push(i);
  }
  return out;
}

/** Candidate with maximum density; ties go to the lowest index. */
export function densestPoint(model: SnnModel, candidates: number[]): number {
  const cand = [...candidates].sort((a, b) => a - b);
  let best = cand[0];
  let bestDensity = model.density[best];
  for (const c of cand) {
    if (model.density[c] > bestDensity) {
      best = c;
      bestDensity = model.density[c];
    }
  }
  return best;
}

/** Covered points that form a single cluster around the densest cover point. */
export function selectSeeds(model: SnnModel, params: ClosenessParams, covered: number[]): number[] {
  if (covered.length === 0) throw new Error("painter covers no points");
  const cand = [...covered].sort((a, b) => a - b);
  const center = densestPoint(model, cand);
  const qualifying = new Set<number>();
  const row = model.rows[center];
  for (let t = 0; t < row.cols.length; t++) {
    if (row.raw[t] / model.simMax > params.thetaIn) qualifying.add(row.cols[t]);
  }
  const seeds = cand.filter((i) => qualifying.has(i) || i === center);
  return seeds;
}
