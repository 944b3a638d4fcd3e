/**
 * Shared-nearest-neighbor similarity and per-point density.
 *
 * A shared neighbor at 1-based ranks m and n contributes (k+1-m)*(k+1-n);
 * raw scores are exact integers, normalized by the maximum attainable score
 * k(k+1)(2k+1)/6 (identical lists).
 */

import type { KnnIndex } from "./data.js";

export interface SnnModel {
  k: number;
  simMax: number;
  n: number;
  /** per point: neighbor ids (ascending) with raw integer scores */
  rows: { cols: number[]; raw: number[] }[];
  density: number[];
  densityNorm: number[];
}

export function maxRawScore(k: number): number {
  return (k * (k + 1) * (2 * k + 1)) / 6;
}

export function snnSimilarity(index: KnnIndex, p: number, q: number): number {
  if (p === q) throw new Error("similarity of a point with itself is undefined");
  const k = index.k;
  const rankQ = new Map<number, number>();
  index.neighbors[q].forEach((x, i) => rankQ.set(x, i + 1));
  let total = 0;
  for (let m = 1; m <= k; m++) {
    const r = rankQ.get(index.neighbors[p][m - 1]);
    if (r !== undefined) total += (k + 1 - m) * (k + 1 - r);
  }
  return total;
}

export function buildSnnModel(index: KnnIndex): SnnModel {
  const n = index.neighbors.length;
  const k = index.k;
  // inverted table: for each point x, the (owner, weight) entries citing it
  const owners: number[][] = Array.from({ length: n }, () => []);
  const weights: number[][] = Array.from({ length: n }, () => []);
  for (let p = 0; p < n; p++) {
    for (let r = 0; r < k; r++) {
      const x = index.neighbors[p][r];
      owners[x].push(p);
      weights[x].push(k - r);
    }
  }
  const acc = new Map<number, number>(); // key p*n+q with p<q
  for (let x = 0; x < n; x++) {
    const own = owners[x];
    const wts = weights[x];
    for (let a = 0; a < own.length; a++) {
      for (let b = a + 1; b < own.length; b++) {
        const p = Math.min(own[a], own[b]);
        const q = Math.max(own[a], own[b]);
        const key = p * n + q;
        acc.set(key, (acc.get(key) ?? 0) + wts[a] * wts[b]);
      }
    }
  }
  const adjacency: Map<number, number>[] = Array.from({ length: n }, () => new Map());
  for (const [key, value] of acc) {
    const p = Math.floor(key / n);
    const q = key % n;
    adjacency[p].set(q, value);
    adjacency[q].set(p, value);
  }
  const rows = adjacency.map((m) => {
    const cols = Array.from(m.keys()).sort((a, b) => a - b);
    return { cols, raw: cols.map((c) => m.get(c)!) };
  });
  const density = rows.map((row) => row.raw.reduce((s, v) => s + v, 0));
  let lo = Infinity;
  let hi = -Infinity;
  for (const d of density) {
    if (d < lo) lo = d;
    if (d > hi) hi = d;
  }
  const densityNorm =
    hi === lo ? density.map(() => 1.0) : density.map((d) => (d - lo) / (hi - lo));
  return { k, simMax: maxRawScore(k), n, rows, density, densityNorm };
}

export function normalizedSim(model: SnnModel, p: number, q: number): number {
  if (p === q) throw new Error("similarity of a point with itself is undefined");
  const row = model.rows[p];
  const idx = row.cols.indexOf(q);
  return idx < 0 ? 0.0 : row.raw[idx] / model.simMax;
}
