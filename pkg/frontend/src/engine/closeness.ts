/**
 * Cluster-membership closeness and the derived point classes.
 * Averages come from exact integer score sums divided once, matching the
 * reference engine bit-for-bit.
 */

import type { SnnModel } from "./snn.js";

export type PointClass = "member" | "true_neighbor" | "uncertain" | "non_neighbor";

export interface ClosenessParams {
  thetaIn: number; // [0, 1)
  thetaOut: number; // [0, 1]
}

export interface ClosenessResult {
  values: Float64Array;
  classes: PointClass[];
  memberMask: boolean[];
}

export function classify(model: SnnModel, params: ClosenessParams, C: Iterable<number>): ClosenessResult {
  const n = model.n;
  const member: boolean[] = new Array(n).fill(false);
  let any = false;
  for (const i of C) {
    member[i] = true;
    any = true;
  }
  if (!any) throw new Error("cluster C must be nonempty");

  const values = new Float64Array(n);
  const classes: PointClass[] = new Array(n);
  for (let p = 0; p < n; p++) {
    const row = model.rows[p];
    let cutSum = 0;
    let cutCount = 0;
    let rowSum = 0;
    for (let t = 0; t < row.cols.length; t++) {
      const raw = row.raw[t];
      rowSum += raw;
      if (member[row.cols[t]] && raw / model.simMax > params.thetaIn) {
        cutSum += raw;
        cutCount += 1;
      }
    }
    const aIn = cutCount > 0 ? cutSum / (cutCount * model.simMax) : 0.0;
    const aAll = row.cols.length > 0 ? rowSum / (row.cols.length * model.simMax) : 0.0;
    let value: number;
    if (member[p]) {
      value = 1.0;
    } else if (aAll === 0.0) {
      value = aIn > 0.0 ? 1.0 : 0.0;
    } else {
      value = Math.min(aIn / aAll, 1.0);
    }
    values[p] = value;
    classes[p] = member[p]
      ? "member"
      : value === 1.0
        ? "true_neighbor"
        : value === 0.0
          ? "non_neighbor"
          : "uncertain";
  }
  return { values, classes, memberMask: member };
}
