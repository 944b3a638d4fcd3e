/**
 * Dataset/projection parsing and exact kNN construction.
 *
 * Formats match the CLI: dataset CSV has a header row, numeric feature
 * columns and an optional integer `label` column; projection CSV is `x,y`.
 * Distances accumulate per dimension in fixed order so results are
 * bit-identical to the reference engine.
 */

export interface Dataset {
  values: number[][]; // n x m
  labels: number[] | null;
}

export interface Projection {
  positions: number[][]; // n x 2
}

export interface KnnIndex {
  k: number;
  neighbors: number[][]; // n x k, ascending distance, ties by index
}

export class DataError extends Error {}

function parseNumber(token: string, row: number, col: number): number {
  const value = Number(token);
  if (!Number.isFinite(value) || token.trim() === "") {
    throw new DataError(`row ${row}, column ${col}: ${JSON.stringify(token)} is not a number`);
  }
  return value;
}

function splitCsv(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.trim() !== "")
    .map((line) => line.split(","));
}

export function parseDatasetCsv(text: string): Dataset {
  const rows = splitCsv(text);
  if (rows.length < 3) {
    throw new DataError("expected a header row and at least 2 data rows");
  }
  const header = rows[0].map((h) => h.trim());
  const labelCol = header.indexOf("label");
  const width = header.length;
  const values: number[][] = [];
  const labels: number[] = [];
  for (let r = 1; r < rows.length; r++) {
    const row = rows[r];
    if (row.length !== width) {
      throw new DataError(`row ${r} has ${row.length} cells, expected ${width}`);
    }
    const feats: number[] = [];
    for (let c = 0; c < row.length; c++) {
      if (c === labelCol) {
        labels.push(parseInt(row[c], 10));
      } else {
        feats.push(parseNumber(row[c], r, c));
      }
    }
    values.push(feats);
  }
  return { values, labels: labelCol >= 0 ? labels : null };
}

export function parseDatasetJson(text: string): Dataset {
  const payload = JSON.parse(text);
  if (!payload || !Array.isArray(payload.values)) {
    throw new DataError("expected an object with a 'values' array");
  }
  return { values: payload.values, labels: payload.labels ?? null };
}

export function parseProjectionCsv(text: string): Projection {
  const rows = splitCsv(text);
  const positions: number[][] = [];
  for (let r = 1; r < rows.length; r++) {
    if (rows[r].length !== 2) {
      throw new DataError(`row ${r} has ${rows[r].length} cells, expected 2`);
    }
    positions.push([parseNumber(rows[r][0], r, 0), parseNumber(rows[r][1], r, 1)]);
  }
  return { positions };
}

/** Squared distance accumulated one dimension at a time (portable rounding). */
export function squaredDistance(a: number[], b: number[]): number {
  let total = 0.0;
  for (let m = 0; m < a.length; m++) {
    const diff = a[m] - b[m];
    total += diff * diff;
  }
  return total;
}

/** Exact kNN by brute force; equal distances keep ascending-index order. */
export function buildKnn(dataset: Dataset, k: number): KnnIndex {
  const n = dataset.values.length;
  if (k < 1 || k > n - 1) {
    throw new DataError(`k must be in [1, ${n - 1}], got ${k}`);
  }
  const neighbors: number[][] = [];
  for (let i = 0; i < n; i++) {
    const order: { d2: number; j: number }[] = [];
    for (let j = 0; j < n; j++) {
      if (j !== i) {
        order.push({ d2: squaredDistance(dataset.values[i], dataset.values[j]), j });
      }
    }
    order.sort((a, b) => (a.d2 !== b.d2 ? a.d2 - b.d2 : a.j - b.j));
    neighbors.push(order.slice(0, k).map((e) => e.j));
  }
  return { k, neighbors };
}
