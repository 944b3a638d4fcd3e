/**
 * Similarity heatmap: the pairwise similarity matrix reordered so brushed
 * clusters form colored blocks along the diagonal. Unbrushed points render
 * in grey. When the matrix exceeds the panel's pixels, cells downsample by
 * max-pooling so thin high-similarity structure stays visible.
 */

import type { SessionState } from "../engine/engine.js";
import { heatmapOrder } from "../engine/engine.js";
import { BRUSH_COLORS, type Draw2D } from "./render.js";

const GREY = "#888f99";

export function renderHeatmap(state: SessionState, ctx: Draw2D, panel: number): void {
  const n = state.model.n;
  const order = heatmapOrder(state);
  const position = new Array<number>(n);
  order.forEach((p, idx) => (position[p] = idx));

  const ownerOf = new Map<number, string>();
  for (const brush of state.brushes) {
    for (const p of brush.points) ownerOf.set(p, brush.colorTag);
  }

  const pixels = Math.min(panel, n);
  const cell = panel / pixels;
  const block = n / pixels;

  // per pixel: strongest similarity and its color class
  const alphaBuf = new Float32Array(pixels * pixels);
  const colorBuf = new Array<string>(pixels * pixels).fill(GREY);

  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, panel, panel);

  const put = (p: number, q: number, alpha: number) => {
    const a = Math.min(Math.floor(position[p] / block), pixels - 1);
    const b = Math.min(Math.floor(position[q] / block), pixels - 1);
    const at = a * pixels + b;
    if (alpha > alphaBuf[at]) {
      alphaBuf[at] = alpha;
      const cp = ownerOf.get(p);
      const cq = ownerOf.get(q);
      colorBuf[at] = cp !== undefined && cp === cq ? BRUSH_COLORS[cp] ?? GREY : GREY;
    }
  };

  for (let p = 0; p < n; p++) {
    put(p, p, 1.0); // diagonal: self
    const row = state.model.rows[p];
    for (let t = 0; t < row.cols.length; t++) {
      put(p, row.cols[t], row.raw[t] / state.model.simMax);
    }
  }

  for (let a = 0; a < pixels; a++) {
    for (let b = 0; b < pixels; b++) {
      const alpha = alphaBuf[a * pixels + b];
      if (alpha <= 0) continue;
      ctx.globalAlpha = Math.min(0.08 + 0.92 * alpha, 1);
      ctx.fillStyle = colorBuf[a * pixels + b];
      fillCell(ctx, b * cell, a * cell, cell);
    }
  }
  ctx.globalAlpha = 1;
}

function fillCell(ctx: Draw2D, x: number, y: number, size: number): void {
  ctx.beginPath();
  ctx.moveTo(x, y);
  ctx.lineTo(x + size, y);
  ctx.lineTo(x + size, y + size);
  ctx.lineTo(x, y + size);
  ctx.closePath();
  ctx.fill();
}
