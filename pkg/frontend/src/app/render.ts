/**
 * Immediate-mode scatterplot rendering: points colored per phase (density
 * opacity while idle, closeness opacity while inspecting), lens boundaries,
 * fading relocation traces, and the painter disc (green; blue in overwrite
 * mode, yellow in drag mode).
 *
 * Rendering is a pure function of (session, hints, view); it never mutates
 * engine state. The context is a small structural subset of
 * CanvasRenderingContext2D so tests can pass a recording stub.
 */

import type { SessionState, RenderHints } from "../engine/engine.js";
import type { ViewState } from "./view.js";

export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
}

export const BRUSH_COLORS: Record<string, string> = {
  blue: "#1f77b4",
  orange: "#ff7f0e",
  green: "#2ca02c",
  red: "#d62728",
  purple: "#9467bd",
  brown: "#8c564b",
  pink: "#e377c2",
  olive: "#bcbd22",
};

const NEUTRAL = "#5a5f6b";
const POINT_RADIUS = 3;

function polygonPath(ctx: Draw2D, view: ViewState, poly: number[][]): void {
  ctx.beginPath();
  const first = view.toPixels(poly[0]);
  ctx.moveTo(first[0], first[1]);
  for (let i = 1; i < poly.length; i++) {
    const p = view.toPixels(poly[i]);
    ctx.lineTo(p[0], p[1]);
  }
  ctx.closePath();
}

export function renderFrame(
  state: SessionState,
  hints: RenderHints | null,
  view: ViewState,
  ctx: Draw2D,
  width: number,
  height: number,
  now = 0,
): void {
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, width, height);

  const ownerOf = new Map<number, string>();
  for (const brush of state.brushes) {
    for (const p of brush.points) ownerOf.set(p, brush.colorTag);
  }
  const closeness = hints?.closeness ?? null;

  for (let i = 0; i < state.live.length; i++) {
    const animated = view.animatedPosition(i, now);
    const [x, y] = view.toPixels(animated ?? state.live[i]);
    const owner = ownerOf.get(i);
    let color = NEUTRAL;
    let alpha: number;
    if (owner !== undefined) {
      color = BRUSH_COLORS[owner] ?? NEUTRAL;
      alpha = 1.0;
    } else if (state.phase === "idle" || closeness === null) {
      alpha = 0.15 + 0.85 * state.model.densityNorm[i];
    } else {
      const v = closeness.values[i];
      if (v > 0) {
        const active = state.activeBrush !== null
          ? state.brushes[state.activeBrush]?.colorTag ?? "blue"
          : "blue";
        color = BRUSH_COLORS[active] ?? NEUTRAL;
        alpha = 0.1 + 0.9 * v;
      } else {
        alpha = 0.25;
      }
    }
    ctx.globalAlpha = alpha;
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(x, y, POINT_RADIUS, 0, 2 * Math.PI);
    ctx.fill();
  }

  // relocation traces: red paths fading with age
  for (const trace of state.pendingTraces) {
    const life = 1 - trace.age / state.config.traceLifetimeEvents;
    if (life <= 0) continue;
    ctx.globalAlpha = 0.7 * life;
    ctx.strokeStyle = "#d62728";
    ctx.lineWidth = 1;
    const a = view.toPixels(trace.src);
    const b = view.toPixels(trace.dst);
    ctx.beginPath();
    ctx.moveTo(a[0], a[1]);
    ctx.lineTo(b[0], b[1]);
    ctx.stroke();
  }

  if (state.lens !== null) {
    ctx.globalAlpha = 0.9;
    ctx.strokeStyle = "#1f4fd6";
    ctx.lineWidth = 2.5;
    polygonPath(ctx, view, state.lens.inner);
    ctx.stroke();
    ctx.strokeStyle = "#d62728";
    ctx.lineWidth = 1.2;
    polygonPath(ctx, view, state.lens.outer);
    ctx.stroke();
  }

  // painter disc: green, blue when overwriting, yellow when dragging
  const painterColor = state.drag ? "#e6c229" : state.overwrite ? "#2f6fdb" : "#3fae58";
  const [px, py] = view.toPixels(state.painter.center);
  ctx.globalAlpha = 0.85;
  ctx.strokeStyle = painterColor;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.arc(px, py, state.painter.radius * view.viewport.scale, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.globalAlpha = 0.12;
  ctx.fillStyle = painterColor;
  ctx.beginPath();
  ctx.arc(px, py, state.painter.radius * view.viewport.scale, 0, 2 * Math.PI);
  ctx.fill();
  ctx.globalAlpha = 1;
}
