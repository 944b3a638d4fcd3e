/**
 * Interactive brushing state machine, mirroring the reference engine:
 * Idle -> Inspect -> TransientLens -> Brushing (+ Contextualized), with
 * deterministic event replay. Sessions recorded here export trajectory and
 * snapshot JSON interchangeable with the CLI.
 */

import type { Dataset, Projection } from "./data.js";
import type { SnnModel } from "./snn.js";
import { classify, type ClosenessParams, type ClosenessResult } from "./closeness.js";
import { coveredPoints, densestPoint, selectSeeds, type Painter } from "./seeds.js";
import {
  applyPlan,
  buildInner,
  buildLens,
  buildPlan,
  polygonDiameter,
  type Lens,
  type RelocationPlan,
} from "./lens.js";

export type Phase = "idle" | "inspect" | "transient_lens" | "brushing" | "contextualized";

export type Event =
  | { type: "MoveTo"; x: number; y: number }
  | { type: "Wheel"; delta: number }
  | { type: "PauseElapsed" }
  | { type: "Press" }
  | { type: "Release" }
  | { type: "SetThetaIn"; value: number }
  | { type: "SetThetaOut"; value: number }
  | { type: "ToggleContext" }
  | { type: "SwitchBrush"; brush_id: number }
  | { type: "NewBrush" }
  | { type: "SetOverwrite"; on: boolean }
  | { type: "SetDrag"; on: boolean };

export interface Brush {
  id: number;
  colorTag: string;
  points: number[];
  active: boolean;
}

export interface TraceRecord {
  index: number;
  src: [number, number];
  dst: [number, number];
  age: number;
}

export interface EngineConfig {
  marginFraction: number;
  alphaFraction: number;
  gridResolution: number;
  bandwidthFactor: number;
  pauseThresholdMs: number;
  traceLifetimeEvents: number;
  painterRadiusFraction: number;
  minPainterRadiusFraction: number;
}

export const DEFAULT_CONFIG: EngineConfig = {
  marginFraction: 0.2,
  alphaFraction: 0.15,
  gridResolution: 64,
  bandwidthFactor: 0.25,
  pauseThresholdMs: 500,
  traceLifetimeEvents: 30,
  painterRadiusFraction: 0.08,
  minPainterRadiusFraction: 0.01,
};

const COLOR_TAGS = ["blue", "orange", "green", "red", "purple", "brown", "pink", "olive"];

export interface SessionState {
  dataset: Dataset;
  model: SnnModel;
  params: ClosenessParams;
  config: EngineConfig;
  original: number[][];
  live: number[][];
  extent: number;
  painter: Painter;
  phase: Phase;
  brushes: Brush[];
  activeBrush: number | null;
  overwrite: boolean;
  drag: boolean;
  seeds: number[] | null;
  lens: Lens | null;
  pendingTraces: TraceRecord[];
  transientSnapshot: { live: number[][]; traces: TraceRecord[] } | null;
  strokeStart: number[][] | null;
  contextStash: number[][] | null;
  contextReturnPhase: Phase;
}

export interface RenderHints {
  closeness?: ClosenessResult | null;
  plan?: RelocationPlan;
  endpoints?: Map<number, { from: [number, number]; to: [number, number] }>;
  dragged?: number;
  confirmed?: number | null;
}

export function newSession(
  dataset: Dataset,
  projection: Projection,
  model: SnnModel,
  params: ClosenessParams,
  config: EngineConfig = DEFAULT_CONFIG,
): SessionState {
  if (projection.positions.length !== dataset.values.length) {
    throw new Error(
      `projection has ${projection.positions.length} rows but dataset has ${dataset.values.length}`,
    );
  }
  if (model.n !== dataset.values.length) {
    throw new Error(`model covers ${model.n} points, dataset has ${dataset.values.length}`);
  }
  const original = projection.positions.map((p) => [p[0], p[1]]);
  let loX = Infinity, loY = Infinity, hiX = -Infinity, hiY = -Infinity;
  for (const [x, y] of original) {
    if (x < loX) loX = x;
    if (y < loY) loY = y;
    if (x > hiX) hiX = x;
    if (y > hiY) hiY = y;
  }
  let extent = Math.max(hiX - loX, hiY - loY);
  if (!(extent > 0)) extent = 1.0;
  return {
    dataset,
    model,
    params,
    config,
    original,
    live: original.map((p) => [p[0], p[1]]),
    extent,
    painter: { center: [loX, loY], radius: config.painterRadiusFraction * extent },
    phase: "idle",
    brushes: [],
    activeBrush: null,
    overwrite: false,
    drag: false,
    seeds: null,
    lens: null,
    pendingTraces: [],
    transientSnapshot: null,
    strokeStart: null,
    contextStash: null,
    contextReturnPhase: "idle",
  };
}

function minPainterRadius(state: SessionState): number {
  return state.config.minPainterRadiusFraction * state.extent;
}

function ageTraces(state: SessionState): void {
  for (const t of state.pendingTraces) t.age += 1;
  state.pendingTraces = state.pendingTraces.filter(
    (t) => t.age < state.config.traceLifetimeEvents,
  );
}

function activeBrush(state: SessionState): Brush | null {
  if (state.activeBrush === null) return null;
  return getBrush(state, state.activeBrush);
}

export function getBrush(state: SessionState, id: number): Brush {
  for (const b of state.brushes) if (b.id === id) return b;
  throw new Error(`unknown brush id ${id}`);
}

function brushOf(state: SessionState, point: number): number | null {
  for (const b of state.brushes) if (b.points.includes(point)) return b.id;
  return null;
}

function createBrush(state: SessionState): Brush {
  const id = state.brushes.length;
  const brush: Brush = { id, colorTag: COLOR_TAGS[id % COLOR_TAGS.length], points: [], active: true };
  for (const other of state.brushes) other.active = false;
  state.brushes.push(brush);
  state.activeBrush = id;
  return brush;
}

function ensureActiveBrush(state: SessionState): Brush {
  return activeBrush(state) ?? createBrush(state);
}

function capture(state: SessionState, indices: Iterable<number>): void {
  const brush = ensureActiveBrush(state);
  const owned = new Set(brush.points);
  const sorted = Array.from(new Set(indices)).sort((a, b) => a - b);
  for (const i of sorted) {
    if (owned.has(i)) continue;
    const owner = brushOf(state, i);
    if (owner !== null && owner !== brush.id) {
      if (!state.overwrite) continue;
      const other = getBrush(state, owner);
      other.points = other.points.filter((p) => p !== i);
    }
    brush.points.push(i);
    owned.add(i);
  }
}

function seedContext(state: SessionState): number[] | null {
  const covered = coveredPoints(state.live, state.painter);
  const brush = activeBrush(state);
  if (brush !== null && brush.points.length > 0) {
    return Array.from(new Set([...brush.points, ...covered])).sort((a, b) => a - b);
  }
  if (covered.length === 0) return null;
  return selectSeeds(state.model, state.params, covered);
}

function lensFor(state: SessionState, anchorPoints: number[]): Lens {
  const positions = anchorPoints.map((i) => state.live[i]);
  let loX = Infinity, loY = Infinity, hiX = -Infinity, hiY = -Infinity;
  for (const [x, y] of positions) {
    if (x < loX) loX = x;
    if (y < loY) loY = y;
    if (x > hiX) hiX = x;
    if (y > hiY) hiY = y;
  }
  const dx = hiX - loX;
  const dy = hiY - loY;
  const diag = Math.sqrt(dx * dx + dy * dy);
  const bandwidth = Math.max(state.config.bandwidthFactor * diag, 0.01 * state.extent);
  const center = densestPoint(state.model, anchorPoints);
  const inner = buildInner(
    positions,
    state.config.alphaFraction,
    state.config.gridResolution,
    bandwidth,
    [state.live[center][0], state.live[center][1]],
  );
  const margin = Math.max(
    state.config.marginFraction * polygonDiameter(inner),
    minPainterRadius(state),
  );
  return buildLens(inner, margin);
}

function relocate(
  state: SessionState,
  cluster: number[],
  lensPoints: number[],
  brushed: number[],
): { result: ClosenessResult; plan: RelocationPlan } {
  const lens = lensFor(state, lensPoints);
  const result = classify(state.model, state.params, cluster);
  const plan = buildPlan(lens, result, state.params, state.live, brushed);
  state.live = applyPlan(state.live, plan);
  state.lens = lens;
  for (const trace of plan.traces) {
    state.pendingTraces.push({ index: trace.index, src: trace.from, dst: trace.to, age: 0 });
  }
  return { result, plan };
}

function revertTransient(state: SessionState): void {
  const snap = state.transientSnapshot!;
  state.live = snap.live;
  state.pendingTraces = snap.traces;
  state.transientSnapshot = null;
  state.lens = null;
  state.phase = "inspect";
}

function restoreForeignPoints(state: SessionState): void {
  if (state.strokeStart === null) return;
  const brush = activeBrush(state);
  const activeId = brush ? brush.id : null;
  for (const other of state.brushes) {
    if (other.id === activeId) continue;
    for (const p of other.points) {
      const now = state.live[p];
      const before = state.strokeStart[p];
      if (now[0] !== before[0] || now[1] !== before[1]) {
        state.live[p] = [before[0], before[1]];
      }
    }
  }
}

export function handleEvent(state: SessionState, event: Event): RenderHints {
  switch (event.type) {
    case "MoveTo":
      return onMove(state, [event.x, event.y]);
    case "Wheel": {
      let radius = Math.max(state.painter.radius + event.delta, minPainterRadius(state));
      radius = Math.min(radius, 2.0 * state.extent);
      state.painter = { center: state.painter.center, radius };
      return {};
    }
    case "PauseElapsed":
      return onPause(state);
    case "Press":
      return onPress(state);
    case "Release":
      return onRelease(state);
    case "SetThetaIn":
      state.params = { thetaIn: event.value, thetaOut: state.params.thetaOut };
      return {};
    case "SetThetaOut":
      state.params = { thetaIn: state.params.thetaIn, thetaOut: event.value };
      return {};
    case "ToggleContext": {
      if (state.phase === "brushing") return {};
      const endpoints = contextualize(state);
      return { endpoints };
    }
    case "SwitchBrush": {
      if (state.phase === "brushing" || state.phase === "transient_lens") return {};
      const brush = getBrush(state, event.brush_id);
      for (const other of state.brushes) other.active = other.id === brush.id;
      state.activeBrush = brush.id;
      return {};
    }
    case "NewBrush":
      if (state.phase === "brushing" || state.phase === "transient_lens") return {};
      createBrush(state);
      return {};
    case "SetOverwrite":
      state.overwrite = !!event.on;
      return {};
    case "SetDrag":
      state.drag = !!event.on;
      return {};
  }
}

function onMove(state: SessionState, pos: [number, number]): RenderHints {
  if (state.phase === "contextualized") {
    state.painter = { center: pos, radius: state.painter.radius };
    return {};
  }
  if (state.phase === "transient_lens") revertTransient(state);
  if (state.phase === "idle") state.phase = "inspect";

  ageTraces(state);
  const previous = state.painter.center;
  state.painter = { center: pos, radius: state.painter.radius };

  const brush = activeBrush(state);
  if (state.drag && brush !== null && brush.points.length > 0) {
    const dx = pos[0] - previous[0];
    const dy = pos[1] - previous[1];
    for (const i of brush.points) {
      state.live[i] = [state.live[i][0] + dx, state.live[i][1] + dy];
    }
    return { dragged: brush.id };
  }

  if (state.phase === "brushing") {
    // settle relocation first: the painter captures relocated points
    const covered = coveredPoints(state.live, state.painter);
    const active = activeBrush(state)!;
    const cluster = Array.from(new Set([...active.points, ...covered])).sort((a, b) => a - b);
    if (cluster.length === 0) return { closeness: null };
    const basis = active.points.length > 0 ? [...active.points] : cluster;
    const { result, plan } = relocate(state, cluster, basis, active.points);
    capture(state, coveredPoints(state.live, state.painter));
    return { closeness: result, plan };
  }

  state.seeds = seedContext(state);
  if (state.seeds === null) return { closeness: null };
  return { closeness: classify(state.model, state.params, state.seeds) };
}

function onPause(state: SessionState): RenderHints {
  if (state.phase !== "inspect" || state.seeds === null || state.seeds.length === 0) {
    return {};
  }
  state.transientSnapshot = {
    live: state.live.map((p) => [p[0], p[1]]),
    traces: state.pendingTraces.map((t) => ({ ...t })),
  };
  const brush = activeBrush(state);
  const brushed = brush !== null && brush.points.length > 0 ? brush.points : state.seeds;
  const { result, plan } = relocate(state, state.seeds, state.seeds, brushed);
  state.phase = "transient_lens";
  return { closeness: result, plan };
}

function onPress(state: SessionState): RenderHints {
  if (state.phase !== "transient_lens") return {};
  state.transientSnapshot = null; // relocation becomes permanent
  state.strokeStart = state.live.map((p) => [p[0], p[1]]);
  state.phase = "brushing";
  ensureActiveBrush(state);
  const covered = coveredPoints(state.live, state.painter);
  const captureSet = new Set<number>(covered);
  if (state.seeds !== null) for (const s of state.seeds) captureSet.add(s);
  capture(state, captureSet);
  const brush = activeBrush(state)!;
  const cluster = Array.from(new Set([...captureSet, ...brush.points])).sort((a, b) => a - b);
  if (cluster.length === 0) return { closeness: null };
  const basis = brush.points.length > 0 ? [...brush.points] : cluster;
  const { result, plan } = relocate(state, cluster, basis, brush.points);
  return { closeness: result, plan };
}

function onRelease(state: SessionState): RenderHints {
  if (state.phase !== "brushing") return {};
  restoreForeignPoints(state);
  state.strokeStart = null;
  state.phase = "inspect";
  state.lens = null;
  const brush = activeBrush(state);
  const covered = coveredPoints(state.live, state.painter);
  const merged = new Set<number>(covered);
  if (brush !== null) for (const p of brush.points) merged.add(p);
  state.seeds = merged.size > 0 ? Array.from(merged).sort((a, b) => a - b) : null;
  return { confirmed: brush ? brush.id : null };
}

export function contextualize(
  state: SessionState,
): Map<number, { from: [number, number]; to: [number, number] }> {
  if (state.phase === "brushing") throw new Error("cannot contextualize while brushing");
  if (state.phase === "transient_lens") revertTransient(state);
  const endpoints = new Map<number, { from: [number, number]; to: [number, number] }>();
  const n = state.original.length;
  if (state.phase === "contextualized") {
    const stash = state.contextStash!;
    for (let i = 0; i < n; i++) {
      endpoints.set(i, {
        from: [state.live[i][0], state.live[i][1]],
        to: [stash[i][0], stash[i][1]],
      });
    }
    state.live = stash;
    state.contextStash = null;
    state.phase = state.contextReturnPhase;
  } else {
    state.contextStash = state.live;
    state.contextReturnPhase = state.phase;
    for (let i = 0; i < n; i++) {
      endpoints.set(i, {
        from: [state.live[i][0], state.live[i][1]],
        to: [state.original[i][0], state.original[i][1]],
      });
    }
    state.live = state.original.map((p) => [p[0], p[1]]);
    state.phase = "contextualized";
  }
  return endpoints;
}

export function heatmapOrder(state: SessionState): number[] {
  const seen: number[] = [];
  const taken = new Set<number>();
  for (const brush of state.brushes) {
    for (const p of brush.points) {
      seen.push(p);
      taken.add(p);
    }
  }
  for (let i = 0; i < state.original.length; i++) {
    if (!taken.has(i)) seen.push(i);
  }
  return seen;
}

export function exportLabels(state: SessionState): number[] {
  const labels = new Array<number>(state.original.length).fill(-1);
  for (const brush of state.brushes) {
    for (const p of brush.points) labels[p] = brush.id;
  }
  return labels;
}

export function snapshot(state: SessionState): object {
  return {
    phase: state.phase,
    live: state.live.map((p) => [p[0], p[1]]),
    brushes: state.brushes.map((b) => ({
      id: b.id,
      colorTag: b.colorTag,
      points: [...b.points],
      active: b.id === state.activeBrush,
    })),
    lens:
      state.lens === null
        ? null
        : {
            inner: state.lens.inner.map((p) => [p[0], p[1]]),
            outer: state.lens.outer.map((p) => [p[0], p[1]]),
            margin: state.lens.margin,
          },
    traces: state.pendingTraces.map((t) => ({
      index: t.index,
      from: [t.src[0], t.src[1]],
      to: [t.dst[0], t.dst[1]],
      age: t.age,
    })),
    params: { thetaIn: state.params.thetaIn, thetaOut: state.params.thetaOut },
    painter: {
      x: state.painter.center[0],
      y: state.painter.center[1],
      radius: state.painter.radius,
    },
  };
}

export function trajectoryJson(
  params: ClosenessParams,
  painterRadius: number,
  events: Event[],
): object {
  return {
    params: { thetaIn: params.thetaIn, thetaOut: params.thetaOut, painterRadius },
    events,
  };
}
