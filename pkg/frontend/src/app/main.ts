/**
 * Browser wiring: file pickers for dataset/projection, model construction,
 * the interactive canvas loop, parameter sliders, brush controls, and
 * trajectory/labels export. All interaction flows through the InputBridge;
 * rendering polls the session each animation frame.
 */

import { buildKnn, parseDatasetCsv, parseDatasetJson, parseProjectionCsv } from "../engine/data.js";
import type { Dataset, Projection } from "../engine/data.js";
import { buildSnnModel } from "../engine/snn.js";
import {
  DEFAULT_CONFIG,
  exportLabels,
  newSession,
  snapshot,
  type SessionState,
} from "../engine/engine.js";
import { InputBridge } from "./input.js";
import { renderFrame } from "./render.js";
import { renderHeatmap } from "./heatmap.js";
import { ViewState, ANIMATION_MS } from "./view.js";

interface App {
  state: SessionState;
  bridge: InputBridge;
  view: ViewState;
}

let app: App | null = null;
let datasetText: string | null = null;
let datasetName = "";
let projectionText: string | null = null;

const $id = (id: string) => document.getElementById(id)!;

function status(message: string): void {
  $id("status").textContent = message;
}

function startSession(): void {
  if (!datasetText || !projectionText) return;
  const dataset: Dataset = datasetName.endsWith(".json")
    ? parseDatasetJson(datasetText)
    : parseDatasetCsv(datasetText);
  const projection: Projection = parseProjectionCsv(projectionText);
  const k = parseInt(($id("kInput") as HTMLInputElement).value, 10) || 15;
  status(`building similarity model (k=${k}) for ${dataset.values.length} points...`);
  setTimeout(() => {
    const model = buildSnnModel(buildKnn(dataset, k));
    const thetaIn = parseFloat(($id("thetaIn") as HTMLInputElement).value);
    const thetaOut = parseFloat(($id("thetaOut") as HTMLInputElement).value);
    const state = newSession(dataset, projection, model, { thetaIn, thetaOut }, DEFAULT_CONFIG);
    const view = new ViewState();
    const canvas = $id("plot") as HTMLCanvasElement;
    view.fit(state.original, canvas.width, canvas.height);
    const bridge = new InputBridge(state);
    bridge.onEvent((hints) => {
      if (hints.plan) {
        const now = performance.now();
        for (const [i, target] of hints.plan.targets) {
          view.beginAnimation(i, view.animatedPosition(i, now) ?? prevPosition(i), target, now);
        }
      }
      if (hints.endpoints) {
        const now = performance.now();
        for (const [i, pair] of hints.endpoints) {
          view.beginAnimation(i, pair.from, pair.to, now);
        }
      }
      prev = app!.state.live.map((p) => [p[0], p[1]]);
    });
    let prev = state.live.map((p) => [p[0], p[1]]);
    const prevPosition = (i: number): [number, number] => [prev[i][0], prev[i][1]];
    app = { state, bridge, view };
    status(`session ready: ${dataset.values.length} points, ${dataset.values[0].length}D`);
  }, 10);
}

function wireInputs(): void {
  const canvas = $id("plot") as HTMLCanvasElement;

  canvas.addEventListener("pointermove", (ev) => {
    if (!app) return;
    const rect = canvas.getBoundingClientRect();
    const [x, y] = app.view.toLayout(ev.clientX - rect.left, ev.clientY - rect.top);
    app.bridge.pointerMove(x, y);
  });
  canvas.addEventListener("pointerdown", () => app?.bridge.pointerDown());
  canvas.addEventListener("pointerup", () => app?.bridge.pointerUp());
  canvas.addEventListener("wheel", (ev) => {
    if (!app) return;
    ev.preventDefault();
    const step = 0.02 * app.state.extent;
    app.bridge.wheel(ev.deltaY < 0 ? step : -step);
  }, { passive: false });

  window.addEventListener("keydown", (ev) => app?.bridge.keyDown(ev.key));
  window.addEventListener("keyup", (ev) => app?.bridge.keyUp(ev.key));

  ($id("thetaIn") as HTMLInputElement).addEventListener("input", (ev) => {
    const v = parseFloat((ev.target as HTMLInputElement).value);
    $id("thetaInValue").textContent = v.toFixed(2);
    app?.bridge.setThetaIn(v);
  });
  ($id("thetaOut") as HTMLInputElement).addEventListener("input", (ev) => {
    const v = parseFloat((ev.target as HTMLInputElement).value);
    $id("thetaOutValue").textContent = v.toFixed(2);
    app?.bridge.setThetaOut(v);
  });

  $id("newBrush").addEventListener("click", () => {
    app?.bridge.newBrush();
    refreshBrushButtons();
  });
  $id("context").addEventListener("click", () => app?.bridge.toggleContext());
  $id("exportTrajectory").addEventListener("click", () => {
    if (app) download("trajectory.json", JSON.stringify(app.bridge.exportTrajectory(), null, 1));
  });
  $id("exportLabels").addEventListener("click", () => {
    if (app) download("labels.json", JSON.stringify({ labels: exportLabels(app.state) }));
  });
  $id("exportSnapshot").addEventListener("click", () => {
    if (app) download("snapshot.json", JSON.stringify(snapshot(app.state), null, 1));
  });

  $id("datasetFile").addEventListener("change", async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) {
      datasetText = await file.text();
      datasetName = file.name;
      startSession();
    }
  });
  $id("projectionFile").addEventListener("change", async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) {
      projectionText = await file.text();
      startSession();
    }
  });
}

function refreshBrushButtons(): void {
  if (!app) return;
  const holder = $id("brushButtons");
  holder.innerHTML = "";
  for (const brush of app.state.brushes) {
    const button = document.createElement("button");
    button.textContent = `brush ${brush.id}`;
    button.style.borderColor = brush.colorTag;
    button.addEventListener("click", () => app?.bridge.switchBrush(brush.id));
    holder.appendChild(button);
  }
}

function loop(): void {
  if (app) {
    const canvas = $id("plot") as HTMLCanvasElement;
    const ctx = canvas.getContext("2d")!;
    renderFrame(app.state, app.bridge.hints, app.view, ctx, canvas.width, canvas.height,
                performance.now());
    const heat = $id("heatmap") as HTMLCanvasElement;
    const heatCtx = heat.getContext("2d")!;
    renderHeatmap(app.state, heatCtx, heat.width);
    $id("phase").textContent = app.state.phase;
  }
  requestAnimationFrame(loop);
}

function download(name: string, payload: string): void {
  const blob = new Blob([payload], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = name;
  a.click();
  setTimeout(() => URL.revokeObjectURL(url), ANIMATION_MS);
}

wireInputs();
loop();
status("load a dataset CSV/JSON and a projection CSV to begin");
