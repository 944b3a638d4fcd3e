/**
 * Pause semantics: holding the pointer still for the threshold emits exactly
 * one PauseElapsed, the session builds a lens, and the frame renders its
 * boundary polygons.
 */

import { describe, expect, it } from "vitest";

import { buildKnn, type Dataset, type Projection } from "../src/engine/data.js";
import { buildSnnModel } from "../src/engine/snn.js";
import { newSession } from "../src/engine/engine.js";
import { InputBridge, type Scheduler } from "../src/app/input.js";
import { renderFrame, type Draw2D } from "../src/app/render.js";
import { ViewState } from "../src/app/view.js";

class FakeClock {
  now = 0;
  private timers: { id: number; at: number; fn: () => void }[] = [];
  private nextId = 1;

  scheduler: Scheduler = {
    set: (fn, ms) => {
      const id = this.nextId++;
      this.timers.push({ id, at: this.now + ms, fn });
      return id;
    },
    clear: (id) => {
      this.timers = this.timers.filter((t) => t.id !== id);
    },
  };

  advance(ms: number): void {
    const target = this.now + ms;
    for (;;) {
      const due = this.timers.filter((t) => t.at <= target).sort((a, b) => a.at - b.at)[0];
      if (!due) break;
      this.timers = this.timers.filter((t) => t.id !== due.id);
      this.now = due.at;
      due.fn();
    }
    this.now = target;
  }
}

function twoBlobFixture(): { dataset: Dataset; projection: Projection } {
  // deterministic pseudo-random two-blob layout in 6D
  let seed = 1234;
  const rand = () => {
    seed = (seed * 1103515245 + 12345) % 2147483648;
    return seed / 2147483648 - 0.5;
  };
  const values: number[][] = [];
  for (let i = 0; i < 80; i++) {
    const base = i < 40 ? 0 : 12;
    values.push(Array.from({ length: 6 }, (_, d) => (d === 0 ? base : 0) + rand()));
  }
  return {
    dataset: { values, labels: null },
    projection: { positions: values.map((v) => [v[0], v[1]]) },
  };
}

class RecordingCtx implements Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  globalAlpha = 1;
  lineWidth = 1;
  ops: string[] = [];
  strokedStyles: string[] = [];

  clearRect(): void {
    this.ops.push("clearRect");
  }
  beginPath(): void {
    this.ops.push("beginPath");
  }
  moveTo(): void {
    this.ops.push("moveTo");
  }
  lineTo(): void {
    this.ops.push("lineTo");
  }
  closePath(): void {
    this.ops.push("closePath");
  }
  arc(): void {
    this.ops.push("arc");
  }
  fill(): void {
    this.ops.push("fill");
  }
  stroke(): void {
    this.ops.push("stroke");
    this.strokedStyles.push(String(this.strokeStyle));
  }
}

describe("pause semantics", () => {
  it("holding 600 ms emits exactly one PauseElapsed and renders the lens", () => {
    const { dataset, projection } = twoBlobFixture();
    const model = buildSnnModel(buildKnn(dataset, 8));
    const state = newSession(dataset, projection, model, { thetaIn: 0.35, thetaOut: 0.5 });
    const clock = new FakeClock();
    const bridge = new InputBridge(state, clock.scheduler, () => clock.now);

    // hover over the first blob, then hold still for 600 ms
    bridge.pointerMove(0.0, 0.0);
    expect(state.phase).toBe("inspect");
    clock.advance(600);

    const pauses = bridge.log.filter((e) => e.type === "PauseElapsed");
    expect(pauses.length).toBe(1);
    expect(state.phase).toBe("transient_lens");
    expect(state.lens).not.toBeNull();

    // a further still period must not emit another pause
    clock.advance(1000);
    expect(bridge.log.filter((e) => e.type === "PauseElapsed").length).toBe(1);

    // the frame draws both lens boundary polygons
    const ctx = new RecordingCtx();
    const view = new ViewState();
    view.fit(state.original, 400, 400);
    renderFrame(state, bridge.hints, view, ctx, 400, 400, clock.now);
    expect(ctx.ops).toContain("closePath");
    expect(ctx.strokedStyles).toContain("#1f4fd6"); // inner boundary
    expect(ctx.strokedStyles).toContain("#d62728"); // outer boundary

    // moving again reverts the transient relocation and re-arms the timer
    bridge.pointerMove(0.1, 0.0);
    expect(state.phase).toBe("inspect");
    clock.advance(600);
    expect(bridge.log.filter((e) => e.type === "PauseElapsed").length).toBe(2);
  });

  it("does not fire while moving", () => {
    const { dataset, projection } = twoBlobFixture();
    const model = buildSnnModel(buildKnn(dataset, 8));
    const state = newSession(dataset, projection, model, { thetaIn: 0.35, thetaOut: 0.5 });
    const clock = new FakeClock();
    const bridge = new InputBridge(state, clock.scheduler, () => clock.now);
    for (let i = 0; i < 10; i++) {
      bridge.pointerMove(0.01 * i, 0.0);
      clock.advance(400); // always below the 500 ms threshold
    }
    expect(bridge.log.filter((e) => e.type === "PauseElapsed").length).toBe(0);
  });
});
