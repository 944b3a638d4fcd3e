/**
 * Bridge from pointer/wheel/keyboard input to engine events.
 *
 * Emits events in order, records every event with a timestamp into the
 * trajectory log (so a UI session replays headlessly to an identical
 * state), and runs the pause timer: PauseElapsed fires once after the
 * pointer has been still for the configured threshold, re-arming only on
 * the next movement.
 */

import type { Event, RenderHints, SessionState } from "../engine/engine.js";
import { handleEvent } from "../engine/engine.js";

export interface Scheduler {
  set(fn: () => void, ms: number): number;
  clear(id: number): void;
}

const defaultScheduler: Scheduler = {
  set: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  clear: (id) => clearTimeout(id),
};

export class InputBridge {
  readonly log: (Event & { t: number })[] = [];
  private pauseTimer: number | null = null;
  private lastHints: RenderHints = {};
  private listeners: ((hints: RenderHints) => void)[] = [];
  private readonly initialParams: { thetaIn: number; thetaOut: number };
  private readonly initialRadius: number;

  constructor(
    private readonly state: SessionState,
    private readonly scheduler: Scheduler = defaultScheduler,
    private readonly clock: () => number = () => Date.now(),
  ) {
    this.initialParams = { thetaIn: state.params.thetaIn, thetaOut: state.params.thetaOut };
    this.initialRadius = state.painter.radius;
  }

  onEvent(listener: (hints: RenderHints) => void): void {
    this.listeners.push(listener);
  }

  get hints(): RenderHints {
    return this.lastHints;
  }

  dispatch(event: Event): RenderHints {
    this.log.push({ ...event, t: this.clock() });
    const hints = handleEvent(this.state, event);
    this.lastHints = hints;
    for (const listener of this.listeners) listener(hints);
    return hints;
  }

  private armPauseTimer(): void {
    if (this.pauseTimer !== null) this.scheduler.clear(this.pauseTimer);
    this.pauseTimer = this.scheduler.set(() => {
      this.pauseTimer = null;
      this.dispatch({ type: "PauseElapsed" });
    }, this.state.config.pauseThresholdMs);
  }

  private disarmPauseTimer(): void {
    if (this.pauseTimer !== null) {
      this.scheduler.clear(this.pauseTimer);
      this.pauseTimer = null;
    }
  }

  /** Pointer moved to a layout-space position. */
  pointerMove(x: number, y: number): void {
    this.dispatch({ type: "MoveTo", x, y });
    if (this.state.phase === "inspect") {
      this.armPauseTimer();
    } else {
      this.disarmPauseTimer();
    }
  }

  pointerDown(): void {
    this.disarmPauseTimer();
    this.dispatch({ type: "Press" });
  }

  pointerUp(): void {
    this.disarmPauseTimer();
    this.dispatch({ type: "Release" });
  }

  wheel(delta: number): void {
    this.dispatch({ type: "Wheel", delta });
  }

  keyDown(key: string): void {
    if (key === "Control") this.dispatch({ type: "SetOverwrite", on: true });
    if (key === "Alt") this.dispatch({ type: "SetDrag", on: true });
  }

  keyUp(key: string): void {
    if (key === "Control") this.dispatch({ type: "SetOverwrite", on: false });
    if (key === "Alt") this.dispatch({ type: "SetDrag", on: false });
  }

  setThetaIn(value: number): void {
    this.dispatch({ type: "SetThetaIn", value });
  }

  setThetaOut(value: number): void {
    this.dispatch({ type: "SetThetaOut", value });
  }

  toggleContext(): void {
    this.disarmPauseTimer();
    this.dispatch({ type: "ToggleContext" });
  }

  newBrush(): void {
    this.dispatch({ type: "NewBrush" });
  }

  switchBrush(id: number): void {
    this.dispatch({ type: "SwitchBrush", brush_id: id });
  }

  /** Trajectory JSON replayable by the CLI: initial params + the event log. */
  exportTrajectory(): object {
    return {
      params: {
        thetaIn: this.initialParams.thetaIn,
        thetaOut: this.initialParams.thetaOut,
        painterRadius: this.initialRadius,
      },
      events: this.log.map((e) => ({ ...e })),
    };
  }
}
