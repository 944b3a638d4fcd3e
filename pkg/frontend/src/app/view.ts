/**
 * Viewport mapping between layout units and canvas pixels, plus the
 * animation registry for relocation and contextualization transitions.
 * Animations are purely visual: the engine's positions are authoritative
 * the moment an event is processed; the view eases toward them.
 */

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export interface Animation {
  from: [number, number];
  to: [number, number];
  start: number;
}

export const ANIMATION_MS = 300;

export class ViewState {
  viewport: Viewport = { scale: 1, offsetX: 0, offsetY: 0 };
  animations = new Map<number, Animation>();
  hovered: number | null = null;

  fit(positions: number[][], width: number, height: number, padding = 24): void {
    let loX = Infinity, loY = Infinity, hiX = -Infinity, hiY = -Infinity;
    for (const [x, y] of positions) {
      if (x < loX) loX = x;
      if (y < loY) loY = y;
      if (x > hiX) hiX = x;
      if (y > hiY) hiY = y;
    }
    const spanX = Math.max(hiX - loX, 1e-12);
    const spanY = Math.max(hiY - loY, 1e-12);
    const scale = Math.min((width - 2 * padding) / spanX, (height - 2 * padding) / spanY);
    this.viewport = {
      scale,
      offsetX: padding - loX * scale + (width - 2 * padding - spanX * scale) / 2,
      offsetY: padding - loY * scale + (height - 2 * padding - spanY * scale) / 2,
    };
  }

  toPixels(p: [number, number] | number[]): [number, number] {
    return [
      p[0] * this.viewport.scale + this.viewport.offsetX,
      p[1] * this.viewport.scale + this.viewport.offsetY,
    ];
  }

  toLayout(px: number, py: number): [number, number] {
    return [
      (px - this.viewport.offsetX) / this.viewport.scale,
      (py - this.viewport.offsetY) / this.viewport.scale,
    ];
  }

  beginAnimation(index: number, from: [number, number], to: [number, number], now: number): void {
    this.animations.set(index, { from, to, start: now });
  }

  /** Animated position, or null when the animation completed (snap to engine). */
  animatedPosition(index: number, now: number): [number, number] | null {
    const anim = this.animations.get(index);
    if (!anim) return null;
    const t = (now - anim.start) / ANIMATION_MS;
    if (t >= 1) {
      this.animations.delete(index);
      return null;
    }
    const u = Math.max(t, 0);
    return [
      anim.from[0] + u * (anim.to[0] - anim.from[0]),
      anim.from[1] + u * (anim.to[1] - anim.from[1]),
    ];
  }
}
