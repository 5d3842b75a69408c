/**
 * Drag gesture state machine.
 *
 * Pointer positions are mapped through the inverse viewport transform
 * and emitted as drag messages, throttled to at most one per frame tick
 * (<= 60/s); the final position is always flushed on release.  Hitting
 * a non-draggable object emits no messages, only a shake cue.
 */

import type { ClientMessage } from "./wire.js";
import type { SceneView } from "./scene.js";

export interface GestureCallbacks {
  send: (msg: ClientMessage) => void;
  /** visual cue when the user grabs something not draggable */
  shake?: (id: string) => void;
}

export class DragGesture {
  private active: string | null = null;
  private lastSent = -Infinity;
  private pending: [number, number] | null = null;
  private readonly minInterval: number;

  constructor(
    private view: SceneView,
    private cb: GestureCallbacks,
    private now: () => number = () => performance.now(),
    maxRate = 60,
  ) {
    this.minInterval = 1000 / maxRate;
  }

  get activeId(): string | null {
    return this.active;
  }

  pointerDown(sx: number, sy: number): boolean {
    const hit = this.view.hitTest(sx, sy);
    if (hit === null) {
      return false;
    }
    if (!hit.draggable) {
      this.cb.shake?.(hit.id);
      return false;
    }
    this.active = hit.id;
    this.view.selected = hit.id;
    this.lastSent = -Infinity;
    this.pending = null;
    return true;
  }

  pointerMove(sx: number, sy: number): void {
    if (this.active === null) {
      this.view.hovered = this.view.hitTest(sx, sy)?.id ?? null;
      return;
    }
    const [x, y] = this.view.toWorld(sx, sy);
    const t = this.now();
    if (t - this.lastSent >= this.minInterval) {
      this.cb.send({ op: "drag", id: this.active, x, y });
      this.lastSent = t;
      this.pending = null;
    } else {
      this.pending = [x, y];
    }
  }

  pointerUp(sx: number, sy: number): void {
    if (this.active === null) {
      return;
    }
    // the release position is the final word: flush it even if the
    // throttle window is open or the pointer left the canvas
    const [x, y] = this.view.toWorld(sx, sy);
    this.cb.send({ op: "drag", id: this.active, x, y });
    this.active = null;
    this.pending = null;
  }
}
