/**
 * Client-side scene state.
 *
 * Holds exactly what the last kernel frames said — no geometry is ever
 * computed here. With the connection frozen, every position in this
 * state stays bit-identical no matter what the pointer does.
 */

import type { SceneFrame, SceneObject } from "./wire.js";
import { screenToWorld, worldToScreen, type Viewport, defaultViewport } from "./viewport.js";

export type TraceRun = Array<[number, number]>;

export class SceneView {
  viewport: Viewport;
  objects: Map<string, SceneObject> = new Map();
  selected: string | null = null;
  hovered: string | null = null;
  /** ids whose positions accumulate into trace buffers on every frame */
  traceTargets: Set<string> = new Set();
  traceBuffers: Map<string, TraceRun[]> = new Map();
  lastError: string | null = null;

  constructor(width = 800, height = 600) {
    this.viewport = defaultViewport(width, height);
  }

  applyFrame(frame: SceneFrame): void {
    this.objects = new Map(frame.objects.map((o) => [o.id, o]));
    for (const id of this.traceTargets) {
      const obj = this.objects.get(id);
      const buffers = this.traceBuffers.get(id) ?? [];
      const pos = obj && obj.exists ? pointCoords(obj) : null;
      if (pos === null) {
        if (buffers.length === 0 || buffers[buffers.length - 1]!.length > 0) {
          buffers.push([]); // gap
        }
      } else {
        if (buffers.length === 0) {
          buffers.push([]);
        }
        buffers[buffers.length - 1]!.push(pos);
      }
      this.traceBuffers.set(id, buffers);
    }
  }

  setTracing(id: string, on: boolean): void {
    if (on) {
      this.traceTargets.add(id);
    } else {
      this.traceTargets.delete(id);
    }
  }

  clearTraces(): void {
    this.traceBuffers.clear();
  }

  /** Exact coordinates of a point object as last received (wire precision). */
  coordsOf(id: string): [number, number] | null {
    const obj = this.objects.get(id);
    if (!obj || !obj.exists) {
      return null;
    }
    return pointCoords(obj);
  }

  toWorld(sx: number, sy: number): [number, number] {
    return screenToWorld(this.viewport, sx, sy);
  }

  toScreen(x: number, y: number): [number, number] {
    return worldToScreen(this.viewport, x, y);
  }

  /** Nearest point object within radiusPx of a screen position;
   * draggable points win ties so grabbing favors handles. */
  hitTest(sx: number, sy: number, radiusPx = 10): SceneObject | null {
    let best: SceneObject | null = null;
    let bestDist = Infinity;
    for (const obj of this.objects.values()) {
      if (!obj.exists || obj.kind !== "point") {
        continue;
      }
      const pos = pointCoords(obj);
      if (pos === null) {
        continue;
      }
      const [px, py] = this.toScreen(pos[0], pos[1]);
      const d = Math.hypot(px - sx, py - sy) - (obj.draggable ? 2 : 0);
      if (d <= radiusPx && d < bestDist) {
        best = obj;
        bestDist = d;
      }
    }
    return best;
  }
}

export function pointCoords(obj: SceneObject): [number, number] | null {
  if (obj.kind !== "point" || obj.data === null) {
    return null;
  }
  const d = obj.data as Record<string, unknown>;
  if (d.infinite === true) {
    return null;
  }
  if (typeof d.x === "number" && typeof d.y === "number") {
    return [d.x, d.y];
  }
  return null;
}
