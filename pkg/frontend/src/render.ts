/**
 * Pure rendering: SceneView in, display list out.
 *
 * The display list is plain data in screen coordinates, so rendering is
 * testable without a canvas; painter.ts executes it on a 2D context.
 * Only the viewport transform is applied here — positions come verbatim
 * from the last kernel frame.
 */

import type { SceneObject } from "./wire.js";
import type { SceneView } from "./scene.js";
import { pointCoords } from "./scene.js";

export type DrawCmd =
  | { t: "disc"; id: string; x: number; y: number; r: number; cls: "point" | "point-draggable" | "point-selected" }
  | { t: "segment"; id: string; x1: number; y1: number; x2: number; y2: number; cls: "segment" | "curve" }
  | { t: "circle"; id: string; x: number; y: number; r: number; cls: "curve" }
  | { t: "polyline"; id: string; pts: Array<[number, number]>; cls: "curve" | "trace" };

export type DisplayList = DrawCmd[];

interface Bounds {
  w: number;
  h: number;
}

function clipLine(
  a: number,
  b: number,
  c: number,
  view: SceneView,
  bounds: Bounds,
): [number, number, number, number] | null {
  // intersect the world-space line a x + b y + c = 0 with the viewport
  // rectangle, in screen space
  const [x0, y1w] = view.toWorld(0, 0);
  const [x1, y0w] = view.toWorld(bounds.w, bounds.h);
  const pts: Array<[number, number]> = [];
  const pushIfInside = (x: number, y: number) => {
    if (x >= x0 - 1e-9 && x <= x1 + 1e-9 && y >= y0w - 1e-9 && y <= y1w + 1e-9) {
      pts.push([x, y]);
    }
  };
  if (Math.abs(b) > 1e-15) {
    pushIfInside(x0, -(a * x0 + c) / b);
    pushIfInside(x1, -(a * x1 + c) / b);
  }
  if (Math.abs(a) > 1e-15) {
    pushIfInside(-(b * y0w + c) / a, y0w);
    pushIfInside(-(b * y1w + c) / a, y1w);
  }
  const uniq: Array<[number, number]> = [];
  for (const p of pts) {
    if (!uniq.some((q) => Math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-9)) {
      uniq.push(p);
    }
  }
  if (uniq.length < 2) {
    return null;
  }
  const [p1, p2] = [uniq[0]!, uniq[1]!];
  const s1 = view.toScreen(p1[0], p1[1]);
  const s2 = view.toScreen(p2[0], p2[1]);
  return [s1[0], s1[1], s2[0], s2[1]];
}

function conicRuns(matrix: number[][], view: SceneView, bounds: Bounds, samples = 160): Array<Array<[number, number]>> {
  const [wx0] = view.toWorld(0, 0);
  const [wx1] = view.toWorld(bounds.w, 0);
  const [, wyTop] = view.toWorld(0, 0);
  const [, wyBot] = view.toWorld(0, bounds.h);
  const runs: Array<Array<[number, number]>> = [];
  const branches: Array<Array<[number, number]>> = [[], []];
  const m = matrix;
  for (let i = 0; i <= samples; i++) {
    const x = wx0 + ((wx1 - wx0) * i) / samples;
    const qa = m[1]![1]!;
    const qb = 2 * (m[0]![1]! * x + m[1]![2]!);
    const qc = m[0]![0]! * x * x + 2 * m[0]![2]! * x + m[2]![2]!;
    let ys: number[] = [];
    if (Math.abs(qa) < 1e-15) {
      if (Math.abs(qb) > 1e-15) {
        ys = [-qc / qb];
      }
    } else {
      const disc = qb * qb - 4 * qa * qc;
      if (disc >= 0) {
        const r = Math.sqrt(disc);
        ys = [(-qb - r) / (2 * qa), (-qb + r) / (2 * qa)].sort((u, v) => u - v);
      }
    }
    for (let bi = 0; bi < 2; bi++) {
      const y = ys[bi];
      if (y !== undefined && y >= wyBot && y <= wyTop) {
        branches[bi]!.push(view.toScreen(x, y));
      } else if (branches[bi]!.length > 0) {
        runs.push(branches[bi]!);
        branches[bi] = [];
      }
    }
  }
  for (const b of branches) {
    if (b.length > 0) {
      runs.push(b);
    }
  }
  return runs;
}

export function render(view: SceneView, width = 800, height = 600): DisplayList {
  const bounds = { w: width, h: height };
  const curves: DisplayList = [];
  const segments: DisplayList = [];
  const points: DisplayList = [];
  const traces: DisplayList = [];

  const spanCmd = (obj: SceneObject, cls: "segment" | "curve"): DrawCmd | null => {
    const d = obj.data as { x1: number; y1: number; x2: number; y2: number };
    const [x1, y1] = view.toScreen(d.x1, d.y1);
    const [x2, y2] = view.toScreen(d.x2, d.y2);
    return { t: "segment", id: obj.id, x1, y1, x2, y2, cls };
  };

  for (const obj of view.objects.values()) {
    if (!obj.exists || obj.data === null) {
      continue; // non-existent objects are hidden
    }
    switch (obj.kind) {
      case "point": {
        const pos = pointCoords(obj);
        if (pos === null) {
          break;
        }
        const [x, y] = view.toScreen(pos[0], pos[1]);
        const cls =
          view.selected === obj.id
            ? "point-selected"
            : obj.draggable
              ? "point-draggable"
              : "point";
        points.push({ t: "disc", id: obj.id, x, y, r: obj.draggable ? 6 : 4, cls });
        break;
      }
      case "segment": {
        const cmd = spanCmd(obj, "segment");
        if (cmd) {
          segments.push(cmd);
        }
        break;
      }
      case "ray": {
        // draw from origin through the second point to the viewport edge
        const d = obj.data as { x1: number; y1: number; x2: number; y2: number };
        const dx = d.x2 - d.x1;
        const dy = d.y2 - d.y1;
        const far = 1e4 / Math.max(view.viewport.scale, 1e-9);
        const n = Math.hypot(dx, dy) || 1;
        const [x1, y1] = view.toScreen(d.x1, d.y1);
        const [x2, y2] = view.toScreen(d.x1 + (dx / n) * far, d.y1 + (dy / n) * far);
        curves.push({ t: "segment", id: obj.id, x1, y1, x2, y2, cls: "curve" });
        break;
      }
      case "line": {
        const d = obj.data as { a: number; b: number; c: number };
        const clipped = clipLine(d.a, d.b, d.c, view, bounds);
        if (clipped) {
          curves.push({
            t: "segment",
            id: obj.id,
            x1: clipped[0],
            y1: clipped[1],
            x2: clipped[2],
            y2: clipped[3],
            cls: "curve",
          });
        }
        break;
      }
      case "circle": {
        const d = obj.data as { cx: number; cy: number; r: number };
        const [x, y] = view.toScreen(d.cx, d.cy);
        curves.push({ t: "circle", id: obj.id, x, y, r: d.r * view.viewport.scale, cls: "curve" });
        break;
      }
      case "conic": {
        const d = obj.data as { matrix: number[][] };
        for (const run of conicRuns(d.matrix, view, bounds)) {
          curves.push({ t: "polyline", id: obj.id, pts: run, cls: "curve" });
        }
        break;
      }
      case "locus": {
        const d = obj.data as { runs: Array<Array<[number, number]>> };
        for (const run of d.runs) {
          if (run.length < 2) {
            continue;
          }
          traces.push({
            t: "polyline",
            id: obj.id,
            pts: run.map(([x, y]) => view.toScreen(x, y)),
            cls: "trace",
          });
        }
        break;
      }
      default:
        break; // scalars have no visual
    }
  }
  for (const [id, runs] of view.traceBuffers) {
    for (const run of runs) {
      if (run.length < 2) {
        continue;
      }
      traces.push({
        t: "polyline",
        id: `tracebuf:${id}`,
        pts: run.map(([x, y]) => view.toScreen(x, y)),
        cls: "trace",
      });
    }
  }
  return [...curves, ...traces, ...segments, ...points];
}
