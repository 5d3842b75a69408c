/**
 * Browser bootstrap: canvas, palette bar, status line, kernel socket.
 *
 * Everything stateful lives in SceneView + the kernel session; this file
 * only forwards DOM events and repaints on animation frames.
 */

import { SceneView } from "./scene.js";
import { render } from "./render.js";
import { paint } from "./painter.js";
import { DragGesture } from "./gestures.js";
import { WebSocketConnection } from "./connection.js";
import { ConstructionBuilder, palette, TOOLSETS } from "./palette.js";
import { pan, zoomAt } from "./viewport.js";

const DEFAULT_SOURCE = `toolset POSTULATES_ONLY
point A = free_point(0, 0)
point B = free_point(1, 0)
circle c1 = circle_center_point(A, B)
circle c2 = circle_center_point(B, A)
point C = intersect(c1, c2, branch=0)
segment sAB = segment(A, B)
segment sBC = segment(B, C)
segment sCA = segment(C, A)
`;

export function start(root: HTMLElement, url = `ws://${location.hostname}:8765`): void {
  const canvas = document.createElement("canvas");
  canvas.width = 900;
  canvas.height = 620;
  canvas.style.border = "1px solid #ccc";
  canvas.style.touchAction = "none";
  const paletteBar = document.createElement("div");
  const status = document.createElement("div");
  status.style.font = "13px monospace";
  const traceControls = document.createElement("div");
  root.append(paletteBar, canvas, traceControls, status);

  const view = new SceneView(canvas.width, canvas.height);
  const conn = new WebSocketConnection(url);
  let source = DEFAULT_SOURCE;
  let toolsetName = "POSTULATES_ONLY";
  let dirty = true;

  conn.onFrame((frame) => {
    if (frame.op === "scene") {
      view.lastError = null;
      view.applyFrame(frame);
    } else {
      view.lastError = frame.line === null ? frame.message : `${frame.line}:${frame.col}: ${frame.message}`;
    }
    dirty = true;
  });
  conn.onProtocolError((message) => {
    view.lastError = message;
    dirty = true;
  });

  const builder = new ConstructionBuilder(
    () => source,
    (s) => {
      source = s;
    },
    (msg) => conn.send(msg),
    () => toolsetName,
  );

  const gesture = new DragGesture(view, {
    send: (msg) => conn.send(msg),
    shake: () => {
      canvas.style.outline = "2px solid #c0392b";
      setTimeout(() => (canvas.style.outline = ""), 160);
    },
  });

  const rebuildPalette = () => {
    paletteBar.replaceChildren();
    const select = document.createElement("select");
    for (const name of Object.keys(TOOLSETS)) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      opt.selected = name === toolsetName;
      select.append(opt);
    }
    select.addEventListener("change", () => {
      toolsetName = select.value;
      conn.send({ op: "toolset", name: toolsetName });
      rebuildPalette();
    });
    paletteBar.append(select);
    for (const entry of palette(toolsetName)) {
      const btn = document.createElement("button");
      btn.textContent = entry.name;
      btn.title = entry.tooltip;
      btn.disabled = false; // visible and clickable; inert tools just explain themselves
      if (!entry.enabled) {
        btn.style.opacity = "0.45";
      }
      btn.addEventListener("click", () => {
        if (!builder.selectTool(entry.name)) {
          status.textContent = entry.tooltip;
        } else {
          status.textContent = `tool: ${entry.name} (click objects or locations)`;
        }
      });
      paletteBar.append(btn);
    }
  };
  rebuildPalette();

  const clearBtn = document.createElement("button");
  clearBtn.textContent = "clear traces";
  clearBtn.addEventListener("click", () => {
    view.clearTraces();
    dirty = true;
  });
  traceControls.append(clearBtn);

  canvas.addEventListener("pointerdown", (e) => {
    const rect = canvas.getBoundingClientRect();
    const sx = e.clientX - rect.left;
    const sy = e.clientY - rect.top;
    if (builder.pendingTool !== null) {
      const hit = view.hitTest(sx, sy);
      builder.click(hit?.id ?? null, view.toWorld(sx, sy));
      dirty = true;
      return;
    }
    if (!gesture.pointerDown(sx, sy)) {
      // start panning
      const startVp = view.viewport;
      const move = (ev: PointerEvent) => {
        view.viewport = pan(startVp, ev.clientX - e.clientX, ev.clientY - e.clientY);
        dirty = true;
      };
      const up = () => {
        window.removeEventListener("pointermove", move);
        window.removeEventListener("pointerup", up);
      };
      window.addEventListener("pointermove", move);
      window.addEventListener("pointerup", up);
    }
    dirty = true;
  });
  canvas.addEventListener("pointermove", (e) => {
    const rect = canvas.getBoundingClientRect();
    gesture.pointerMove(e.clientX - rect.left, e.clientY - rect.top);
    const hovered = view.hovered;
    if (hovered !== null) {
      const pos = view.coordsOf(hovered);
      if (pos) {
        status.textContent = `${hovered} = (${pos[0]}, ${pos[1]})`;
      }
    }
    dirty = true;
  });
  window.addEventListener("pointerup", (e) => {
    const rect = canvas.getBoundingClientRect();
    gesture.pointerUp(e.clientX - rect.left, e.clientY - rect.top);
  });
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    const rect = canvas.getBoundingClientRect();
    view.viewport = zoomAt(
      view.viewport,
      e.clientX - rect.left,
      e.clientY - rect.top,
      e.deltaY < 0 ? 1.1 : 1 / 1.1,
    );
    dirty = true;
  });
  canvas.addEventListener("dblclick", (e) => {
    const rect = canvas.getBoundingClientRect();
    const hit = view.hitTest(e.clientX - rect.left, e.clientY - rect.top);
    if (hit) {
      view.setTracing(hit.id, !view.traceTargets.has(hit.id));
      status.textContent = `trace ${hit.id}: ${view.traceTargets.has(hit.id) ? "on" : "off"}`;
    }
  });

  const ctx = canvas.getContext("2d")!;
  const loop = () => {
    if (dirty) {
      paint(ctx, render(view, canvas.width, canvas.height), canvas.width, canvas.height);
      if (view.lastError) {
        status.textContent = view.lastError;
      }
      dirty = false;
    }
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);

  conn.send({ op: "load", source });
}

if (typeof document !== "undefined" && document.getElementById("geo-root")) {
  start(document.getElementById("geo-root")!);
}
