/** Executes a display list on a canvas 2D context. */

import type { DisplayList } from "./render.js";

const STYLES: Record<string, { stroke?: string; fill?: string; width?: number }> = {
  curve: { stroke: "#667", width: 1.2 },
  segment: { stroke: "#111", width: 2 },
  trace: { stroke: "#c0392b", width: 1.8 },
  point: { fill: "#333" },
  "point-draggable": { fill: "#1565c0" },
  "point-selected": { fill: "#e67e22" },
};

export function paint(ctx: CanvasRenderingContext2D, list: DisplayList, width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  for (const cmd of list) {
    const style = STYLES[cmd.cls] ?? {};
    ctx.beginPath();
    switch (cmd.t) {
      case "disc":
        ctx.fillStyle = style.fill ?? "#000";
        ctx.arc(cmd.x, cmd.y, cmd.r, 0, 2 * Math.PI);
        ctx.fill();
        break;
      case "segment":
        ctx.strokeStyle = style.stroke ?? "#000";
        ctx.lineWidth = style.width ?? 1;
        ctx.moveTo(cmd.x1, cmd.y1);
        ctx.lineTo(cmd.x2, cmd.y2);
        ctx.stroke();
        break;
      case "circle":
        ctx.strokeStyle = style.stroke ?? "#000";
        ctx.lineWidth = style.width ?? 1;
        ctx.arc(cmd.x, cmd.y, cmd.r, 0, 2 * Math.PI);
        ctx.stroke();
        break;
      case "polyline": {
        ctx.strokeStyle = style.stroke ?? "#000";
        ctx.lineWidth = style.width ?? 1;
        const first = cmd.pts[0];
        if (first === undefined) {
          break;
        }
        ctx.moveTo(first[0], first[1]);
        for (const [x, y] of cmd.pts.slice(1)) {
          ctx.lineTo(x, y);
        }
        ctx.stroke();
        break;
      }
    }
  }
}
