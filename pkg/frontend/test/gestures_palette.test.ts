import { describe, expect, it } from "vitest";

import { DragGesture } from "../src/gestures.js";
import { ConstructionBuilder, palette, TOOLSETS } from "../src/palette.js";
import { SceneView } from "../src/scene.js";
import { SceneFrame, type ClientMessage } from "../src/wire.js";

function euclidView(): SceneView {
  const view = new SceneView();
  view.applyFrame(
    SceneFrame.parse({
      op: "scene",
      objects: [
        { id: "A", kind: "point", data: { x: 0, y: 0 }, exists: true, draggable: true },
        { id: "B", kind: "point", data: { x: 1, y: 0 }, exists: true, draggable: true },
        { id: "C", kind: "point", data: { x: 0.5, y: 0.866 }, exists: true, draggable: false },
      ],
    }),
  );
  return view;
}

describe("drag gesture", () => {
  it("throttles to at most 60 messages per second and flushes on release", () => {
    const view = euclidView();
    const sent: ClientMessage[] = [];
    let clock = 0;
    const g = new DragGesture(view, { send: (m) => sent.push(m) }, () => clock, 60);
    const [bx, by] = view.toScreen(1, 0);
    expect(g.pointerDown(bx, by)).toBe(true);
    // 100 moves in 100 ms: at most ceil(100/16.7) + 1 messages
    for (let i = 0; i < 100; i++) {
      clock += 1;
      g.pointerMove(bx + i, by);
    }
    const moves = sent.length;
    expect(moves).toBeLessThanOrEqual(8);
    g.pointerUp(bx + 200, by);
    expect(sent.length).toBe(moves + 1); // final flush always goes out
    const last = sent[sent.length - 1]!;
    expect(last.op).toBe("drag");
    if (last.op === "drag") {
      const [wx] = view.toWorld(bx + 200, by);
      expect(last.x).toBeCloseTo(wx, 12);
    }
  });

  it("maps pointer positions through the inverse viewport transform", () => {
    const view = euclidView();
    const sent: ClientMessage[] = [];
    let clock = 0;
    const g = new DragGesture(view, { send: (m) => sent.push(m) }, () => (clock += 100), 60);
    const [bx, by] = view.toScreen(1, 0);
    g.pointerDown(bx, by);
    g.pointerMove(bx + 50, by - 30);
    const msg = sent[0]!;
    if (msg.op === "drag") {
      const [wx, wy] = view.toWorld(bx + 50, by - 30);
      expect(msg.x).toBe(wx);
      expect(msg.y).toBe(wy);
      expect(msg.id).toBe("B");
    }
  });

  it("rejects non-draggable points with a shake cue and no messages", () => {
    const view = euclidView();
    const sent: ClientMessage[] = [];
    const shaken: string[] = [];
    const g = new DragGesture(view, { send: (m) => sent.push(m), shake: (id) => shaken.push(id) });
    const [cx, cy] = view.toScreen(0.5, 0.866);
    expect(g.pointerDown(cx, cy)).toBe(false);
    g.pointerMove(cx + 10, cy);
    g.pointerUp(cx + 10, cy);
    expect(sent).toHaveLength(0);
    expect(shaken).toEqual(["C"]);
  });

  it("released off-canvas still flushes the final position", () => {
    const view = euclidView();
    const sent: ClientMessage[] = [];
    let clock = 0;
    const g = new DragGesture(view, { send: (m) => sent.push(m) }, () => clock, 60);
    const [bx, by] = view.toScreen(1, 0);
    g.pointerDown(bx, by);
    g.pointerUp(-500, -500); // way outside the canvas
    expect(sent).toHaveLength(1);
  });
});

describe("tool palette", () => {
  it("POSTULATES_ONLY enables exactly the seven postulate tools", () => {
    const entries = palette("POSTULATES_ONLY");
    const enabled = entries.filter((e) => e.enabled).map((e) => e.name);
    expect(enabled).toEqual([
      "free_point",
      "point_on",
      "line_through",
      "segment",
      "ray",
      "circle_center_point",
      "intersect",
    ]);
  });

  it("FULL enables every tool", () => {
    expect(palette("FULL").every((e) => e.enabled)).toBe(true);
    expect(palette("FULL")).toHaveLength(TOOLSETS.FULL!.size);
  });

  it("parallel is inert under POSTULATES_ONLY with an explanatory tooltip", () => {
    const entry = palette("POSTULATES_ONLY").find((e) => e.name === "parallel")!;
    expect(entry.enabled).toBe(false);
    expect(entry.tooltip).toMatch(/parallel postulate|fifth/i);
  });

  it("construction clicks emit a load with the amended source", () => {
    let source = "point A = free_point(0, 0)\npoint B = free_point(1, 0)\n";
    const sent: ClientMessage[] = [];
    const builder = new ConstructionBuilder(
      () => source,
      (s) => (source = s),
      (m) => sent.push(m),
      () => "POSTULATES_ONLY",
    );
    expect(builder.selectTool("segment")).toBe(true);
    builder.click("A", [0, 0]);
    builder.click("B", [1, 0]);
    expect(sent).toHaveLength(1);
    const msg = sent[0]!;
    expect(msg.op).toBe("load");
    if (msg.op === "load") {
      expect(msg.source).toContain("segment s1 = segment(A, B)");
    }
  });

  it("selecting a disallowed tool is refused", () => {
    const builder = new ConstructionBuilder(
      () => "",
      () => {},
      () => {},
      () => "POSTULATES_ONLY",
    );
    expect(builder.selectTool("parallel")).toBe(false);
    expect(builder.pendingTool).toBeNull();
  });
});
