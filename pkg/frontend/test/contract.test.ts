/**
 * Protocol conformance against a recorded kernel session — runnable
 * without a live kernel.  The fixture was captured from the real
 * session implementation, so these tests pin the client to the wire
 * format the kernel actually speaks.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { RecordedConnection, type RecordedExchange } from "../src/connection.js";
import { SceneView } from "../src/scene.js";
import { render } from "../src/render.js";
import { ClientMessage, parseServerFrame, type ServerFrame } from "../src/wire.js";

const here = dirname(fileURLToPath(import.meta.url));
const recording = JSON.parse(
  readFileSync(join(here, "fixtures", "session_euclid.json"), "utf-8"),
) as RecordedExchange[];

function client(rec = recording) {
  const conn = new RecordedConnection(rec);
  const view = new SceneView();
  const errors: string[] = [];
  conn.onFrame((frame: ServerFrame) => {
    if (frame.op === "scene") {
      view.applyFrame(frame);
    } else {
      errors.push(frame.message);
    }
  });
  conn.onProtocolError((m) => errors.push(`protocol: ${m}`));
  return { conn, view, errors };
}

describe("recorded session contract", () => {
  it("every recorded kernel frame validates against the schema", () => {
    for (const exchange of recording) {
      for (const raw of exchange.recv) {
        const parsed = parseServerFrame(raw);
        expect(parsed.ok, `frame for ${exchange.send.op}: ${raw.slice(0, 80)}`).toBe(true);
      }
    }
  });

  it("every recorded client message validates against the schema", () => {
    for (const exchange of recording) {
      expect(() => ClientMessage.parse(exchange.send)).not.toThrow();
    }
  });

  it("replaying the whole session drives the client without protocol errors", () => {
    const { conn, view, errors } = client();
    for (const exchange of recording) {
      conn.send(exchange.send as ClientMessage);
    }
    // the final exchange is an intentional kernel error (bad drag id)
    expect(errors.length).toBe(1);
    expect(errors[0]).toMatch(/not a draggable point/);
    expect(view.objects.size).toBeGreaterThan(0);
    expect(conn.sent).toHaveLength(recording.length);
  });

  it("dragged coordinates displayed equal the kernel frame values exactly", () => {
    const { conn, view } = client();
    conn.send(recording[0]!.send as ClientMessage); // load
    const dragExchanges = recording.filter((e) => e.send.op === "drag" && e.recv.length > 0);
    for (const exchange of dragExchanges.slice(0, 6)) {
      conn.send(exchange.send as ClientMessage);
      const lastScene = exchange.recv
        .map((raw) => parseServerFrame(raw))
        .filter((p) => p.ok && p.frame.op === "scene");
      if (lastScene.length === 0) {
        continue;
      }
      const frame = (lastScene[lastScene.length - 1] as { ok: true; frame: ServerFrame }).frame;
      if (frame.op !== "scene") {
        continue;
      }
      for (const obj of frame.objects) {
        if (obj.kind === "point" && obj.exists && obj.data !== null && "x" in obj.data) {
          expect(view.coordsOf(obj.id)).toEqual([obj.data.x, obj.data.y]);
        }
      }
    }
  });

  it("equilateral invariant holds in the received frames (kernel-side geometry)", () => {
    const { conn, view } = client();
    conn.send(recording[0]!.send as ClientMessage);
    for (const exchange of recording.slice(1, 7)) {
      conn.send(exchange.send as ClientMessage);
      const a = view.coordsOf("A")!;
      const b = view.coordsOf("B")!;
      const c = view.coordsOf("C")!;
      const ab = Math.hypot(b[0] - a[0], b[1] - a[1]);
      const ac = Math.hypot(c[0] - a[0], c[1] - a[1]);
      expect(Math.abs(ab - ac)).toBeLessThan(1e-9);
    }
  });

  it("freezing the kernel connection freezes all object positions", () => {
    const { conn, view } = client();
    conn.send(recording[0]!.send as ClientMessage);
    conn.send(recording[1]!.send as ClientMessage);
    const snapshot = JSON.stringify([...view.objects.entries()]);
    conn.frozen = true;
    // pointer-driven messages keep flowing out, but nothing comes back
    conn.send({ op: "drag", id: "B", x: 42, y: 42 });
    conn.send({ op: "drag", id: "B", x: 43, y: 41 });
    view.hitTest(10, 10);
    expect(JSON.stringify([...view.objects.entries()])).toBe(snapshot);
    expect(render(view)).toEqual(render(view));
  });

  it("trace frames carry the locus runs", () => {
    const { conn, view } = client();
    for (const exchange of recording) {
      conn.send(exchange.send as ClientMessage);
    }
    const trace = view.objects.get("trace:q");
    expect(trace).toBeDefined();
    expect(trace!.kind).toBe("locus");
    const data = trace!.data as { runs: Array<Array<[number, number]>> };
    expect(data.runs.reduce((n, r) => n + r.length, 0)).toBeGreaterThan(40);
  });
});
