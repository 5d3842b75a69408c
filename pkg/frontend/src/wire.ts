/**
 * Wire protocol types and validation.
 *
 * Mirrors the kernel's JSON frames exactly: every incoming frame is
 * schema-validated before it reaches any state, and unknown ops are
 * surfaced as protocol errors instead of being dropped.
 */

import { z } from "zod";

// ---- client -> server ------------------------------------------------------

export const LoadMessage = z.object({
  op: z.literal("load"),
  source: z.string(),
});

export const DragMessage = z.object({
  op: z.literal("drag"),
  id: z.string(),
  x: z.number(),
  y: z.number(),
});

export const ToolsetMessage = z.object({
  op: z.literal("toolset"),
  name: z.string(),
});

export const TraceMessage = z.object({
  op: z.literal("trace"),
  mover: z.string(),
  path: z.string(),
  target: z.string(),
  n: z.number().int().positive(),
});

export const ClientMessage = z.discriminatedUnion("op", [
  LoadMessage,
  DragMessage,
  ToolsetMessage,
  TraceMessage,
]);
export type ClientMessage = z.infer<typeof ClientMessage>;

// ---- server -> client ------------------------------------------------------

export const PointData = z.union([
  z.object({ x: z.number(), y: z.number() }),
  z.object({ infinite: z.literal(true), dx: z.number(), dy: z.number() }),
]);

export const LineData = z.object({ a: z.number(), b: z.number(), c: z.number() });
export const SpanData = z.object({
  x1: z.number(),
  y1: z.number(),
  x2: z.number(),
  y2: z.number(),
});
export const CircleData = z.object({ cx: z.number(), cy: z.number(), r: z.number() });
export const ConicData = z.object({ matrix: z.array(z.array(z.number()).length(3)).length(3) });
export const LocusData = z.object({
  runs: z.array(z.array(z.tuple([z.number(), z.number()]))),
});
export const ScalarData = z.object({ value: z.number() });

export const SceneObject = z.object({
  id: z.string(),
  kind: z.enum(["point", "line", "segment", "ray", "circle", "conic", "locus", "scalar", "unknown"]),
  data: z
    .union([PointData, LineData, SpanData, CircleData, ConicData, LocusData, ScalarData])
    .nullable(),
  exists: z.boolean(),
  draggable: z.boolean(),
});
export type SceneObject = z.infer<typeof SceneObject>;

export const SceneFrame = z.object({
  op: z.literal("scene"),
  objects: z.array(SceneObject),
});
export type SceneFrame = z.infer<typeof SceneFrame>;

export const ErrorFrame = z.object({
  op: z.literal("error"),
  message: z.string(),
  line: z.number().nullable(),
  col: z.number().nullable(),
});
export type ErrorFrame = z.infer<typeof ErrorFrame>;

export const ServerFrame = z.discriminatedUnion("op", [SceneFrame, ErrorFrame]);
export type ServerFrame = z.infer<typeof ServerFrame>;

export type ParsedFrame =
  | { ok: true; frame: ServerFrame }
  | { ok: false; error: string };

/** Validate one raw frame; unknown ops and malformed payloads come back
 * as protocol errors, never silently dropped. */
export function parseServerFrame(raw: string): ParsedFrame {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch (e) {
    return { ok: false, error: `malformed JSON from kernel: ${(e as Error).message}` };
  }
  const res = ServerFrame.safeParse(value);
  if (res.success) {
    return { ok: true, frame: res.data };
  }
  const op =
    typeof value === "object" && value !== null && "op" in value
      ? String((value as Record<string, unknown>).op)
      : "<missing>";
  return { ok: false, error: `invalid kernel frame (op ${op}): ${res.error.issues[0]?.message ?? "schema error"}` };
}

/** Serialize an outgoing message, refusing anything schema-invalid. */
export function encodeClientMessage(msg: ClientMessage): string {
  const checked = ClientMessage.parse(msg);
  return JSON.stringify(checked);
}
