/**
 * Tool palette filtered by the active toolset.
 *
 * The toolset composition mirrors the kernel's built-ins; disallowed
 * tools stay visible but inert, with a tooltip saying which axiom they
 * would need.  Selecting an enabled tool and clicking objects or empty
 * locations builds the matching construction statement and emits it by
 * reloading the amended source — the kernel stays the only authority on
 * what the construction means.
 */

import type { ClientMessage } from "./wire.js";

export interface ToolInfo {
  name: string;
  /** argument slots: "point"-like object picks or raw canvas locations */
  args: Array<"object" | "location" | "number">;
  output: string;
  blockedHint: string;
}

export const TOOL_INFO: ToolInfo[] = [
  { name: "free_point", args: ["location"], output: "point", blockedHint: "" },
  { name: "point_on", args: ["object", "number"], output: "point", blockedHint: "" },
  { name: "line_through", args: ["object", "object"], output: "line", blockedHint: "" },
  { name: "segment", args: ["object", "object"], output: "segment", blockedHint: "" },
  { name: "ray", args: ["object", "object"], output: "ray", blockedHint: "" },
  { name: "circle_center_point", args: ["object", "object"], output: "circle", blockedHint: "" },
  { name: "intersect", args: ["object", "object"], output: "point", blockedHint: "" },
  {
    name: "parallel",
    args: ["object", "object"],
    output: "line",
    blockedHint: "needs the parallel postulate (Euclid's fifth, Playfair form)",
  },
  {
    name: "perpendicular",
    args: ["object", "object"],
    output: "line",
    blockedHint: "derived construction (Elements I.11-12), not a postulate",
  },
  {
    name: "midpoint",
    args: ["object", "object"],
    output: "point",
    blockedHint: "derived construction, not a postulate",
  },
  {
    name: "compass",
    args: ["object", "object"],
    output: "circle",
    blockedHint: "derivable via segment transport (Elements I.2); enable EUCLID_BOOK1",
  },
  {
    name: "circle_center_radius",
    args: ["object", "number"],
    output: "circle",
    blockedHint: "takes a raw number, outside the ruler-and-compass game",
  },
  {
    name: "angle_measure",
    args: ["object", "object", "object"],
    output: "scalar",
    blockedHint: "takes a numeric reading, outside the ruler-and-compass game",
  },
  { name: "polar", args: ["object", "object"], output: "line", blockedHint: "projective tool" },
  { name: "invert", args: ["object", "object"], output: "point", blockedHint: "transformation tool" },
  {
    name: "bh_invert",
    args: ["object", "object", "object"],
    output: "point",
    blockedHint: "transformation tool",
  },
  {
    name: "locus",
    args: ["object", "object", "object"],
    output: "locus",
    blockedHint: "not expressible with ruler and compass",
  },
];

const POSTULATES_ONLY = [
  "free_point",
  "point_on",
  "line_through",
  "segment",
  "ray",
  "circle_center_point",
  "intersect",
];

export const TOOLSETS: Record<string, ReadonlySet<string>> = {
  POSTULATES_ONLY: new Set(POSTULATES_ONLY),
  EUCLID_BOOK1: new Set([...POSTULATES_ONLY, "perpendicular", "parallel", "midpoint", "compass"]),
  FULL: new Set(TOOL_INFO.map((t) => t.name)),
};

export interface PaletteEntry {
  name: string;
  enabled: boolean;
  tooltip: string;
}

export function palette(toolset: string): PaletteEntry[] {
  const allowed = TOOLSETS[toolset];
  if (allowed === undefined) {
    throw new Error(`unknown toolset ${toolset}`);
  }
  return TOOL_INFO.map((tool) => ({
    name: tool.name,
    enabled: allowed.has(tool.name),
    tooltip: allowed.has(tool.name) ? tool.name : `${tool.name}: ${tool.blockedHint}`,
  }));
}

/** Builds construction statements from palette clicks and emits them by
 * reloading the amended source. */
export class ConstructionBuilder {
  private tool: ToolInfo | null = null;
  private picked: string[] = [];
  private counter = 0;

  constructor(
    private getSource: () => string,
    private setSource: (s: string) => void,
    private send: (msg: ClientMessage) => void,
    private toolsetName: () => string,
  ) {}

  selectTool(name: string): boolean {
    const entry = palette(this.toolsetName()).find((e) => e.name === name);
    if (!entry || !entry.enabled) {
      return false; // inert: the palette shows the tooltip instead
    }
    this.tool = TOOL_INFO.find((t) => t.name === name) ?? null;
    this.picked = [];
    return this.tool !== null;
  }

  get pendingTool(): string | null {
    return this.tool?.name ?? null;
  }

  private freshId(prefix: string): string {
    this.counter += 1;
    return `${prefix}${this.counter}`;
  }

  /** A click on the canvas: either an object pick or a raw location. */
  click(objectId: string | null, world: [number, number]): void {
    if (this.tool === null) {
      return;
    }
    const slot = this.tool.args[this.picked.length];
    if (slot === "object") {
      if (objectId === null) {
        return; // needs an object; ignore empty clicks
      }
      this.picked.push(objectId);
    } else if (slot === "location") {
      this.picked.push(`${fmt(world[0])}, ${fmt(world[1])}`);
    } else {
      this.picked.push("0"); // numeric slots default to 0; editable in source
    }
    if (this.picked.length === this.tool.args.length) {
      this.emit();
    }
  }

  private emit(): void {
    const tool = this.tool!;
    const id = this.freshId(tool.output.slice(0, 1));
    const stmt = `${tool.output} ${id} = ${tool.name}(${this.picked.join(", ")})`;
    const source = this.getSource().replace(/\n?$/, "\n") + stmt + "\n";
    this.setSource(source);
    this.send({ op: "load", source });
    this.picked = [];
  }
}

function fmt(x: number): string {
  return Number(x.toPrecision(17)).toString();
}
