/** Pan/zoom viewport: the only coordinate math the client performs. */

export interface Viewport {
  /** pixels per world unit */
  scale: number;
  /** screen position of the world origin */
  originX: number;
  originY: number;
}

export function defaultViewport(width: number, height: number, scale = 160): Viewport {
  return { scale, originX: width * 0.35, originY: height * 0.65 };
}

export function worldToScreen(vp: Viewport, x: number, y: number): [number, number] {
  return [vp.originX + x * vp.scale, vp.originY - y * vp.scale];
}

export function screenToWorld(vp: Viewport, sx: number, sy: number): [number, number] {
  return [(sx - vp.originX) / vp.scale, (vp.originY - sy) / vp.scale];
}

export function pan(vp: Viewport, dxPx: number, dyPx: number): Viewport {
  return { ...vp, originX: vp.originX + dxPx, originY: vp.originY + dyPx };
}

/** Zoom by a factor keeping the screen point (sx, sy) fixed. */
export function zoomAt(vp: Viewport, sx: number, sy: number, factor: number): Viewport {
  const scale = vp.scale * factor;
  return {
    scale,
    originX: sx - (sx - vp.originX) * factor,
    originY: sy - (sy - vp.originY) * factor,
  };
}
