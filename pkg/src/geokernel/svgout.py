"""SVG and CSV rendering of evaluated scenes and locus traces."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Optional

import numpy as np

from .core import Circle, Conic, HLine, HPoint
from .engine import (
    DRAGGABLE_TOOLS,
    Figure,
    Polyline,
    Ray,
    Scene,
    Segment,
)


def _fmt(x: float) -> str:
    return format(x, ".6f").rstrip("0").rstrip(".") or "0"


def _fmt17(x: float) -> str:
    return format(x, ".17g")


def scene_bbox(scene: Scene) -> tuple[float, float, float, float]:
    """Bounding box (xmin, ymin, xmax, ymax) of the finite scene content."""
    xs: list[float] = []
    ys: list[float] = []
    for _oid, entry in scene.items():
        if not entry.exists:
            continue
        v = entry.value
        if isinstance(v, HPoint) and not v.is_infinite:
            x, y = v.affine()
            xs.append(x)
            ys.append(y)
        elif isinstance(v, Circle):
            cx, cy = v.center.affine()
            xs.extend([cx - v.radius, cx + v.radius])
            ys.extend([cy - v.radius, cy + v.radius])
        elif isinstance(v, Segment):
            for p in (v.a, v.b):
                x, y = p.affine()
                xs.append(x)
                ys.append(y)
        elif isinstance(v, Ray):
            for p in (v.origin, v.through):
                x, y = p.affine()
                xs.append(x)
                ys.append(y)
        elif isinstance(v, Polyline):
            for x, y in v.points():
                xs.append(x)
                ys.append(y)
    if not xs:
        return (-1.0, -1.0, 1.0, 1.0)
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    if xmax - xmin < 1e-9:
        xmin, xmax = xmin - 1.0, xmax + 1.0
    if ymax - ymin < 1e-9:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    return (xmin, ymin, xmax, ymax)


def _clip_line_to_box(l: HLine, box) -> Optional[tuple[tuple[float, float], tuple[float, float]]]:
    xmin, ymin, xmax, ymax = box
    pts = []
    a, b, c = l.a, l.b, l.c
    for x in (xmin, xmax):
        if abs(b) > 1e-15:
            y = -(a * x + c) / b
            if ymin - 1e-9 <= y <= ymax + 1e-9:
                pts.append((x, y))
    for y in (ymin, ymax):
        if abs(a) > 1e-15:
            x = -(b * y + c) / a
            if xmin - 1e-9 <= x <= xmax + 1e-9:
                pts.append((x, y))
    uniq: list[tuple[float, float]] = []
    for p in pts:
        if not any(math.hypot(p[0] - q[0], p[1] - q[1]) < 1e-9 for q in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        return None
    return uniq[0], uniq[1]


def _conic_runs(v: Conic, box, samples: int = 240) -> list[list[tuple[float, float]]]:
    """Sample a conic inside the box by vertical scan lines."""
    xmin, ymin, xmax, ymax = box
    branches: list[list[tuple[float, float]]] = [[], []]
    runs: list[list[tuple[float, float]]] = []
    m = v.m
    for i in range(samples + 1):
        x = xmin + (xmax - xmin) * i / samples
        qa = m[1, 1]
        qb = 2.0 * (m[0, 1] * x + m[1, 2])
        qc = m[0, 0] * x * x + 2.0 * m[0, 2] * x + m[2, 2]
        ys: list[float] = []
        if abs(qa) < 1e-15:
            if abs(qb) > 1e-15:
                ys = [-qc / qb]
        else:
            disc = qb * qb - 4 * qa * qc
            if disc >= 0:
                r = math.sqrt(disc)
                ys = sorted([(-qb - r) / (2 * qa), (-qb + r) / (2 * qa)])
        for bi in range(2):
            if bi < len(ys) and ymin <= ys[bi] <= ymax:
                branches[bi].append((x, ys[bi]))
            else:
                if branches[bi]:
                    runs.append(branches[bi])
                    branches[bi] = []
    runs.extend(b for b in branches if b)
    return runs


def render_svg(
    scene: Scene,
    fig: Optional[Figure] = None,
    extra_polylines: Optional[list[Polyline]] = None,
    width: int = 640,
) -> str:
    """Valid-XML SVG of a scene, viewbox-normalized with a 5% margin.

    Draggable points are drawn with a distinct class; non-existent
    objects are skipped; polylines keep their gaps."""
    xmin, ymin, xmax, ymax = scene_bbox(scene)
    mx = 0.05 * (xmax - xmin)
    my = 0.05 * (ymax - ymin)
    xmin, xmax, ymin, ymax = xmin - mx, xmax + mx, ymin - my, ymax + my
    box = (xmin, ymin, xmax, ymax)
    w = xmax - xmin
    h = ymax - ymin
    height = int(round(width * h / w))
    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": str(width),
            "height": str(height),
            "viewBox": f"{_fmt(xmin)} {_fmt(-ymax)} {_fmt(w)} {_fmt(h)}",
        },
    )
    style = ET.SubElement(svg, "style")
    style.text = (
        ".curve{fill:none;stroke:#555;stroke-width:0.6%}"
        ".seg{fill:none;stroke:#111;stroke-width:0.8%}"
        ".trace{fill:none;stroke:#c22;stroke-width:0.8%}"
        ".pt{fill:#333}"
        ".pt.draggable{fill:#16c}"
    )
    draggable = set()
    if fig is not None:
        for step in fig.steps:
            if step.tool in DRAGGABLE_TOOLS:
                draggable.add(step.id)
    point_radius = 0.012 * max(w, h)

    def yflip(y: float) -> float:
        return -y

    for oid, entry in scene.items():
        if not entry.exists:
            continue
        v = entry.value
        if isinstance(v, HPoint):
            if v.is_infinite:
                continue
            x, y = v.affine()
            cls = "pt draggable" if oid in draggable else "pt"
            el = ET.SubElement(
                svg,
                "circle",
                {"cx": _fmt(x), "cy": _fmt(yflip(y)), "r": _fmt(point_radius), "class": cls},
            )
            el.set("data-id", oid)
        elif isinstance(v, Circle):
            cx, cy = v.center.affine()
            el = ET.SubElement(
                svg,
                "circle",
                {
                    "cx": _fmt(cx),
                    "cy": _fmt(yflip(cy)),
                    "r": _fmt(v.radius),
                    "class": "curve",
                },
            )
            el.set("data-id", oid)
        elif isinstance(v, Segment):
            (x1, y1), (x2, y2) = v.a.affine(), v.b.affine()
            el = ET.SubElement(
                svg,
                "line",
                {"x1": _fmt(x1), "y1": _fmt(yflip(y1)), "x2": _fmt(x2), "y2": _fmt(yflip(y2)), "class": "seg"},
            )
            el.set("data-id", oid)
        elif isinstance(v, Ray):
            carrier = v.carrier()
            clipped = _clip_line_to_box(carrier, box)
            if clipped is None:
                continue
            ox, oy = v.origin.affine()
            tx, ty = v.through.affine()
            dx, dy = tx - ox, ty - oy
            far = None
            for p in clipped:
                if (p[0] - ox) * dx + (p[1] - oy) * dy > 0:
                    far = p
            if far is None:
                continue
            el = ET.SubElement(
                svg,
                "line",
                {"x1": _fmt(ox), "y1": _fmt(yflip(oy)), "x2": _fmt(far[0]), "y2": _fmt(yflip(far[1])), "class": "curve"},
            )
            el.set("data-id", oid)
        elif isinstance(v, HLine):
            clipped = _clip_line_to_box(v, box)
            if clipped is None:
                continue
            (x1, y1), (x2, y2) = clipped
            el = ET.SubElement(
                svg,
                "line",
                {"x1": _fmt(x1), "y1": _fmt(yflip(y1)), "x2": _fmt(x2), "y2": _fmt(yflip(y2)), "class": "curve"},
            )
            el.set("data-id", oid)
        elif isinstance(v, Conic):
            for run in _conic_runs(v, box):
                pts = " ".join(f"{_fmt(x)},{_fmt(yflip(y))}" for x, y in run)
                el = ET.SubElement(svg, "polyline", {"points": pts, "class": "curve"})
                el.set("data-id", oid)
        elif isinstance(v, Polyline):
            for run in v.runs:
                if len(run) < 2:
                    continue
                pts = " ".join(f"{_fmt(x)},{_fmt(yflip(y))}" for x, y in run)
                el = ET.SubElement(svg, "polyline", {"points": pts, "class": "trace"})
                el.set("data-id", oid)
    for pl in extra_polylines or []:
        for run in pl.runs:
            if len(run) < 2:
                continue
            pts = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in run)
            ET.SubElement(svg, "polyline", {"points": pts, "class": "trace"})
    return ET.tostring(svg, encoding="unicode")


def trace_csv(rows: list[tuple[float, Optional[tuple[float, float]]]]) -> str:
    """CSV with the fixed column order t,x,y,exists and 17-digit numbers."""
    out = ["t,x,y,exists"]
    for t, pos in rows:
        if pos is None:
            out.append(f"{_fmt17(t)},,,0")
        else:
            out.append(f"{_fmt17(t)},{_fmt17(pos[0])},{_fmt17(pos[1])},1")
    return "\n".join(out) + "\n"
