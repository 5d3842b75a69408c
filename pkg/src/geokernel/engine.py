"""Dependency-graph evaluation of ruler-and-compass constructions.

A Figure is an immutable, topologically ordered list of typed steps over
a fixed tool table; evaluation produces a Scene (value + existence flag
per object).  Geometric failures (empty intersections, degenerate
inputs) never abort evaluation: the object and its dependents are
flagged non-existent.  Dragging re-evaluates under a BranchState that
keeps, per multi-valued step, the witness of the previously chosen
branch, so intersection branches follow the nearest-witness rule frame
to frame.  Restricted toolsets model axiom games: a construction passes
a toolset when every step's tool, transitively through macro bodies, is
allowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import core, transforms
from .core import (
    Circle,
    Conic,
    GeometryError,
    HLine,
    HPoint,
)


class MalformedFigure(GeometryError):
    pass


class NotDraggable(GeometryError):
    pass


class NoDependency(GeometryError):
    pass


class NameClash(GeometryError):
    pass


class IllFormedBody(GeometryError):
    pass


# ---------------------------------------------------------------------------
# engine value types


@dataclass(frozen=True)
class Segment:
    a: HPoint
    b: HPoint

    def carrier(self) -> HLine:
        return core.join(self.a, self.b)

    def length(self) -> float:
        return core.distance(self.a, self.b)

    def point_at(self, t: float) -> HPoint:
        ax, ay = self.a.affine()
        bx, by = self.b.affine()
        return HPoint.at(ax + t * (bx - ax), ay + t * (by - ay))


@dataclass(frozen=True)
class Ray:
    origin: HPoint
    through: HPoint

    def carrier(self) -> HLine:
        return core.join(self.origin, self.through)

    def point_at(self, t: float) -> HPoint:
        ax, ay = self.origin.affine()
        bx, by = self.through.affine()
        return HPoint.at(ax + t * (bx - ax), ay + t * (by - ay))


@dataclass(frozen=True)
class Polyline:
    """Locus trace: runs of affine samples, split at non-existent frames."""

    runs: tuple[tuple[tuple[float, float], ...], ...]

    def sample_count(self) -> int:
        return sum(len(r) for r in self.runs)

    def points(self) -> list[tuple[float, float]]:
        return [p for run in self.runs for p in run]


Value = Union[HPoint, HLine, Segment, Ray, Circle, Conic, Polyline, float]

_KIND_OF_TYPE = {
    HPoint: "point",
    HLine: "line",
    Segment: "segment",
    Ray: "ray",
    Circle: "circle",
    Conic: "conic",
    Polyline: "locus",
    float: "scalar",
}

CURVE_KINDS = frozenset({"line", "segment", "ray", "circle", "conic"})
LINELIKE_KINDS = frozenset({"line", "segment", "ray"})


def kind_of(value: Value) -> str:
    for t, k in _KIND_OF_TYPE.items():
        if isinstance(value, t):
            return k
    raise TypeError(f"unknown engine value {value!r}")


def kind_matches(declared: str, actual: str) -> bool:
    # a circle is acceptable wherever a conic is expected
    return declared == actual or (declared == "conic" and actual == "circle")


def carrier_of(value: Value) -> HLine:
    if isinstance(value, HLine):
        return value
    if isinstance(value, (Segment, Ray)):
        return value.carrier()
    raise TypeError(f"value has no carrier line: {value!r}")


# ---------------------------------------------------------------------------
# steps, figures, toolsets, macros


@dataclass(frozen=True)
class Step:
    """One construction step; `outputs` is only set for macro calls that
    bind more than one object (its first entry then equals `id`).

    A parameter may be a literal number or the name of an in-scope
    scalar object (e.g. a macro's scalar formal or an angle measure),
    resolved at evaluation time."""

    id: str
    tool: str
    inputs: tuple[str, ...] = ()
    params: tuple[Union[float, str], ...] = ()
    outputs: tuple[str, ...] = ()

    def all_outputs(self) -> tuple[str, ...]:
        return self.outputs if self.outputs else (self.id,)


@dataclass(frozen=True)
class Toolset:
    name: str
    allowed: frozenset[str]


@dataclass(frozen=True)
class Macro:
    """Compound tool: a body of steps over typed formal inputs."""

    name: str
    inputs: tuple[tuple[str, str], ...]  # (formal name, kind)
    body: tuple[Step, ...]
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class Figure:
    steps: tuple[Step, ...] = ()
    toolset: "Toolset" = None  # type: ignore[assignment]
    macros: Mapping[str, Macro] = field(default_factory=dict)

    def __post_init__(self):
        if self.toolset is None:
            object.__setattr__(self, "toolset", FULL)

    def step_map(self) -> dict[str, Step]:
        out = {}
        for s in self.steps:
            for oid in s.all_outputs():
                out[oid] = s
        return out

    def with_toolset(self, toolset: "Toolset") -> "Figure":
        return replace(self, toolset=toolset)


@dataclass
class BranchState:
    """Per-session drag state: parameter overrides for dragged points and
    the last chosen branch witness of every multi-valued step."""

    params: dict[str, tuple[float, ...]] = field(default_factory=dict)
    witnesses: dict[str, HPoint] = field(default_factory=dict)

    def copy(self) -> "BranchState":
        return BranchState(dict(self.params), dict(self.witnesses))


@dataclass(frozen=True)
class SceneEntry:
    value: Optional[Value]
    exists: bool


@dataclass(frozen=True)
class Scene:
    entries: Mapping[str, SceneEntry]

    def __getitem__(self, oid: str) -> SceneEntry:
        return self.entries[oid]

    def __contains__(self, oid: str) -> bool:
        return oid in self.entries

    def value(self, oid: str) -> Value:
        e = self.entries[oid]
        if not e.exists:
            raise KeyError(f"object {oid} does not exist in this scene")
        return e.value

    def exists(self, oid: str) -> bool:
        return oid in self.entries and self.entries[oid].exists

    def all_exist(self) -> bool:
        return all(e.exists for e in self.entries.values())

    def items(self):
        return self.entries.items()


# ---------------------------------------------------------------------------
# the fixed tool table


@dataclass(frozen=True)
class ToolSpec:
    name: str
    input_kinds: tuple[frozenset[str], ...]
    output: str
    min_params: int = 0
    max_params: int = 0
    non_euclidean: bool = False
    multivalued: bool = False


def _spec(name, inputs, output, nparams=(0, 0), non_euclidean=False, multivalued=False):
    kinds = tuple(frozenset({k} if isinstance(k, str) else k) for k in inputs)
    return ToolSpec(name, kinds, output, nparams[0], nparams[1], non_euclidean, multivalued)


POINT = "point"
TOOL_TABLE: dict[str, ToolSpec] = {
    t.name: t
    for t in [
        _spec("free_point", (), POINT, (2, 2)),
        _spec("point_on", (CURVE_KINDS,), POINT, (1, 1)),
        _spec("line_through", (POINT, POINT), "line"),
        _spec("segment", (POINT, POINT), "segment"),
        _spec("ray", (POINT, POINT), "ray"),
        _spec("circle_center_point", (POINT, POINT), "circle"),
        _spec("intersect", (CURVE_KINDS, CURVE_KINDS), POINT, (0, 1), multivalued=True),
        _spec("parallel", (LINELIKE_KINDS, POINT), "line"),
        _spec("perpendicular", (LINELIKE_KINDS, POINT), "line"),
        _spec("midpoint", (POINT, POINT), POINT),
        _spec("compass", ("segment", POINT), "circle"),
        _spec("circle_center_radius", (POINT,), "circle", (1, 1), non_euclidean=True),
        _spec("angle_measure", (POINT, POINT, POINT), "scalar", non_euclidean=True),
        _spec("polar", (frozenset({"circle", "conic"}), POINT), "line"),
        _spec("invert", ("circle", POINT), POINT),
        _spec("bh_invert", (frozenset({"circle", "conic"}), POINT, POINT), POINT),
        _spec("locus", (POINT, POINT, CURVE_KINDS), "locus", (0, 1)),
    ]
}

POSTULATES_ONLY = Toolset(
    "POSTULATES_ONLY",
    frozenset(
        {"free_point", "point_on", "line_through", "segment", "ray", "circle_center_point", "intersect"}
    ),
)
EUCLID_BOOK1 = Toolset(
    "EUCLID_BOOK1",
    POSTULATES_ONLY.allowed | {"perpendicular", "parallel", "midpoint", "compass"},
)
FULL = Toolset("FULL", frozenset(TOOL_TABLE))

BUILTIN_TOOLSETS = {t.name: t for t in (POSTULATES_ONLY, EUCLID_BOOK1, FULL)}


# ---------------------------------------------------------------------------
# parametrized points on curves (point_on, locus sweeping, drag projection)


def point_on_curve(curve: Value, t: float) -> Optional[HPoint]:
    """Point of the curve at parameter t: circles by angle, segments by
    affine parameter in [0, 1], lines by canonical affine parameter."""
    if isinstance(curve, Circle):
        return curve.point_at(t)
    if isinstance(curve, Segment):
        return curve.point_at(min(max(t, 0.0), 1.0))
    if isinstance(curve, Ray):
        return curve.point_at(max(t, 0.0))
    if isinstance(curve, HLine):
        if curve.is_infinity:
            return None
        p0, d = core._line_points(curve)
        base = p0 / p0[2]
        n = math.hypot(d[0], d[1])
        return HPoint.at(base[0] + t * d[0] / n, base[1] + t * d[1] / n)
    if isinstance(curve, Conic):
        return _ellipse_point(curve, t)
    return None


def _ellipse_frame(conic: Conic):
    try:
        ctr = conic.center()
    except core.DegenerateInput:
        return None
    if ctr.is_infinite:
        return None
    cx, cy = ctr.affine()
    q = conic.m[:2, :2]
    v = np.array([cx, cy, 1.0])
    c0 = float(v @ conic.m @ v)
    w, r = np.linalg.eigh(q)
    if w[0] * w[1] <= 0:
        return None  # hyperbola
    if c0 * w[0] >= 0:
        return None  # empty (imaginary) ellipse
    axes = np.sqrt(-c0 / w)
    return (cx, cy), r, axes


def _ellipse_point(conic: Conic, t: float) -> Optional[HPoint]:
    frame = _ellipse_frame(conic)
    if frame is None:
        return None
    (cx, cy), r, axes = frame
    local = r @ np.array([axes[0] * math.cos(t), axes[1] * math.sin(t)])
    return HPoint.at(cx + local[0], cy + local[1])


def project_parameter(curve: Value, x: float, y: float) -> Optional[float]:
    """Parameter of the curve point nearest to (x, y)."""
    if isinstance(curve, Circle):
        ccx, ccy = curve.center.affine()
        if math.hypot(x - ccx, y - ccy) < 1e-12:
            return 0.0
        return math.atan2(y - ccy, x - ccx) % (2 * math.pi)
    if isinstance(curve, (Segment, Ray)):
        ax, ay = (curve.a if isinstance(curve, Segment) else curve.origin).affine()
        bx, by = (curve.b if isinstance(curve, Segment) else curve.through).affine()
        dd = (bx - ax) ** 2 + (by - ay) ** 2
        if dd < 1e-24:
            return 0.0
        t = ((x - ax) * (bx - ax) + (y - ay) * (by - ay)) / dd
        if isinstance(curve, Segment):
            return min(max(t, 0.0), 1.0)
        return max(t, 0.0)
    if isinstance(curve, HLine):
        p0, d = core._line_points(curve)
        base = p0 / p0[2]
        n = math.hypot(d[0], d[1])
        return ((x - base[0]) * d[0] + (y - base[1]) * d[1]) / n
    if isinstance(curve, Conic):
        frame = _ellipse_frame(curve)
        if frame is None:
            return None
        best_t, best_d = 0.0, math.inf
        for k in range(720):
            t = 2 * math.pi * k / 720
            p = _ellipse_point(curve, t)
            px, py = p.affine()
            dist = (px - x) ** 2 + (py - y) ** 2
            if dist < best_d:
                best_t, best_d = t, dist
        return best_t
    return None


# ---------------------------------------------------------------------------
# tool evaluation


def _tool_candidates(step: Step, values: Sequence[Value], fig: Figure, state: Optional[BranchState]):
    """Evaluate one tool application; returns a list of candidate values
    (singletons for single-valued tools).  Geometric failures raise."""
    tool = step.tool
    if tool == "free_point":
        x, y = step.params[0], step.params[1]
        return [HPoint.at(x, y)]
    if tool == "point_on":
        p = point_on_curve(values[0], step.params[0])
        if p is None:
            raise core.DegenerateInput("curve cannot be parametrized")
        return [p]
    if tool == "line_through":
        return [core.join(values[0], values[1])]
    if tool == "segment":
        if values[0].close_to(values[1]):
            raise core.DegenerateInput("degenerate segment")
        return [Segment(values[0], values[1])]
    if tool == "ray":
        if values[0].close_to(values[1]):
            raise core.DegenerateInput("degenerate ray")
        return [Ray(values[0], values[1])]
    if tool == "circle_center_point":
        return [Circle(values[0], core.distance(values[0], values[1]))]
    if tool == "intersect":
        return _intersection_candidates(values[0], values[1])
    if tool == "parallel":
        return [core.parallel_through(carrier_of(values[0]), values[1])]
    if tool == "perpendicular":
        return [core.perpendicular_through(carrier_of(values[0]), values[1])]
    if tool == "midpoint":
        return [core.midpoint(values[0], values[1])]
    if tool == "compass":
        return [Circle(values[1], values[0].length())]
    if tool == "circle_center_radius":
        return [Circle(values[0], step.params[0])]
    if tool == "angle_measure":
        return [_angle_at(values[0], values[1], values[2])]
    if tool == "polar":
        return [transforms.polar(values[0], values[1])]
    if tool == "invert":
        return [transforms.invert_point(values[0], values[1])]
    if tool == "bh_invert":
        cfg = transforms.BHConfig.create(values[0], values[1])
        return [transforms.bh_invert(cfg, values[2])]
    if tool == "locus":
        n = int(step.params[0]) if step.params else 256
        target_id, mover_id, path_id = step.inputs
        prefix = _prefix_figure(fig, step)
        return [trace_locus(prefix, mover_id, values[2], target_id, n, base_state=state)]
    raise MalformedFigure(f"unknown tool {tool}")


def _angle_at(a: HPoint, b: HPoint, c: HPoint) -> float:
    ax, ay = a.affine()
    bx, by = b.affine()
    cx, cy = c.affine()
    v1 = (ax - bx, ay - by)
    v2 = (cx - bx, cy - by)
    n1, n2 = math.hypot(*v1), math.hypot(*v2)
    if n1 < 1e-14 or n2 < 1e-14:
        raise core.DegenerateInput("angle with coincident points")
    cosv = (v1[0] * v2[0] + v1[1] * v2[1]) / (n1 * n2)
    return math.acos(min(1.0, max(-1.0, cosv)))


def _intersection_candidates(a: Value, b: Value) -> list[HPoint]:
    """Ordered intersection candidates; tangency contributes the double
    point twice so both branches stay alive through the contact frame.
    Segment/ray operands keep only points within their extent."""
    obj_a = carrier_of(a) if isinstance(a, (Segment, Ray)) else a
    obj_b = carrier_of(b) if isinstance(b, (Segment, Ray)) else b
    inters = core.intersect(obj_a, obj_b)
    pts: list[HPoint] = []
    for inter in inters:
        pts.extend([inter.point] * inter.multiplicity)
    eps = 1e-9

    def within(orig: Value, p: HPoint) -> bool:
        if isinstance(orig, Segment):
            if p.is_infinite:
                return False
            ax, ay = orig.a.affine()
            bx, by = orig.b.affine()
            dd = (bx - ax) ** 2 + (by - ay) ** 2
            t = ((p.affine()[0] - ax) * (bx - ax) + (p.affine()[1] - ay) * (by - ay)) / dd
            return -eps <= t <= 1 + eps
        if isinstance(orig, Ray):
            if p.is_infinite:
                # the carrier's unique point at infinity lies on the
                # ray's closure (forward and backward collapse projectively)
                return True
            ax, ay = orig.origin.affine()
            bx, by = orig.through.affine()
            dd = (bx - ax) ** 2 + (by - ay) ** 2
            t = ((p.affine()[0] - ax) * (bx - ax) + (p.affine()[1] - ay) * (by - ay)) / dd
            return t >= -eps
        return True

    return [p for p in pts if within(a, p) and within(b, p)]


# ---------------------------------------------------------------------------
# figure validation and evaluation


def validate(fig: Figure) -> None:
    """Raise MalformedFigure on duplicate ids, unknown tools or inputs,
    arity mismatches, or non-topological input references."""
    seen: dict[str, str] = {}
    for step in fig.steps:
        spec = TOOL_TABLE.get(step.tool)
        macro = fig.macros.get(step.tool)
        if spec is None and macro is None:
            raise MalformedFigure(f"step {step.id}: unknown tool {step.tool!r}")
        for oid in step.all_outputs():
            if oid in seen:
                raise MalformedFigure(f"object {oid} defined twice")
        if spec is not None:
            if len(step.inputs) != len(spec.input_kinds):
                raise MalformedFigure(
                    f"step {step.id}: {step.tool} takes {len(spec.input_kinds)} inputs, got {len(step.inputs)}"
                )
            if not (spec.min_params <= len(step.params) <= spec.max_params):
                raise MalformedFigure(f"step {step.id}: wrong parameter count for {step.tool}")
            for ref, allowed in zip(step.inputs, spec.input_kinds):
                if ref not in seen:
                    raise MalformedFigure(f"step {step.id}: undefined input {ref}")
                if seen[ref] != "?" and not any(kind_matches(k, seen[ref]) for k in allowed):
                    raise MalformedFigure(
                        f"step {step.id}: input {ref} has kind {seen[ref]}, expected one of {sorted(allowed)}"
                    )
            for p in step.params:
                if isinstance(p, str):
                    if p not in seen:
                        raise MalformedFigure(f"step {step.id}: undefined scalar {p}")
                    if seen[p] not in ("scalar", "?"):
                        raise MalformedFigure(f"step {step.id}: parameter {p} is not a scalar")
            if step.tool == "intersect" and step.params:
                if isinstance(step.params[0], str) or step.params[0] not in (0.0, 1.0):
                    raise MalformedFigure(f"step {step.id}: branch must be a literal 0 or 1")
            out_kinds = [spec.output]
        else:
            expected = len([1 for _, k in macro.inputs if k != "scalar"])
            nscalars = len(macro.inputs) - expected
            if len(step.inputs) != expected or len(step.params) != nscalars:
                raise MalformedFigure(f"step {step.id}: macro {macro.name} arity mismatch")
            for ref in step.inputs:
                if ref not in seen:
                    raise MalformedFigure(f"step {step.id}: undefined input {ref}")
            for p in step.params:
                if isinstance(p, str) and seen.get(p) not in ("scalar", "?"):
                    raise MalformedFigure(f"step {step.id}: parameter {p} is not a defined scalar")
            if len(step.all_outputs()) != len(macro.outputs):
                raise MalformedFigure(f"step {step.id}: macro {macro.name} binds {len(macro.outputs)} outputs")
            out_kinds = ["?"] * len(macro.outputs)
        for oid, k in zip(step.all_outputs(), out_kinds):
            seen[oid] = k


def _macro_env(macro: Macro, step: Step, values: Sequence[Value]) -> dict[str, Value]:
    env: dict[str, Value] = {}
    vi = 0
    pi = 0
    for formal, fkind in macro.inputs:
        if fkind == "scalar":
            env[formal] = float(step.params[pi])
            pi += 1
        else:
            env[formal] = values[vi]
            vi += 1
    return env


def _evaluate_steps(
    fig: Figure,
    state: Optional[BranchState],
    new_state: Optional[BranchState],
) -> dict[str, SceneEntry]:
    entries: dict[str, SceneEntry] = {}

    def run_step(step: Step, env: Mapping[str, SceneEntry], witness_prefix: str) -> list[SceneEntry]:
        spec = TOOL_TABLE.get(step.tool)
        wkey = witness_prefix + step.id
        multivalued = spec.multivalued if spec is not None else False

        def dead() -> list[SceneEntry]:
            # a witness survives only while its object exists; after a gap
            # the step cold-starts from its branch parameter again
            if multivalued and new_state is not None:
                new_state.witnesses.pop(wkey, None)
            return [SceneEntry(None, False) for _ in step.all_outputs()]

        vals = []
        for ref in step.inputs:
            e = env[ref]
            if not e.exists:
                return dead()
            vals.append(e.value)
        if any(isinstance(p, str) for p in step.params):
            resolved = []
            for p in step.params:
                if isinstance(p, str):
                    e = env.get(p)
                    if e is None or not e.exists or not isinstance(e.value, float):
                        return dead()
                    resolved.append(e.value)
                else:
                    resolved.append(p)
            step = replace(step, params=tuple(resolved))
        macro = fig.macros.get(step.tool)
        if macro is not None:
            menv = {k: SceneEntry(v, True) for k, v in _macro_env(macro, step, vals).items()}
            local: dict[str, SceneEntry] = dict(menv)
            for bstep in macro.body:
                outs = run_step(bstep, local, f"{witness_prefix}{step.id}::")
                for oid, entry in zip(bstep.all_outputs(), outs):
                    local[oid] = entry
            return [local.get(o, SceneEntry(None, False)) for o in macro.outputs]
        try:
            candidates = _tool_candidates(step, vals, fig, state)
        except GeometryError:
            return dead()
        if not candidates:
            return dead()
        if multivalued:
            witness = state.witnesses.get(wkey) if state is not None else None
            if witness is not None and all(isinstance(c, HPoint) for c in candidates):
                chosen = min(
                    range(len(candidates)),
                    key=lambda i: (core.point_distance(candidates[i], witness), i),
                )
            else:
                chosen = int(step.params[0]) if step.params else 0
                if chosen >= len(candidates):
                    return dead()
            value = candidates[chosen]
            if new_state is not None and isinstance(value, HPoint):
                new_state.witnesses[wkey] = value
            return [SceneEntry(value, True)]
        return [SceneEntry(candidates[0], True)]

    for step in fig.steps:
        eff_step = step
        if state is not None and step.id in state.params:
            eff_step = replace(step, params=state.params[step.id])
        outs = run_step(eff_step, entries, "")
        for oid, entry in zip(step.all_outputs(), outs):
            entries[oid] = entry
    return entries


def evaluate(fig: Figure) -> Scene:
    """Pure topological evaluation; branch selectors come from step params."""
    validate(fig)
    return Scene(_evaluate_steps(fig, None, None))


def evaluate_with_state(fig: Figure, state: BranchState) -> tuple[Scene, BranchState]:
    """Evaluation under drag state: parameter overrides are applied and
    multi-valued steps follow the nearest previous witness."""
    validate(fig)
    new_state = state.copy()
    entries = _evaluate_steps(fig, state, new_state)
    return Scene(entries), new_state


def _prefix_figure(fig: Figure, upto: Step) -> Figure:
    steps = []
    for s in fig.steps:
        if s.id == upto.id:
            break
        steps.append(s)
    return Figure(tuple(steps), fig.toolset, fig.macros)


# ---------------------------------------------------------------------------
# toolset checking


def _underlying_tools(fig: Figure, tool: str, stack: tuple[str, ...] = ()) -> set[str]:
    if tool in TOOL_TABLE:
        return {tool}
    macro = fig.macros.get(tool)
    if macro is None or tool in stack:
        return {tool}
    out: set[str] = set()
    for bstep in macro.body:
        out |= _underlying_tools(fig, bstep.tool, stack + (tool,))
    return out


def check_toolset(fig: Figure) -> list[tuple[str, str]]:
    """(step id, offending tool) pairs; empty iff the figure passes its
    toolset with every macro expanded transitively."""
    violations = []
    allowed = fig.toolset.allowed
    for step in fig.steps:
        for tool in sorted(_underlying_tools(fig, step.tool)):
            if tool not in allowed:
                violations.append((step.id, tool))
    return violations


# ---------------------------------------------------------------------------
# dragging and locus tracing


DRAGGABLE_TOOLS = {"free_point", "point_on"}


def drag(
    fig: Figure, state: BranchState, point: str, target: tuple[float, float]
) -> tuple[Scene, BranchState]:
    """Move a free point towards target and re-evaluate branch-continuously."""
    step = fig.step_map().get(point)
    if step is None or step.tool not in DRAGGABLE_TOOLS:
        raise NotDraggable(f"{point} is not a draggable point")
    work = state.copy()
    if step.tool == "free_point":
        work.params[point] = (float(target[0]), float(target[1]))
    else:
        scene, _ = evaluate_with_state(fig, work)
        curve_id = step.inputs[0]
        if not scene.exists(curve_id):
            raise NotDraggable(f"curve of {point} does not exist")
        t = project_parameter(scene.value(curve_id), float(target[0]), float(target[1]))
        if t is None:
            raise NotDraggable(f"curve of {point} cannot be parametrized")
        work.params[point] = (t,)
    return evaluate_with_state(fig, work)


def _depends_on(fig: Figure, target: str, mover: str) -> bool:
    deps: dict[str, set[str]] = {}
    for step in fig.steps:
        base: set[str] = set()
        for ref in step.inputs:
            base |= deps.get(ref, set()) | {ref}
        for oid in step.all_outputs():
            deps[oid] = base
    return mover in deps.get(target, set())


def _path_parameters(path: Value, n: int) -> list[float]:
    if isinstance(path, Circle) or isinstance(path, Conic):
        return [2 * math.pi * k / n for k in range(n)]
    if isinstance(path, Segment):
        return [k / (n - 1) for k in range(n)] if n > 1 else [0.0]
    if isinstance(path, Ray):
        return [10.0 * k / (n - 1) for k in range(n)] if n > 1 else [0.0]
    # full line: symmetric window in the canonical parameter
    return [-10.0 + 20.0 * k / (n - 1) for k in range(n)] if n > 1 else [0.0]


def trace_table(
    fig: Figure,
    mover: str,
    path: Union[Value, str],
    target: str,
    n: int = 256,
    base_state: Optional[BranchState] = None,
) -> list[tuple[float, Optional[tuple[float, float]]]]:
    """Per-sample trace: (parameter, target position or None) rows.

    Every frame is produced by a drag from the previous one, so branch
    choices are continuous along the sweep."""
    if n < 1:
        raise NoDependency("sample count must be positive")
    if not _depends_on(fig, target, mover):
        raise NoDependency(f"{target} does not depend on {mover}")
    # locus values are leaves (no tool consumes them), so recomputing them
    # on every sweep frame would only burn time quadratically; drop them
    if any(s.tool == "locus" for s in fig.steps):
        fig = Figure(tuple(s for s in fig.steps if s.tool != "locus"), fig.toolset, fig.macros)
    if isinstance(path, str):
        base_scene = evaluate(fig)
        if not base_scene.exists(path):
            raise NoDependency(f"path object {path} does not exist")
        path_value = base_scene.value(path)
    else:
        path_value = path
    state = base_state.copy() if base_state is not None else BranchState()
    rows: list[tuple[float, Optional[tuple[float, float]]]] = []
    for t in _path_parameters(path_value, n):
        p = point_on_curve(path_value, t)
        if p is None or p.is_infinite:
            rows.append((t, None))
            continue
        try:
            scene, state = drag(fig, state, mover, p.affine())
        except NotDraggable:
            raise
        except GeometryError:
            rows.append((t, None))
            continue
        if scene.exists(target) and isinstance(scene.value(target), HPoint) and not scene.value(target).is_infinite:
            rows.append((t, scene.value(target).affine()))
        else:
            rows.append((t, None))
    return rows


def trace_locus(
    fig: Figure,
    mover: str,
    path: Union[Value, str],
    target: str,
    n: int = 256,
    base_state: Optional[BranchState] = None,
) -> Polyline:
    """Sample `target` while `mover` sweeps `path` uniformly in parameter;
    non-existent frames split the polyline into separate runs."""
    runs: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    for _t, pos in trace_table(fig, mover, path, target, n, base_state):
        if pos is None:
            if current:
                runs.append(current)
                current = []
        else:
            current.append(pos)
    if current:
        runs.append(current)
    return Polyline(tuple(tuple(run) for run in runs))


# ---------------------------------------------------------------------------
# macros and protocol


def define_macro(
    fig: Figure,
    name: str,
    inputs: Sequence[tuple[str, str]],
    body: Sequence[Step],
    outputs: Sequence[str],
) -> Figure:
    """Register a compound tool; body steps may use formals and earlier
    body steps only."""
    if name in TOOL_TABLE or name in fig.macros:
        raise NameClash(f"tool or macro {name!r} already exists")
    if not body:
        raise IllFormedBody("macro body is empty")
    known = {formal for formal, _ in inputs}
    for bstep in body:
        for ref in bstep.inputs:
            if ref not in known:
                raise IllFormedBody(f"macro body references unknown object {ref}")
        for p in bstep.params:
            if isinstance(p, str) and p not in known:
                raise IllFormedBody(f"macro body references unknown scalar {p}")
        if bstep.tool not in TOOL_TABLE and bstep.tool not in fig.macros:
            raise IllFormedBody(f"macro body uses unknown tool {bstep.tool}")
        if bstep.tool == "locus":
            raise IllFormedBody("locus steps are not allowed inside macro bodies")
        for oid in bstep.all_outputs():
            if oid in known:
                raise IllFormedBody(f"macro body redefines {oid}")
            known.add(oid)
    if not outputs:
        raise IllFormedBody("macro must return at least one object")
    for out in outputs:
        if out not in known:
            raise IllFormedBody(f"macro output {out} is not defined in the body")
    macros = dict(fig.macros)
    macros[name] = Macro(name, tuple((f, k) for f, k in inputs), tuple(body), tuple(outputs))
    return Figure(fig.steps, fig.toolset, macros)


def _format_params(step: Step) -> str:
    return ", ".join(p if isinstance(p, str) else format(p, ".17g") for p in step.params)


def protocol(fig: Figure) -> list[str]:
    """Human-readable step list in evaluation order; macro calls show
    their expansion indented, non-Euclidean numeric inputs are tagged."""
    lines = []
    for i, step in enumerate(fig.steps, start=1):
        args = list(step.inputs) + ([_format_params(step)] if step.params else [])
        head = f"{i}: {', '.join(step.all_outputs())} = {step.tool}({', '.join(a for a in args if a)})"
        spec = TOOL_TABLE.get(step.tool)
        if spec is not None and spec.non_euclidean:
            head += "  [NON-EUCLIDEAN-INPUT]"
        lines.append(head)
        macro = fig.macros.get(step.tool)
        if macro is not None:
            for bstep in macro.body:
                bargs = list(bstep.inputs) + ([_format_params(bstep)] if bstep.params else [])
                btag = "  [NON-EUCLIDEAN-INPUT]" if TOOL_TABLE.get(bstep.tool, _spec("?", (), "?")).non_euclidean else ""
                lines.append(
                    f"    {bstep.id} = {bstep.tool}({', '.join(a for a in bargs if a)}){btag}"
                )
            lines.append(f"    return {', '.join(macro.outputs)}")
    return lines
