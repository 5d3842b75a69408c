"""Session service speaking the JSON wire protocol over WebSocket.

One connection = one session (a Figure plus its BranchState); messages
within a session are processed strictly in arrival order, so dragging
has the same branch-continuity semantics as CLI sweeps.  Sessions are
fully independent.

client -> server frames:
    {"op": "load",    "source": <geo text>}
    {"op": "drag",    "id": <object>, "x": <num>, "y": <num>}
    {"op": "toolset", "name": <toolset>}
    {"op": "trace",   "mover": .., "path": .., "target": .., "n": ..}
server -> client frames:
    {"op": "scene", "objects": [{"id", "kind", "data", "exists", "draggable"}, ...]}
    {"op": "error", "message": .., "line": .., "col": ..}

Numbers are serialized with 17 significant digits.
"""

from __future__ import annotations

import asyncio
import json
import math
import signal
from typing import Optional

from .core import Circle, Conic, HLine, HPoint
from .dsl import parse
from .engine import (
    BUILTIN_TOOLSETS,
    BranchState,
    DRAGGABLE_TOOLS,
    Figure,
    GeometryError,
    Polyline,
    Ray,
    Scene,
    Segment,
    check_toolset,
    drag,
    evaluate_with_state,
    trace_locus,
)


def _num(x: float) -> str:
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return "null"
    return format(float(x), ".17g")


def dumps_wire(obj) -> str:
    """JSON text with all numbers rendered at 17 significant digits."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int,)):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_wire(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + dumps_wire(v) for k, v in obj.items()) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def value_data(value) -> tuple[str, Optional[dict]]:
    if isinstance(value, HPoint):
        if value.is_infinite:
            return "point", {"infinite": True, "dx": value.x, "dy": value.y}
        x, y = value.affine()
        return "point", {"x": x, "y": y}
    if isinstance(value, HLine):
        return "line", {"a": value.a, "b": value.b, "c": value.c}
    if isinstance(value, Segment):
        (x1, y1), (x2, y2) = value.a.affine(), value.b.affine()
        return "segment", {"x1": x1, "y1": y1, "x2": x2, "y2": y2}
    if isinstance(value, Ray):
        (x1, y1), (x2, y2) = value.origin.affine(), value.through.affine()
        return "ray", {"x1": x1, "y1": y1, "x2": x2, "y2": y2}
    if isinstance(value, Circle):
        cx, cy = value.center.affine()
        return "circle", {"cx": cx, "cy": cy, "r": value.radius}
    if isinstance(value, Conic):
        return "conic", {"matrix": [[float(v) for v in row] for row in value.m]}
    if isinstance(value, Polyline):
        return "locus", {"runs": [[[x, y] for x, y in run] for run in value.runs]}
    if isinstance(value, float):
        return "scalar", {"value": value}
    return "unknown", None


def _declared_kinds(fig: Figure) -> dict[str, str]:
    from .engine import TOOL_TABLE

    kinds: dict[str, str] = {}
    for step in fig.steps:
        spec = TOOL_TABLE.get(step.tool)
        for oid in step.all_outputs():
            kinds[oid] = spec.output if spec is not None else "unknown"
    return kinds


def scene_frame(fig: Figure, scene: Scene, extra: Optional[dict] = None) -> dict:
    draggable = {s.id for s in fig.steps if s.tool in DRAGGABLE_TOOLS}
    kinds_by_id = _declared_kinds(fig)
    objects = []
    for oid, entry in scene.items():
        if entry.exists:
            kind, data = value_data(entry.value)
        else:
            kind, data = kinds_by_id.get(oid, "unknown"), None
        objects.append(
            {
                "id": oid,
                "kind": kind,
                "data": data,
                "exists": entry.exists,
                "draggable": oid in draggable,
            }
        )
    if extra:
        objects.append(extra)
    return {"op": "scene", "objects": objects}


def error_frame(message: str, line: Optional[int] = None, col: Optional[int] = None) -> dict:
    return {"op": "error", "message": message, "line": line, "col": col}


class Session:
    """Wire-protocol state machine for one connection."""

    def __init__(self):
        self.figure: Optional[Figure] = None
        self.state = BranchState()

    def handle(self, text: str) -> list[dict]:
        try:
            msg = json.loads(text)
        except json.JSONDecodeError as e:
            return [error_frame(f"malformed JSON: {e.msg}", e.lineno, e.colno)]
        if not isinstance(msg, dict) or "op" not in msg:
            return [error_frame("message must be an object with an 'op' field", None, None)]
        op = msg["op"]
        if op == "load":
            return self._load(msg)
        if op == "drag":
            return self._drag(msg)
        if op == "toolset":
            return self._toolset(msg)
        if op == "trace":
            return self._trace(msg)
        return [error_frame(f"unknown op {op!r}", None, None)]

    def _need_figure(self) -> Optional[list[dict]]:
        if self.figure is None:
            return [error_frame("no figure loaded", None, None)]
        return None

    def _scene(self, extra: Optional[dict] = None) -> list[dict]:
        scene, self.state = evaluate_with_state(self.figure, self.state)
        return [scene_frame(self.figure, scene, extra)]

    def _load(self, msg) -> list[dict]:
        source = msg.get("source")
        if not isinstance(source, str):
            return [error_frame("load needs a string 'source'", None, None)]
        res = parse(source)
        if not res.ok:
            return [error_frame(e.message, e.line, e.column) for e in res.errors]
        self.figure = res.figure
        self.state = BranchState()
        return self._scene()

    def _drag(self, msg) -> list[dict]:
        missing = self._need_figure()
        if missing:
            return missing
        oid = msg.get("id")
        x, y = msg.get("x"), msg.get("y")
        if not isinstance(oid, str) or not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            return [error_frame("drag needs 'id', 'x', 'y'", None, None)]
        try:
            scene, self.state = drag(self.figure, self.state, oid, (float(x), float(y)))
        except GeometryError as e:
            return [error_frame(str(e), None, None)]
        return [scene_frame(self.figure, scene)]

    def _toolset(self, msg) -> list[dict]:
        missing = self._need_figure()
        if missing:
            return missing
        name = msg.get("name")
        ts = BUILTIN_TOOLSETS.get(name) if isinstance(name, str) else None
        if ts is None:
            return [error_frame(f"unknown toolset {name!r}", None, None)]
        self.figure = self.figure.with_toolset(ts)
        violations = check_toolset(self.figure)
        if violations:
            listing = "; ".join(f"{sid} uses {tool}" for sid, tool in violations)
            return [error_frame(f"toolset violations: {listing}", None, None)] + self._scene()
        return self._scene()

    def _trace(self, msg) -> list[dict]:
        missing = self._need_figure()
        if missing:
            return missing
        mover, path, target = msg.get("mover"), msg.get("path"), msg.get("target")
        n = msg.get("n", 256)
        if not all(isinstance(v, str) for v in (mover, path, target)) or not isinstance(n, int):
            return [error_frame("trace needs 'mover', 'path', 'target' ids and integer 'n'", None, None)]
        try:
            pl = trace_locus(self.figure, mover, path, target, n, base_state=self.state)
        except GeometryError as e:
            return [error_frame(str(e), None, None)]
        kind, data = value_data(pl)
        extra = {
            "id": f"trace:{target}",
            "kind": kind,
            "data": data,
            "exists": pl.sample_count() > 0,
            "draggable": False,
        }
        return self._scene(extra)


async def _handler(websocket):
    session = Session()
    async for message in websocket:
        if isinstance(message, bytes):
            message = message.decode("utf-8", errors="replace")
        for frame in session.handle(message):
            await websocket.send(dumps_wire(frame))


async def serve_async(port: int, host: str = "127.0.0.1", ready: Optional[asyncio.Event] = None):
    from websockets.asyncio.server import serve as ws_serve

    async with ws_serve(_handler, host, port) as server:
        bound = server.sockets[0].getsockname()[1] if server.sockets else port
        print(f"listening on ws://{host}:{bound}", flush=True)
        if ready is not None:
            ready.set()
        stop = asyncio.Event()
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            try:
                loop.add_signal_handler(sig, stop.set)
            except (NotImplementedError, RuntimeError):
                pass
        await stop.wait()
        server.close()


def serve_forever(port: int, host: str = "127.0.0.1") -> int:
    """Blocking entry point; returns an exit code."""
    try:
        asyncio.run(serve_async(port, host))
    except OSError as e:
        print(f"cannot bind port {port}: {e}", flush=True)
        return 1
    except KeyboardInterrupt:
        pass
    return 0
