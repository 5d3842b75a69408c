"""Command-line front end: geo run | trace | verify | serve."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .dsl import parse
from .engine import (
    Figure,
    GeometryError,
    NoDependency,
    Scene,
    Segment,
    check_toolset,
    evaluate,
    protocol,
    trace_locus,
    trace_table,
)
from .server import dumps_wire, scene_frame
from .svgout import render_svg, trace_csv


def _read_figure(path: str) -> Figure | None:
    try:
        text = Path(path).read_text()
    except OSError as e:
        print(f"error: cannot read {path}: {e}", file=sys.stderr)
        return None
    res = parse(text)
    if not res.ok:
        for err in res.errors:
            print(f"{path}:{err.line}:{err.column}: {err.message}", file=sys.stderr)
        return None
    return res.figure


def _print_scene_text(fig: Figure, scene: Scene) -> None:
    print("# protocol")
    for line in protocol(fig):
        print(line)
    violations = check_toolset(fig)
    if violations:
        print("# toolset violations")
        for sid, tool in violations:
            print(f"  {sid}: {tool} not allowed under {fig.toolset.name}")
    print("# scene")
    from .server import value_data

    for oid, entry in scene.items():
        if not entry.exists:
            print(f"{oid}: (does not exist)")
            continue
        kind, data = value_data(entry.value)
        payload = " ".join(f"{k}={dumps_wire(v)}" for k, v in (data or {}).items())
        print(f"{oid}: {kind} {payload}")
    segments = [(oid, e.value) for oid, e in scene.items() if e.exists and isinstance(e.value, Segment)]
    if segments:
        print("# measurements")
        for oid, seg in segments:
            print(f"|{oid}| = {format(seg.length(), '.17g')}")
        if len(segments) >= 2:
            print("# ratios")
            for (id1, s1), (id2, s2) in zip(segments, segments[1:]):
                if s2.length() > 0:
                    print(f"|{id1}|/|{id2}| = {format(s1.length() / s2.length(), '.17g')}")
    from .core import HPoint, distance

    points = [
        (oid, e.value)
        for oid, e in scene.items()
        if e.exists and isinstance(e.value, HPoint) and not e.value.is_infinite
    ]
    if 2 <= len(points) <= 8:
        print("# distances")
        for i, (id1, p1) in enumerate(points):
            for id2, p2 in points[i + 1 :]:
                print(f"|{id1}{id2}| = {format(distance(p1, p2), '.17g')}")


def cmd_run(args) -> int:
    fig = _read_figure(args.file)
    if fig is None:
        return 1
    scene = evaluate(fig)
    if args.svg:
        Path(args.svg).write_text(render_svg(scene, fig))
        print(f"wrote {args.svg}")
    elif args.json:
        print(dumps_wire(scene_frame(fig, scene)))
    else:
        _print_scene_text(fig, scene)
    return 0 if scene.all_exist() else 2


def cmd_trace(args) -> int:
    fig = _read_figure(args.file)
    if fig is None:
        return 1
    fmt = args.format
    if fmt is None:
        fmt = "svg" if args.out.endswith(".svg") else "csv"
    try:
        if fmt == "csv":
            rows = trace_table(fig, args.mover, args.path, args.target, args.n)
            payload = trace_csv(rows)
        else:
            pl = trace_locus(fig, args.mover, args.path, args.target, args.n)
            scene = evaluate(fig)
            payload = render_svg(scene, fig, extra_polylines=[pl])
    except NoDependency as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GeometryError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.out == "-":
        sys.stdout.write(payload)
    else:
        Path(args.out).write_text(payload)
        print(f"wrote {args.out}")
    return 0


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites

    names = list(SUITES) if args.suite == "all" else [args.suite]
    try:
        results = run_suites(names, args.seed)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return 2
    all_ok = True
    for suite_name, checks in results:
        print(f"[{suite_name}]")
        for check in checks:
            print(f"  {check.line()}")
            all_ok = all_ok and check.passed
    print("all checks passed" if all_ok else "FAILURES present")
    return 0 if all_ok else 1


def cmd_serve(args) -> int:
    from .server import serve_forever

    return serve_forever(args.port, args.host)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="geo",
        description="Dynamic-geometry construction kernel: run scripts, trace loci, verify claims, serve UI sessions.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="evaluate a .geo construction and dump the scene")
    runp.add_argument("file")
    runp.add_argument("--json", action="store_true", help="dump the scene as a JSON frame")
    runp.add_argument("--svg", metavar="PATH", help="render the static figure as SVG instead")
    runp.set_defaults(func=cmd_run)

    tracep = sub.add_parser("trace", help="trace a locus to CSV or SVG")
    tracep.add_argument("file")
    tracep.add_argument("--mover", required=True, help="draggable point to sweep")
    tracep.add_argument("--path", required=True, help="curve object the mover sweeps")
    tracep.add_argument("--target", required=True, help="point whose locus is recorded")
    tracep.add_argument("--n", type=int, default=256, help="sample count (default 256)")
    tracep.add_argument("--out", required=True, help="output file (.csv or .svg), or - for stdout")
    tracep.add_argument("--format", choices=("csv", "svg"), help="override format inferred from --out")
    tracep.set_defaults(func=cmd_trace)

    verp = sub.add_parser("verify", help="run property suites against the kernel")
    verp.add_argument("suite", nargs="?", default="all", help="suite name or 'all'")
    verp.add_argument("--seed", type=int, default=None, help="RNG seed (default: GEO_SEED or built-in)")
    verp.set_defaults(func=cmd_verify)

    servep = sub.add_parser("serve", help="serve UI sessions over the JSON/WebSocket wire protocol")
    servep.add_argument("--port", type=int, default=8765)
    servep.add_argument("--host", default="127.0.0.1")
    servep.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "trace" and args.n < 2:
        print("error: --n must be at least 2", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
