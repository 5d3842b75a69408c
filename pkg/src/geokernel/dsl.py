"""Parser and serializer for the `.geo` construction language.

Line-oriented, one statement per line, `#` comments, whitespace-free
grammar inside a line:

    file      := header? (stmt NEWLINE)*
    header    := "toolset" IDENT
    stmt      := decl | macrodef | macrocall
    decl      := TYPE IDENT "=" TOOL "(" args ")"
    TYPE      := point | line | segment | ray | circle | conic | scalar | locus
    args      := (IDENT | NUMBER | "branch=" ("0"|"1")) ("," args)?
    macrodef  := "macro" IDENT "(" params ")" "{" NEWLINE (decl NEWLINE)*
                 "return" idlist NEWLINE "}"
    macrocall := TYPE IDENT ("," TYPE IDENT)* "=" MACRO "(" args ")"
    NUMBER    := decimal literal | "sqrt(" NUMBER ")" | "pi" | "phi"

Numeric literals are folded to doubles at parse time; serialization
prints them with 17 significant digits, so parse(serialize(f)) is
structurally identical to f and a second serialize is byte-identical.
All errors in a file are reported in one pass with line-level recovery.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .engine import (
    BUILTIN_TOOLSETS,
    FULL,
    Figure,
    Macro,
    Step,
    TOOL_TABLE,
    kind_matches,
)

DECL_TYPES = ("point", "line", "segment", "ray", "circle", "conic", "scalar", "locus")
_RESERVED = set(DECL_TYPES) | {"toolset", "macro", "return", "branch", "sqrt", "pi", "phi"}

_TOKEN_RE = re.compile(
    r"""
    (?P<num>-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),={}\-])
  | (?P<ws>\s+)
  | (?P<bad>.)
""",
    re.VERBOSE,
)

_CONSTANTS = {"pi": math.pi, "phi": (1.0 + math.sqrt(5.0)) / 2.0}


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    expected: str
    found: str
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message} (expected {self.expected}, found {self.found!r})"


@dataclass
class ParseResult:
    figure: Optional[Figure]
    errors: list[ParseError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and self.figure is not None


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | ident | punct
    text: str
    column: int


class _LineSyntax(Exception):
    def __init__(self, err: ParseError):
        self.err = err


def _tokenize(lineno: int, text: str) -> list[_Tok]:
    out = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise _LineSyntax(
                ParseError(lineno, m.start() + 1, "token", m.group(), f"unexpected character {m.group()!r}")
            )
        out.append(_Tok(kind, m.group(), m.start() + 1))
    return out


class _Cursor:
    def __init__(self, lineno: int, toks: list[_Tok], length: int):
        self.lineno = lineno
        self.toks = toks
        self.i = 0
        self.length = length

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Optional[_Tok]:
        t = self.peek()
        if t is not None:
            self.i += 1
        return t

    def error(self, expected: str, message: Optional[str] = None) -> _LineSyntax:
        t = self.peek()
        found = t.text if t else "end of line"
        col = t.column if t else self.length + 1
        return _LineSyntax(ParseError(self.lineno, col, expected, found, message or f"expected {expected}"))

    def expect(self, expected_text: str) -> _Tok:
        t = self.peek()
        if t is None or t.text != expected_text:
            raise self.error(expected_text)
        return self.next()

    def expect_ident(self, what: str = "identifier") -> _Tok:
        t = self.peek()
        if t is None or t.kind != "ident":
            raise self.error(what)
        return self.next()

    def expect_end(self):
        if self.peek() is not None:
            raise self.error("end of line", "trailing input")


def _parse_number(cur: _Cursor) -> float:
    t = cur.peek()
    if t is None:
        raise cur.error("number")
    if t.kind == "punct" and t.text == "-":
        cur.next()
        return -_parse_number(cur)
    if t.kind == "num":
        cur.next()
        return float(t.text)
    if t.kind == "ident" and t.text in _CONSTANTS:
        cur.next()
        return _CONSTANTS[t.text]
    if t.kind == "ident" and t.text == "sqrt":
        cur.next()
        cur.expect("(")
        inner = _parse_number(cur)
        cur.expect(")")
        if inner < 0:
            raise _LineSyntax(
                ParseError(cur.lineno, t.column, "non-negative number", f"sqrt({inner})", "sqrt of a negative number")
            )
        return math.sqrt(inner)
    raise cur.error("number")


def _looks_like_number(cur: _Cursor) -> bool:
    t = cur.peek()
    return t is not None and (
        t.kind == "num"
        or (t.kind == "punct" and t.text == "-")
        or (t.kind == "ident" and t.text in ("sqrt", "pi", "phi"))
    )


@dataclass
class _Arg:
    column: int
    ident: Optional[str] = None
    number: Optional[float] = None
    is_branch: bool = False


def _parse_args(cur: _Cursor) -> list[_Arg]:
    cur.expect("(")
    args: list[_Arg] = []
    if cur.peek() is not None and cur.peek().text == ")":
        cur.next()
        return args
    while True:
        t = cur.peek()
        if t is None:
            raise cur.error("argument")
        if t.kind == "ident" and t.text == "branch":
            cur.next()
            cur.expect("=")
            v = cur.peek()
            if v is None or v.kind != "num" or v.text not in ("0", "1"):
                raise cur.error("branch value 0 or 1")
            cur.next()
            args.append(_Arg(t.column, number=float(v.text), is_branch=True))
        elif _looks_like_number(cur):
            col = t.column
            args.append(_Arg(col, number=_parse_number(cur)))
        elif t.kind == "ident":
            cur.next()
            args.append(_Arg(t.column, ident=t.text))
        else:
            raise cur.error("argument")
        nxt = cur.peek()
        if nxt is not None and nxt.text == ",":
            cur.next()
            continue
        cur.expect(")")
        return args


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.errors: list[ParseError] = []
        self.steps: list[Step] = []
        self.macros: dict[str, Macro] = {}
        self.macro_out_kinds: dict[str, tuple[str, ...]] = {}
        self.kinds: dict[str, str] = {}  # object id -> declared kind
        self.toolset = FULL
        self.saw_header = False

    def err(self, lineno: int, column: int, expected: str, found: str, message: str):
        self.errors.append(ParseError(lineno, column, expected, found, message))

    # -- statement dispatch --------------------------------------------------

    def parse(self) -> ParseResult:
        lines = self.src.splitlines()
        i = 0
        first_stmt = True
        while i < len(lines):
            lineno = i + 1
            stripped = self._strip(lines[i])
            if not stripped:
                i += 1
                continue
            try:
                toks = _tokenize(lineno, stripped)
            except _LineSyntax as e:
                self.errors.append(e.err)
                i += 1
                continue
            cur = _Cursor(lineno, toks, len(stripped))
            head = toks[0]
            try:
                if head.kind == "ident" and head.text == "toolset":
                    self._parse_header(cur, first=first_stmt)
                    first_stmt = False
                    i += 1
                elif head.kind == "ident" and head.text == "macro":
                    i = self._parse_macrodef(cur, lines, i)
                    first_stmt = False
                else:
                    self._parse_decl_or_call(cur)
                    first_stmt = False
                    i += 1
            except _LineSyntax as e:
                self.errors.append(e.err)
                i += 1
        figure = None
        if not self.errors:
            figure = Figure(tuple(self.steps), self.toolset, dict(self.macros))
        return ParseResult(figure, self.errors)

    @staticmethod
    def _strip(line: str) -> str:
        if "#" in line:
            line = line[: line.index("#")]
        return line.strip()

    def _parse_header(self, cur: _Cursor, first: bool):
        cur.expect("toolset")
        name_tok = cur.expect_ident("toolset name")
        cur.expect_end()
        if not first:
            raise _LineSyntax(
                ParseError(cur.lineno, 1, "statement", "toolset", "toolset header must be the first statement")
            )
        ts = BUILTIN_TOOLSETS.get(name_tok.text)
        if ts is None:
            raise _LineSyntax(
                ParseError(
                    cur.lineno,
                    name_tok.column,
                    "one of " + ", ".join(sorted(BUILTIN_TOOLSETS)),
                    name_tok.text,
                    f"unknown toolset {name_tok.text!r}",
                )
            )
        self.toolset = ts
        self.saw_header = True

    # -- declarations and macro calls ----------------------------------------

    def _parse_targets(self, cur: _Cursor) -> list[tuple[str, str, int]]:
        targets = []
        while True:
            t = cur.peek()
            if t is None or t.kind != "ident" or t.text not in DECL_TYPES:
                raise cur.error("type (" + "|".join(DECL_TYPES) + ")")
            cur.next()
            name_tok = cur.expect_ident("object name")
            self._check_fresh_name(cur.lineno, name_tok)
            targets.append((t.text, name_tok.text, name_tok.column))
            nxt = cur.peek()
            if nxt is not None and nxt.text == ",":
                cur.next()
                continue
            return targets

    def _check_fresh_name(self, lineno: int, tok: _Tok):
        if tok.text in _RESERVED:
            raise _LineSyntax(ParseError(lineno, tok.column, "object name", tok.text, f"{tok.text!r} is reserved"))
        if tok.text in self.kinds:
            raise _LineSyntax(
                ParseError(lineno, tok.column, "fresh name", tok.text, f"object {tok.text!r} already defined")
            )

    def _parse_decl_or_call(self, cur: _Cursor):
        targets = self._parse_targets(cur)
        cur.expect("=")
        tool_tok = cur.expect_ident("tool or macro name")
        args = _parse_args(cur)
        cur.expect_end()
        tool = tool_tok.text
        if tool in TOOL_TABLE:
            if len(targets) != 1:
                raise _LineSyntax(
                    ParseError(cur.lineno, targets[1][2], "single target", targets[1][1], "tools bind one object")
                )
            step = self._build_tool_step(cur.lineno, targets[0], tool_tok, args, self.kinds, allow_locus=True)
            self.steps.append(step)
            self.kinds[targets[0][1]] = targets[0][0]
        elif tool in self.macros:
            self._build_macro_call(cur.lineno, targets, tool_tok, args)
        else:
            raise _LineSyntax(
                ParseError(cur.lineno, tool_tok.column, "tool or macro name", tool, f"unknown tool {tool!r}")
            )

    def _build_tool_step(
        self,
        lineno: int,
        target: tuple[str, str, int],
        tool_tok: _Tok,
        args: list[_Arg],
        scope: dict[str, str],
        allow_locus: bool,
        step_id: Optional[str] = None,
    ) -> Step:
        decl_type, name, name_col = target
        tool = tool_tok.text
        spec = TOOL_TABLE[tool]
        if tool == "locus" and not allow_locus:
            raise _LineSyntax(ParseError(lineno, tool_tok.column, "tool", tool, "locus is not allowed here"))
        n_inputs = len(spec.input_kinds)
        if not (n_inputs + spec.min_params <= len(args) <= n_inputs + spec.max_params):
            raise _LineSyntax(
                ParseError(
                    lineno,
                    tool_tok.column,
                    f"{n_inputs + spec.min_params}..{n_inputs + spec.max_params} argument(s)",
                    str(len(args)),
                    f"wrong arity for {tool}",
                )
            )
        if not kind_matches(decl_type, spec.output) and decl_type != spec.output:
            raise _LineSyntax(
                ParseError(
                    lineno,
                    name_col,
                    spec.output,
                    decl_type,
                    f"{tool} yields a {spec.output}, declared as {decl_type}",
                )
            )
        inputs = []
        params = []
        for idx, arg in enumerate(args):
            if idx < n_inputs:
                if arg.ident is None:
                    raise _LineSyntax(
                        ParseError(lineno, arg.column, "object reference", str(arg.number), f"{tool} argument {idx + 1} must be an object")
                    )
                ref = arg.ident
                if ref not in scope:
                    raise _LineSyntax(
                        ParseError(lineno, arg.column, "defined identifier", ref, f"undefined identifier {ref!r}")
                    )
                kind = scope[ref]
                allowed = spec.input_kinds[idx]
                if kind != "?" and not any(kind_matches(k, kind) for k in allowed):
                    raise _LineSyntax(
                        ParseError(
                            lineno,
                            arg.column,
                            "|".join(sorted(allowed)),
                            kind,
                            f"{tool} argument {idx + 1} must be {'/'.join(sorted(allowed))}, {ref} is a {kind}",
                        )
                    )
                inputs.append(ref)
            else:
                if arg.is_branch and tool != "intersect":
                    raise _LineSyntax(
                        ParseError(lineno, arg.column, "number", "branch=", "branch= is only valid for intersect")
                    )
                if arg.number is not None:
                    params.append(arg.number)
                elif arg.ident is not None and scope.get(arg.ident) == "scalar":
                    params.append(arg.ident)
                else:
                    raise _LineSyntax(
                        ParseError(
                            lineno,
                            arg.column,
                            "number or scalar",
                            arg.ident or "",
                            f"{tool} parameter {idx + 1} must be numeric",
                        )
                    )
        if len(inputs) != n_inputs or not (spec.min_params <= len(params) <= spec.max_params):
            raise _LineSyntax(
                ParseError(
                    lineno,
                    tool_tok.column,
                    f"{n_inputs} object argument(s) and {spec.min_params}..{spec.max_params} number(s)",
                    f"{len(inputs)} and {len(params)}",
                    f"wrong arity for {tool}",
                )
            )
        return Step(step_id or name, tool, tuple(inputs), tuple(params))

    def _build_macro_call(self, lineno: int, targets, tool_tok: _Tok, args: list[_Arg]):
        macro = self.macros[tool_tok.text]
        out_kinds = self.macro_out_kinds[tool_tok.text]
        if len(targets) != len(macro.outputs):
            raise _LineSyntax(
                ParseError(
                    lineno,
                    tool_tok.column,
                    f"{len(macro.outputs)} target(s)",
                    str(len(targets)),
                    f"macro {macro.name} returns {len(macro.outputs)} object(s)",
                )
            )
        for (decl_type, name, col), kind in zip(targets, out_kinds):
            if not kind_matches(decl_type, kind) and decl_type != kind:
                raise _LineSyntax(
                    ParseError(lineno, col, kind, decl_type, f"macro output is a {kind}, declared as {decl_type}")
                )
        inputs = []
        params = []
        formals = list(macro.inputs)
        if len(args) != len(formals):
            raise _LineSyntax(
                ParseError(
                    lineno,
                    tool_tok.column,
                    f"{len(formals)} argument(s)",
                    str(len(args)),
                    f"wrong arity for macro {macro.name}",
                )
            )
        for arg, (fname, fkind) in zip(args, formals):
            if fkind == "scalar":
                if arg.number is not None:
                    params.append(arg.number)
                elif arg.ident is not None and self.kinds.get(arg.ident) == "scalar":
                    params.append(arg.ident)
                else:
                    raise _LineSyntax(
                        ParseError(lineno, arg.column, "number or scalar", arg.ident or "", f"macro parameter {fname} is scalar")
                    )
            else:
                if arg.ident is None:
                    raise _LineSyntax(
                        ParseError(lineno, arg.column, "object reference", str(arg.number), f"macro parameter {fname} is a {fkind}")
                    )
                if arg.ident not in self.kinds:
                    raise _LineSyntax(
                        ParseError(lineno, arg.column, "defined identifier", arg.ident, f"undefined identifier {arg.ident!r}")
                    )
                kind = self.kinds[arg.ident]
                if kind != "?" and not kind_matches(fkind, kind):
                    raise _LineSyntax(
                        ParseError(lineno, arg.column, fkind, kind, f"macro parameter {fname} must be a {fkind}")
                    )
                inputs.append(arg.ident)
        names = tuple(name for _, name, _ in targets)
        step = Step(names[0], macro.name, tuple(inputs), tuple(params), names if len(names) > 1 else ())
        self.steps.append(step)
        for decl_type, name, _ in targets:
            self.kinds[name] = decl_type

    # -- macro definitions ----------------------------------------------------

    def _parse_macrodef(self, cur: _Cursor, lines: list[str], i: int) -> int:
        cur.expect("macro")
        name_tok = cur.expect_ident("macro name")
        if name_tok.text in TOOL_TABLE or name_tok.text in self.macros or name_tok.text in _RESERVED:
            self.err(cur.lineno, name_tok.column, "fresh macro name", name_tok.text, f"name {name_tok.text!r} already in use")
        cur.expect("(")
        formals: list[tuple[str, str]] = []
        local_kinds: dict[str, str] = {}
        t = cur.peek()
        if t is not None and t.text != ")":
            while True:
                ty = cur.peek()
                if ty is None or ty.kind != "ident" or ty.text not in DECL_TYPES:
                    raise cur.error("formal type")
                cur.next()
                fname = cur.expect_ident("formal name")
                if fname.text in local_kinds:
                    raise _LineSyntax(
                        ParseError(cur.lineno, fname.column, "fresh formal", fname.text, "duplicate formal")
                    )
                formals.append((fname.text, ty.text))
                local_kinds[fname.text] = ty.text
                nxt = cur.peek()
                if nxt is not None and nxt.text == ",":
                    cur.next()
                    continue
                break
        cur.expect(")")
        cur.expect("{")
        cur.expect_end()
        body: list[Step] = []
        outputs: list[str] = []
        j = i + 1
        closed = False
        while j < len(lines):
            lineno = j + 1
            stripped = self._strip(lines[j])
            if not stripped:
                j += 1
                continue
            try:
                toks = _tokenize(lineno, stripped)
            except _LineSyntax as e:
                self.errors.append(e.err)
                j += 1
                continue
            bcur = _Cursor(lineno, toks, len(stripped))
            head = toks[0]
            if head.text == "}":
                bcur.next()
                try:
                    bcur.expect_end()
                except _LineSyntax as e:
                    self.errors.append(e.err)
                closed = True
                j += 1
                break
            if head.text == "return":
                bcur.next()
                try:
                    while True:
                        out_tok = bcur.expect_ident("output name")
                        if out_tok.text not in local_kinds:
                            raise _LineSyntax(
                                ParseError(lineno, out_tok.column, "body object", out_tok.text, f"undefined output {out_tok.text!r}")
                            )
                        outputs.append(out_tok.text)
                        nxt = bcur.peek()
                        if nxt is not None and nxt.text == ",":
                            bcur.next()
                            continue
                        bcur.expect_end()
                        break
                except _LineSyntax as e:
                    self.errors.append(e.err)
                j += 1
                continue
            # a body declaration
            try:
                ty = bcur.peek()
                if ty is None or ty.kind != "ident" or ty.text not in DECL_TYPES:
                    raise bcur.error("type or 'return' or '}'")
                bcur.next()
                bname = bcur.expect_ident("object name")
                if bname.text in local_kinds or bname.text in _RESERVED:
                    raise _LineSyntax(
                        ParseError(lineno, bname.column, "fresh name", bname.text, f"{bname.text!r} already defined")
                    )
                bcur.expect("=")
                btool = bcur.expect_ident("tool name")
                bargs = _parse_args(bcur)
                bcur.expect_end()
                if btool.text in TOOL_TABLE:
                    step = self._build_tool_step(
                        lineno, (ty.text, bname.text, bname.column), btool, bargs, local_kinds, allow_locus=False
                    )
                    body.append(step)
                elif btool.text in self.macros:
                    # nested single-output macro call inside a body
                    inner = self.macros[btool.text]
                    if len(inner.outputs) != 1:
                        raise _LineSyntax(
                            ParseError(lineno, btool.column, "single-output macro", btool.text, "multi-output macro calls are not allowed in bodies")
                        )
                    inputs, params = [], []
                    if len(bargs) != len(inner.inputs):
                        raise _LineSyntax(
                            ParseError(lineno, btool.column, f"{len(inner.inputs)} argument(s)", str(len(bargs)), f"wrong arity for macro {btool.text}")
                        )
                    for arg, (fname2, fkind2) in zip(bargs, inner.inputs):
                        if fkind2 == "scalar":
                            if arg.number is not None:
                                params.append(arg.number)
                            elif arg.ident is not None and local_kinds.get(arg.ident) == "scalar":
                                params.append(arg.ident)
                            else:
                                raise _LineSyntax(ParseError(lineno, arg.column, "number or scalar", arg.ident or "", "scalar formal"))
                        else:
                            if arg.ident is None or arg.ident not in local_kinds:
                                raise _LineSyntax(
                                    ParseError(lineno, arg.column, "defined identifier", str(arg.ident or arg.number), f"undefined identifier")
                                )
                            inputs.append(arg.ident)
                    body.append(Step(bname.text, btool.text, tuple(inputs), tuple(params)))
                else:
                    raise _LineSyntax(
                        ParseError(lineno, btool.column, "tool name", btool.text, f"unknown tool {btool.text!r}")
                    )
                local_kinds[bname.text] = ty.text
            except _LineSyntax as e:
                self.errors.append(e.err)
            j += 1
        if not closed:
            self.err(len(lines), 1, "}", "end of file", f"macro {name_tok.text!r} is never closed")
        if not outputs:
            self.err(cur.lineno, name_tok.column, "return statement", "none", f"macro {name_tok.text!r} returns nothing")
        if not body:
            self.err(cur.lineno, name_tok.column, "body declarations", "none", f"macro {name_tok.text!r} has an empty body")
        if name_tok.text not in TOOL_TABLE and name_tok.text not in self.macros and outputs and body:
            self.macros[name_tok.text] = Macro(name_tok.text, tuple(formals), tuple(body), tuple(outputs))
            self.macro_out_kinds[name_tok.text] = tuple(local_kinds[o] for o in outputs)
        return j


def parse(src: str) -> ParseResult:
    """Parse a `.geo` source into a Figure, collecting all errors."""
    return _Parser(src).parse()


def parse_strict(src: str) -> Figure:
    res = parse(src)
    if not res.ok:
        raise ValueError("parse errors:\n" + "\n".join(str(e) for e in res.errors))
    return res.figure


# ---------------------------------------------------------------------------
# serialization


def _fmt_num(x) -> str:
    return x if isinstance(x, str) else format(x, ".17g")


def _step_args(step: Step) -> str:
    parts = list(step.inputs)
    if step.tool == "intersect" and step.params:
        parts.append(f"branch={int(step.params[0])}")
    else:
        parts.extend(_fmt_num(p) for p in step.params)
    return ", ".join(parts)


def _macro_call_args(fig: Figure, step: Step) -> str:
    """Arguments of a macro call, interleaved back into formal order."""
    macro = fig.macros[step.tool]
    parts = []
    ii = pi = 0
    for _fname, fkind in macro.inputs:
        if fkind == "scalar":
            parts.append(_fmt_num(step.params[pi]))
            pi += 1
        else:
            parts.append(step.inputs[ii])
            ii += 1
    return ", ".join(parts)


def _macro_order(fig: Figure) -> list[Macro]:
    """Macros in dependency order (used ones before users)."""
    order: list[Macro] = []
    seen: set[str] = set()

    def visit(name: str):
        if name in seen or name not in fig.macros:
            return
        seen.add(name)
        macro = fig.macros[name]
        for bstep in macro.body:
            if bstep.tool in fig.macros:
                visit(bstep.tool)
        order.append(macro)

    for name in fig.macros:
        visit(name)
    return order


def _output_kinds(fig: Figure, macro: Macro) -> list[str]:
    kinds = {f: k for f, k in macro.inputs}
    for bstep in macro.body:
        if bstep.tool in TOOL_TABLE:
            kinds[bstep.id] = TOOL_TABLE[bstep.tool].output
        else:
            inner = fig.macros[bstep.tool]
            kinds[bstep.id] = _output_kinds(fig, inner)[0]
    return [kinds[o] for o in macro.outputs]


def serialize(fig: Figure) -> str:
    """Render a Figure as `.geo` text; inverse of parse up to formatting."""
    lines = [f"toolset {fig.toolset.name}"]
    for macro in _macro_order(fig):
        formals = ", ".join(f"{k} {n}" for n, k in macro.inputs)
        lines.append(f"macro {macro.name}({formals}) {{")
        kinds = {f: k for f, k in macro.inputs}
        for bstep in macro.body:
            if bstep.tool in TOOL_TABLE:
                out_kind = TOOL_TABLE[bstep.tool].output
            else:
                out_kind = _output_kinds(fig, fig.macros[bstep.tool])[0]
            kinds[bstep.id] = out_kind
            lines.append(f"  {out_kind} {bstep.id} = {bstep.tool}({_step_args(bstep)})")
        lines.append(f"  return {', '.join(macro.outputs)}")
        lines.append("}")
    for step in fig.steps:
        if step.tool in TOOL_TABLE:
            decl = TOOL_TABLE[step.tool].output
            lines.append(f"{decl} {step.id} = {step.tool}({_step_args(step)})")
        else:
            macro = fig.macros[step.tool]
            kinds = _output_kinds(fig, macro)
            targets = ", ".join(f"{k} {n}" for k, n in zip(kinds, step.all_outputs()))
            lines.append(f"{targets} = {step.tool}({_macro_call_args(fig, step)})")
    return "\n".join(lines) + "\n"
