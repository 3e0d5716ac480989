"""Text formats: module files, output-table files.

Module file::

    alphabet 2
    module M
    inputs alpha beta gamma
    node a = alpha
    node b = a | beta | !alpha
    node c = table(a, b) [0,0,1,0]
    output c
    wire alpha -> c       # optional wiring lines

Output-table file::

    alphabet 2
    inputs alpha
    delay 3
    table 40              # hex for q = 2 (entry i = bit i), digits otherwise
    # or: expr alpha@2 & alpha@3
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from . import expr as E
from .core import ExprFunction, Module, TableFunction
from .errors import ModulantError, ParseError
from .output import OutputFunction
from .wiring import format_wiring, parse_wire

_LABEL = r"[A-Za-z_][A-Za-z0-9_]*"
_NODE_RE = re.compile(rf"^node\s+({_LABEL})\s*=\s*")
_TABLE_RE = re.compile(rf"^table\s*\(\s*((?:{_LABEL}\s*(?:,\s*{_LABEL}\s*)*)?)\)\s*\[([^\]]*)\]\s*$")


@dataclass(frozen=True, eq=False)
class ModuleFile:
    module: Module
    wiring: dict[str, str] = field(default_factory=dict)


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _parse_table(body: str, lineno: int, col: int) -> TableFunction:
    m = _TABLE_RE.match(body)
    if m is None:
        raise ParseError("malformed table; expected table(a, b) [0,1,...]", line=lineno, column=col)
    support = tuple(s.strip() for s in m.group(1).split(",") if s.strip())
    entries = [t.strip() for t in m.group(2).split(",") if t.strip()]
    try:
        values = tuple(int(t) for t in entries)
    except ValueError:
        raise ParseError("table entries must be integers", line=lineno, column=col) from None
    return TableFunction(support, values)


def _parse_function(body: str, lineno: int, col: int):
    if body.startswith("table"):
        return _parse_table(body, lineno, col)
    try:
        return ExprFunction(E.parse_expression(body))
    except ParseError as err:
        raise ParseError(err.message, line=lineno, column=col + err.offset) from None


def parse_module(text: str) -> ModuleFile:
    q = 2
    name = None
    inputs: list[str] = []
    functions: dict[str, object] = {}
    output = None
    wiring: dict[str, str] = {}
    seen_inputs = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        body = line.lstrip()
        indent = len(line) - len(body)
        if not body:
            continue
        keyword = body.split(None, 1)[0]
        rest = body[len(keyword):].strip()
        if keyword == "alphabet":
            if not rest.isdigit() or int(rest) < 2:
                raise ParseError("alphabet size must be an integer >= 2", line=lineno, column=indent + 1)
            q = int(rest)
        elif keyword == "module":
            if not re.fullmatch(_LABEL, rest):
                raise ParseError("malformed module name", line=lineno, column=indent + 1)
            name = rest
        elif keyword == "inputs":
            if seen_inputs:
                raise ParseError("inputs declared twice", line=lineno, column=indent + 1)
            seen_inputs = True
            inputs = rest.replace(",", " ").split()
            bad = [a for a in inputs if not re.fullmatch(_LABEL, a)]
            if bad:
                raise ParseError(f"malformed input label {bad[0]!r}", line=lineno, column=indent + 1)
        elif keyword == "node":
            m = _NODE_RE.match(body)
            if m is None:
                raise ParseError("malformed node line; expected node <label> = <function>",
                                 line=lineno, column=indent + 1)
            label = m.group(1)
            if label in functions:
                raise ParseError(f"node {label!r} declared twice", line=lineno, column=indent + 1)
            functions[label] = _parse_function(body[m.end():], lineno, indent + m.end() + 1)
        elif keyword == "output":
            if not re.fullmatch(_LABEL, rest):
                raise ParseError("malformed output line", line=lineno, column=indent + 1)
            output = rest
        elif keyword == "wire":
            src, dst = parse_wire(body, lineno)
            if src in wiring:
                raise ParseError(f"input {src!r} wired twice", line=lineno, column=indent + 1)
            wiring[src] = dst
        else:
            raise ParseError(f"unknown keyword {keyword!r}", line=lineno, column=indent + 1)
    if not functions and not seen_inputs and name is None:
        raise ParseError("empty module file", line=1, column=1)
    module = Module.build(functions, inputs=inputs, q=q, name=name, output=output)
    return ModuleFile(module, wiring)


def format_module(m: Module, wiring=None) -> str:
    lines = [f"alphabet {m.q}"]
    if m.name:
        lines.append(f"module {m.name}")
    if m.inputs:
        lines.append("inputs " + " ".join(m.inputs))
    for s in m.nodes:
        lines.append(f"node {s} = {m.functions[s].to_text()}")
    if m.output is not None:
        lines.append(f"output {m.output}")
    text = "\n".join(lines) + "\n"
    if wiring:
        text += format_wiring(wiring)
    return text


def load_module(path) -> ModuleFile:
    return parse_module(Path(path).read_text(encoding="utf-8"))


def parse_output_table(text: str) -> OutputFunction:
    fields: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = _strip(raw).strip()
        if not body:
            continue
        keyword, _, rest = body.partition(" ")
        if keyword not in ("alphabet", "inputs", "delay", "table", "expr"):
            raise ParseError(f"unknown keyword {keyword!r}", line=lineno)
        if keyword in fields:
            raise ParseError(f"{keyword} given twice", line=lineno)
        fields[keyword] = (rest.strip(), lineno)
    if "inputs" not in fields:
        raise ParseError("output table needs an inputs line", line=1)
    if ("table" in fields) == ("expr" in fields):
        raise ParseError("output table needs exactly one of table or expr", line=1)
    q = int(fields["alphabet"][0]) if "alphabet" in fields else 2
    inputs = fields["inputs"][0].replace(",", " ").split()
    delay = int(fields["delay"][0]) if "delay" in fields else None
    if "expr" in fields:
        text, lineno = fields["expr"]
        try:
            e = E.parse_expression(text, ages=True)
        except ParseError as err:
            raise ParseError(err.message, line=lineno, column=err.column) from None
        return OutputFunction.from_expression(e, inputs, delay, q, minimal=False)
    if delay is None:
        raise ParseError("a table needs a delay line", line=1)
    text, lineno = fields["table"]
    try:
        return OutputFunction.from_hex(text, inputs, delay, q)
    except ValueError as err:
        if isinstance(err, ModulantError):
            raise
        raise ParseError(f"malformed table {text!r}", line=lineno) from None


def format_output_table(o: OutputFunction) -> str:
    return (f"alphabet {o.q}\ninputs {' '.join(o.inputs)}\ndelay {o.delay}\n"
            f"table {o.hex()}\n")


def load_output_table(path) -> OutputFunction:
    return parse_output_table(Path(path).read_text(encoding="utf-8"))
