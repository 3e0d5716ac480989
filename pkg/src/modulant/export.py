"""DOT and JSON renderings."""

from __future__ import annotations

import json
from importlib import resources
from typing import Iterable

from .core import Module, interaction_digraph
from .dynamics import MATERIALIZE_CAP, Attractor, DynamicsGraph

SCHEMA_ID = "modulant/1"


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def interaction_dot(m: Module, mode: str | None = None) -> str:
    g = interaction_digraph(m, mode)
    lines = [f"digraph {_quote(m.name or 'module')} {{", f"  // mode: {g.mode}"]
    for s in m.nodes:
        lines.append(f"  {_quote(s)} [shape=circle];")
    for a in m.inputs:
        lines.append(f"  {_quote(a)} [shape=plaintext];")
    for u, s in g.sorted_arcs():
        lines.append(f"  {_quote(u)} -> {_quote(s)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dynamics_dot(an: Module, attractors: Iterable[Attractor] = (), cap: int = MATERIALIZE_CAP) -> str:
    """Transition digraph; configurations and arcs on attractors are bold."""
    edges = DynamicsGraph(an).edges(cap)
    on_cycle = {s for a in attractors for s in a.strings()}
    lines = [f"digraph {_quote((an.name or 'network') + '_dynamics')} {{"]
    for src, _ in edges:
        style = ' [style=bold, peripheries=2]' if src in on_cycle else ""
        lines.append(f"  {_quote(src)}{style};")
    for src, dst in edges:
        style = " [style=bold]" if src in on_cycle else ""
        lines.append(f"  {_quote(src)} -> {_quote(dst)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def attractor_json(a: Attractor) -> dict:
    return {"size": a.size, "configs": a.strings()}


def report(command: str, payload: dict) -> dict:
    return {"schema": SCHEMA_ID, "command": command, **payload}


def dumps(obj: dict) -> str:
    """Canonical JSON: byte-identical for identical reports."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_schema() -> dict:
    text = resources.files(__package__).joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)

