"""Recursive and non-recursive wiring of modules.

A wiring is a plain ``{input: node}`` mapping. Wired inputs are replaced by
the named node in every local function (leaf renaming for expressions,
support renaming plus duplicate collapse for tables).
"""

from __future__ import annotations

import re
from typing import Mapping

from .core import Module, _rename, as_vector
from .errors import ParseError, WiringError

Wiring = Mapping[str, str]

_WIRE_RE = re.compile(r"^\s*(?:wire\s+)?([A-Za-z_][A-Za-z0-9_]*)\s*->\s*([A-Za-z_][A-Za-z0-9_]*)\s*$")


def parse_wire(text: str, line: int = 1) -> tuple[str, str]:
    """Parse ``wire alpha -> c`` (the ``wire`` keyword is optional)."""
    m = _WIRE_RE.match(text)
    if m is None:
        raise ParseError(f"malformed wire {text.strip()!r}", offset=0, line=line)
    return m.group(1), m.group(2)


def parse_wiring(text: str) -> dict[str, str]:
    """Parse a block of ``wire`` lines; ``#`` starts a comment."""
    wiring: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        src, dst = parse_wire(line, lineno)
        if src in wiring:
            raise ParseError(f"input {src!r} wired twice", offset=0, line=lineno)
        wiring[src] = dst
    return wiring


def format_wiring(w: Wiring) -> str:
    return "".join(f"wire {a} -> {s}\n" for a, s in w.items())


def _check(w: Wiring, inputs, nodes):
    for a, s in w.items():
        if a not in inputs:
            raise WiringError(f"wiring maps unknown input {a!r}")
        if s not in nodes:
            raise WiringError(f"wiring targets unknown node {s!r}")


def recursive_wire(m: Module, w: Wiring) -> Module:
    """Plug nodes of ``m`` into its own inputs."""
    _check(w, m.inputs, m.nodes)
    funcs = {s: _rename(f, w, m.q) for s, f in m.functions.items()}
    inputs = tuple(a for a in m.inputs if a not in w)
    return Module(m.nodes, inputs, funcs, m.q, m.name, m.output)


def is_total(m: Module, w: Wiring) -> bool:
    return set(w) == set(m.inputs)


def close(m: Module, w: Wiring) -> Module:
    """Wire every input of ``m``, yielding an automata network."""
    missing = [a for a in m.inputs if a not in w]
    if missing:
        raise WiringError(f"wiring is not total: unwired inputs {missing}")
    return recursive_wire(m, w)


def feedback(m: Module, w: Wiring, x) -> tuple[int, ...]:
    """Input configuration read off ``x`` through a total wiring."""
    x = as_vector(x, m.n, m.q)
    pos = {s: j for j, s in enumerate(m.nodes)}
    return tuple(x[pos[w[a]]] for a in m.inputs)


def nonrecursive_wire(m1: Module, m2: Module, w: Wiring) -> Module:
    """Plug nodes of ``m1`` into inputs of ``m2`` and take the union.

    Unwired inputs sharing a name across the two modules become one input.
    """
    if m1.q != m2.q:
        raise WiringError(f"alphabet sizes differ: {m1.q} and {m2.q}")
    _check(w, m2.inputs, m1.nodes)
    clash = set(m1.nodes) & set(m2.nodes)
    if clash:
        raise WiringError(f"node labels collide: {sorted(clash)}")
    remaining = [a for a in m2.inputs if a not in w]
    crossed = (set(m1.nodes) & set(remaining)) | (set(m2.nodes) & set(m1.inputs))
    if crossed:
        raise WiringError(f"node and input labels collide: {sorted(crossed)}")
    funcs = dict(m1.functions)
    for s, f in m2.functions.items():
        funcs[s] = _rename(f, w, m2.q)
    inputs = m1.inputs + tuple(a for a in remaining if a not in m1.inputs)
    return Module(m1.nodes + m2.nodes, inputs, funcs, m1.q)
