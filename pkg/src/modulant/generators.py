"""Seeded random instances for property suites."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import expr as E
from .core import Module, TableFunction
from .output import OutputFunction, minimize_delay
from .errors import ValidationError


def rng_for(seed) -> np.random.Generator:
    if seed is None:
        raise ValidationError("a seed is required")
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_table(rng, support: Sequence[str], q: int = 2) -> TableFunction:
    return TableFunction(tuple(support), tuple(rng.integers(0, q, q ** len(support)).tolist()))


def random_expression(rng, labels: Sequence[str], depth: int = 3) -> E.Expression:
    labels = list(labels)
    if depth <= 0 or not labels or rng.random() < 0.25:
        if not labels or rng.random() < 0.1:
            return E.Const(int(rng.integers(0, 2)))
        leaf = E.Ref(labels[int(rng.integers(len(labels)))])
        return E.Not(leaf) if rng.random() < 0.4 else leaf
    if rng.random() < 0.15:
        return E.Not(random_expression(rng, labels, depth - 1))
    op = E.BINARY_OPS[int(rng.integers(len(E.BINARY_OPS)))]
    return E.BinOp(op, random_expression(rng, labels, depth - 1),
                   random_expression(rng, labels, depth - 1))


def random_acyclic_module(seed, n: int, k: int, q: int = 2, max_fanin: int = 3,
                          expressions: float = 0.5, name: str | None = None) -> Module:
    """Acyclic module: nodes read inputs and strictly earlier nodes of a
    hidden order; declaration order is shuffled."""
    rng = rng_for(seed)
    nodes = [f"x{j}" for j in range(n)]
    inputs = [f"i{j}" for j in range(k)]
    functions = {}
    for j, s in enumerate(nodes):
        pool = inputs + nodes[:j]
        size = int(rng.integers(1, min(max_fanin, len(pool)) + 1)) if pool else 0
        support = [pool[p] for p in sorted(rng.choice(len(pool), size, replace=False))] if size else []
        if q == 2 and rng.random() < expressions:
            functions[s] = random_expression(rng, support, 3)
        else:
            functions[s] = random_table(rng, support, q)
    order = [nodes[p] for p in rng.permutation(n)]
    return Module.build({s: functions[s] for s in order}, inputs=inputs, q=q, name=name)


def random_network(seed, n: int, q: int = 2, max_fanin: int = 3) -> Module:
    """Arbitrary (possibly cyclic) automata network."""
    rng = rng_for(seed)
    nodes = [f"x{j}" for j in range(n)]
    functions = {}
    for s in nodes:
        size = int(rng.integers(0, min(max_fanin, n) + 1))
        support = [nodes[p] for p in sorted(rng.choice(n, size, replace=False))]
        functions[s] = random_table(rng, support, q)
    return Module.build(functions, q=q)


def random_wiring(seed, m: Module) -> dict[str, str]:
    rng = rng_for(seed)
    if not m.nodes:
        raise ValidationError("cannot wire a module without nodes")
    return {a: m.nodes[int(rng.integers(m.n))] for a in m.inputs}


def random_one_to_one(seed, n: int, q: int = 2) -> Module:
    """Single-input acyclic module with a designated output node."""
    rng = rng_for(seed)
    m = random_acyclic_module(rng, n, 1, q)
    return m.replace(output=m.nodes[int(rng.integers(n))])


def random_output_function(seed, inputs: Sequence[str], delay: int, q: int = 2) -> OutputFunction:
    """Random table whose minimal delay is exactly ``delay``."""
    rng = rng_for(seed)
    size = q ** (len(inputs) * delay)
    while True:
        o = minimize_delay(OutputFunction(tuple(inputs), delay, rng.integers(0, q, size), q))
        if o.delay == delay:
            return o


def random_formula(seed, variables: Sequence[str], depth: int = 3) -> E.Expression:
    return random_expression(rng_for(seed), variables, depth)
