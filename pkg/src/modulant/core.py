"""Modules, automata networks and their parallel update.

A module has nodes ``S`` (with state) and inputs ``I`` (without state); each
node carries a local function of the joint assignment over ``S ∪ I``. A
module with no inputs is an automata network.

Configurations are tuples of ints in node declaration order. Bulk
enumeration goes through :class:`Kernel`, which stores configurations one
byte per node in numpy arrays and steps whole batches at once.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import expr as E
from .errors import CapExceeded, EvaluationError, NotAcyclicError, ValidationError

SEMANTIC = "semantic"
SYNTACTIC = "syntactic"
MODES = (SEMANTIC, SYNTACTIC)

Configuration = tuple[int, ...]
InputSequence = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------- local functions

@dataclass(frozen=True)
class ExprFunction:
    """A local function written as a propositional expression."""

    expr: E.Expression

    @cached_property
    def support(self) -> tuple[str, ...]:
        return tuple(E.ordered_support(self.expr))

    @cached_property
    def _compiled(self):
        return E.compile_expression(self.expr)

    def evaluate(self, env: Mapping[str, int], q: int = 2) -> int:
        return E.evaluate(self.expr, env, q)

    def evaluate_columns(self, env: Mapping[str, np.ndarray]) -> np.ndarray:
        return self._compiled(env)

    def tabulate(self, labels: Sequence[str], q: int = 2) -> np.ndarray:
        return E.truth_table(self.expr, list(labels), q)

    def semantic_support(self, q: int = 2, cap: int = E.SEMANTIC_CAP) -> set[str]:
        return E.semantic_support(self.expr, q, cap=cap)

    def rename(self, mapping: Mapping[str, str]) -> "ExprFunction":
        return ExprFunction(E.rename(self.expr, mapping))

    def to_text(self) -> str:
        return E.to_text(self.expr)


@dataclass(frozen=True)
class TableFunction:
    """A lookup-table local function over an ordered support list.

    ``table`` is row-major with the last support label varying fastest.
    """

    support: tuple[str, ...]
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if len(set(self.support)) != len(self.support):
            raise ValidationError(f"duplicate labels in table support {self.support}")

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.uint8)

    def check(self, q: int) -> None:
        expected = q ** len(self.support)
        if len(self.table) != expected:
            raise ValidationError(
                f"table over {len(self.support)} labels needs {expected} entries, got {len(self.table)}"
            )
        if any(not 0 <= v < q for v in self.table):
            raise ValidationError(f"table entries must lie in 0..{q - 1}")

    def _index(self, values: Sequence[int], q: int) -> int:
        idx = 0
        for v in values:
            idx = idx * q + v
        return idx

    def evaluate(self, env: Mapping[str, int], q: int = 2) -> int:
        values = []
        for label in self.support:
            try:
                v = env[label]
            except KeyError:
                raise EvaluationError(f"unbound label {label!r}") from None
            if not 0 <= v < q:
                raise EvaluationError(f"state {v} of {label!r} outside alphabet 0..{q - 1}")
            values.append(v)
        return self.table[self._index(values, q)]

    def evaluate_columns(self, env: Mapping[str, np.ndarray], q: int = 2) -> np.ndarray:
        idx = 0
        for label in self.support:
            idx = idx * q + np.asarray(env[label], dtype=np.int64)
        return self.array[idx]

    def tabulate(self, labels: Sequence[str], q: int = 2) -> np.ndarray:
        """Re-express the table over ``labels`` (absent support labels read 0)."""
        labels = list(labels)
        n = len(labels)
        if n > E.SEMANTIC_CAP:
            raise CapExceeded(f"table over {n} labels exceeds cap of {E.SEMANTIC_CAP}")
        grid = np.arange(q ** n, dtype=np.int64)
        pos = {label: j for j, label in enumerate(labels)}
        idx = np.zeros(q ** n, dtype=np.int64)
        for label in self.support:
            if label in pos:
                digit = (grid // q ** (n - 1 - pos[label])) % q
            else:
                digit = 0
            idx = idx * q + digit
        return self.array[idx]

    def semantic_support(self, q: int = 2, cap: int = E.SEMANTIC_CAP) -> set[str]:
        if len(self.support) > cap:
            raise CapExceeded(f"support of {len(self.support)} labels exceeds enumeration cap of {cap}")
        return {self.support[j] for j in E.table_support(self.array, q, len(self.support))}

    def rename(self, mapping: Mapping[str, str], q: int = 2) -> "TableFunction":
        """Rename support labels, merging labels that collapse onto one."""
        mapped = [mapping.get(label, label) for label in self.support]
        unique = list(dict.fromkeys(mapped))
        if len(unique) == len(mapped):
            return TableFunction(tuple(mapped), self.table)
        n = len(unique)
        grid = np.arange(q ** n, dtype=np.int64)
        pos = {label: j for j, label in enumerate(unique)}
        idx = np.zeros(q ** n, dtype=np.int64)
        for label in mapped:
            idx = idx * q + (grid // q ** (n - 1 - pos[label])) % q
        return TableFunction(tuple(unique), tuple(self.array[idx].tolist()))

    def to_text(self) -> str:
        entries = ",".join(str(v) for v in self.table)
        return f"table({', '.join(self.support)}) [{entries}]"


LocalFunction = Union[ExprFunction, TableFunction]


def as_local_function(f) -> LocalFunction:
    if isinstance(f, (ExprFunction, TableFunction)):
        return f
    if isinstance(f, str):
        return ExprFunction(E.parse_expression(f))
    if isinstance(f, (E.Const, E.Ref, E.Not, E.BinOp)):
        return ExprFunction(f)
    raise TypeError(f"cannot interpret {f!r} as a local function")


# ---------------------------------------------------------------- modules

@dataclass(frozen=True, eq=False)
class Module:
    """Nodes, inputs and one local function per node, over ``0..q-1``."""

    nodes: tuple[str, ...]
    inputs: tuple[str, ...]
    functions: Mapping[str, LocalFunction]
    q: int = 2
    name: str | None = None
    output: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        funcs = {s: as_local_function(self.functions[s]) for s in self.nodes if s in self.functions}
        object.__setattr__(self, "functions", MappingProxyType(funcs))
        self._validate()

    def _validate(self):
        if self.q < 2:
            raise ValidationError(f"alphabet size must be at least 2, got {self.q}")
        labels = self.nodes + self.inputs
        if len(set(labels)) != len(labels):
            dup = sorted({l for l in labels if labels.count(l) > 1})
            raise ValidationError(f"labels must be unique across nodes and inputs: {dup}")
        missing = [s for s in self.nodes if s not in self.functions]
        if missing:
            raise ValidationError(f"nodes without local function: {missing}")
        known = set(labels)
        for s, f in self.functions.items():
            unknown = [l for l in f.support if l not in known]
            if unknown:
                raise ValidationError(f"local function of {s!r} references unknown labels {unknown}")
            if isinstance(f, TableFunction):
                f.check(self.q)
            else:
                if self.q != 2 and E.has_operators(f.expr):
                    raise ValidationError(
                        f"node {s!r}: expressions over an alphabet of size {self.q} "
                        "must be a single constant or reference; use a table"
                    )
                if E.max_constant(f.expr) >= self.q:
                    raise ValidationError(f"node {s!r}: constant outside alphabet 0..{self.q - 1}")
        if self.output is not None and self.output not in self.nodes:
            raise ValidationError(f"designated output {self.output!r} is not a node")

    @classmethod
    def build(cls, functions: Mapping[str, object], inputs: Iterable[str] = (), q: int = 2,
              name: str | None = None, output: str | None = None) -> "Module":
        """Construct a module from ``{node: function}`` in declaration order.

        Functions may be expression text, expression trees or local
        function objects.
        """
        return cls(tuple(functions), tuple(inputs), dict(functions), q, name, output)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def k(self) -> int:
        return len(self.inputs)

    @property
    def is_network(self) -> bool:
        return not self.inputs

    def function(self, s: str) -> LocalFunction:
        return self.functions[s]

    def replace(self, **changes) -> "Module":
        fields = dict(nodes=self.nodes, inputs=self.inputs, functions=dict(self.functions),
                      q=self.q, name=self.name, output=self.output)
        fields.update(changes)
        return Module(**fields)

    def relabel(self, mapping: Mapping[str, str]) -> "Module":
        """Apply a label bijection to nodes and inputs."""
        labels = self.nodes + self.inputs
        full = {l: mapping.get(l, l) for l in labels}
        if len(set(full.values())) != len(labels):
            raise ValidationError("relabeling must be injective on the module's labels")
        funcs = {full[s]: _rename(f, full, self.q) for s, f in self.functions.items()}
        return Module(
            tuple(full[s] for s in self.nodes),
            tuple(full[a] for a in self.inputs),
            funcs,
            self.q,
            self.name,
            None if self.output is None else full[self.output],
        )

    def __eq__(self, other):
        if not isinstance(other, Module):
            return NotImplemented
        return (self.nodes, self.inputs, self.q, self.output, dict(self.functions)) == (
            other.nodes, other.inputs, other.q, other.output, dict(other.functions))

    __hash__ = None

    def __repr__(self):
        name = f" {self.name}" if self.name else ""
        return f"<Module{name} nodes={list(self.nodes)} inputs={list(self.inputs)} q={self.q}>"


def _rename(f: LocalFunction, mapping: Mapping[str, str], q: int) -> LocalFunction:
    if isinstance(f, TableFunction):
        return f.rename(mapping, q)
    return f.rename(mapping)


# ---------------------------------------------------------------- configurations

def as_vector(x, length: int, q: int, what: str = "configuration") -> tuple[int, ...]:
    """Coerce a digit string or int sequence to a validated tuple."""
    if isinstance(x, str):
        if not x.isdigit() and x != "":
            raise ValidationError(f"{what} {x!r} must be a digit string")
        values = tuple(int(ch) for ch in x)
    else:
        values = tuple(int(v) for v in x)
    if len(values) != length:
        raise ValidationError(f"{what} has length {len(values)}, expected {length}")
    if any(not 0 <= v < q for v in values):
        raise ValidationError(f"{what} {values} has entries outside 0..{q - 1}")
    return values


def format_config(x: Sequence[int]) -> str:
    return "".join(str(int(v)) for v in x)


def at_age(J: Sequence, age: int):
    """Element of an oldest-first sequence that was applied ``age`` steps ago."""
    if not 1 <= age <= len(J):
        raise IndexError(f"age {age} outside 1..{len(J)}")
    return J[len(J) - age]


def from_ages(newest_first: Sequence) -> tuple:
    """Convert a newest-first (age-ordered) sequence to application order."""
    return tuple(reversed(tuple(newest_first)))


def to_ages(J: Sequence) -> tuple:
    return tuple(reversed(tuple(J)))


def update(m: Module, x, i=()) -> Configuration:
    """One parallel update ``M(x, i)``."""
    x = as_vector(x, m.n, m.q)
    i = as_vector(i, m.k, m.q, "input configuration")
    env = dict(zip(m.nodes, x))
    env.update(zip(m.inputs, i))
    return tuple(m.functions[s].evaluate(env, m.q) for s in m.nodes)


def update_sequence(m: Module, x, J: Sequence = ()) -> Configuration:
    """``M(x, (i_1, ..., i_m))``: apply ``J`` oldest first."""
    x = as_vector(x, m.n, m.q)
    for i in J:
        x = update(m, x, i)
    return x


# ---------------------------------------------------------------- influence

def default_mode(m: Module, cap: int = E.SEMANTIC_CAP) -> str:
    if all(len(f.support) <= cap for f in m.functions.values()):
        return SEMANTIC
    return SYNTACTIC


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def dependencies(m: Module, s: str, mode: str | None = None) -> list[str]:
    """Labels ``s`` depends on, in node-then-input declaration order."""
    mode = mode or default_mode(m)
    _check_mode(mode)
    f = m.functions[s]
    dep = f.semantic_support(m.q) if mode == SEMANTIC else set(f.support)
    return [l for l in m.nodes + m.inputs if l in dep]


def influences(m: Module, u: str, s: str) -> bool:
    """Whether flipping ``u`` alone can change the value of ``f_s``."""
    if u not in m.nodes and u not in m.inputs:
        raise ValidationError(f"unknown label {u!r}")
    return u in m.functions[s].semantic_support(m.q)


@dataclass(frozen=True)
class InteractionDigraph:
    vertices: tuple[str, ...]
    arcs: frozenset
    mode: str
    nodes: tuple[str, ...] = field(default=())

    def node_arcs(self) -> set[tuple[str, str]]:
        node_set = set(self.nodes)
        return {(u, v) for u, v in self.arcs if u in node_set}

    def predecessors(self, s: str) -> list[str]:
        return [u for u in self.vertices if (u, s) in self.arcs]

    def sorted_arcs(self) -> list[tuple[str, str]]:
        order = {v: j for j, v in enumerate(self.vertices)}
        return sorted(self.arcs, key=lambda a: (order[a[1]], order[a[0]]))


def interaction_digraph(m: Module, mode: str | None = None) -> InteractionDigraph:
    mode = mode or default_mode(m)
    _check_mode(mode)
    arcs = set()
    for s in m.nodes:
        for u in dependencies(m, s, mode):
            arcs.add((u, s))
    return InteractionDigraph(m.nodes + m.inputs, frozenset(arcs), mode, m.nodes)


def _topological(m: Module, mode: str | None):
    g = interaction_digraph(m, mode)
    index = {s: j for j, s in enumerate(m.nodes)}
    indeg = {s: 0 for s in m.nodes}
    succ = {s: [] for s in m.nodes}
    for u, v in g.node_arcs():
        indeg[v] += 1
        succ[u].append(v)
    ready = [index[s] for s in m.nodes if indeg[s] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        s = m.nodes[heapq.heappop(ready)]
        order.append(s)
        for v in succ[s]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, index[v])
    return order, g


def is_acyclic(m: Module, mode: str | None = None) -> bool:
    order, _ = _topological(m, mode)
    return len(order) == m.n


def topological_order(m: Module, mode: str | None = None) -> list[str]:
    """Nodes after all their node predecessors; ties go to declaration order."""
    order, g = _topological(m, mode)
    if len(order) != m.n:
        raise NotAcyclicError(f"module is not acyclic in {g.mode} mode")
    return order


def depths(m: Module, mode: str | None = None) -> dict[str, int]:
    """Number of nodes on the longest node path ending at each node.

    After ``depths[s]`` updates the state of ``s`` no longer depends on the
    starting configuration.
    """
    order, g = _topological(m, mode)
    if len(order) != m.n:
        raise NotAcyclicError(f"module is not acyclic in {g.mode} mode")
    preds = {s: [] for s in m.nodes}
    for u, v in g.node_arcs():
        preds[v].append(u)
    depth: dict[str, int] = {}
    for s in order:
        depth[s] = 1 + max((depth[u] for u in preds[s]), default=0)
    return depth


# ---------------------------------------------------------------- batch kernel

class Kernel:
    """Batched parallel update over byte-per-node configuration arrays.

    ``step(X, U)`` maps a ``(B, n)`` array of configurations and a ``(B, k)``
    array of input configurations to the ``(B, n)`` successors.
    """

    def __init__(self, m: Module, mode: str | None = None):
        self.module = m
        self.q = m.q
        self.n = m.n
        self.k = m.k
        self.mode = mode or default_mode(m)
        _check_mode(self.mode)
        node_pos = {s: j for j, s in enumerate(m.nodes)}
        input_pos = {a: j for j, a in enumerate(m.inputs)}
        self._plan = []
        for s in m.nodes:
            f = m.functions[s]
            if isinstance(f, ExprFunction) and len(f.support) > E.SEMANTIC_CAP:
                refs = [(l, node_pos.get(l), input_pos.get(l)) for l in f.support]
                self._plan.append(("expr", f, refs))
                continue
            if isinstance(f, TableFunction):
                labels, table = list(f.support), f.array
            else:
                labels = dependencies(m, s, self.mode)
                table = f.tabulate(labels, m.q)
            sources = [(0, node_pos[l]) if l in node_pos else (1, input_pos[l]) for l in labels]
            self._plan.append(("table", table, sources))

    def step(self, X: np.ndarray, U: np.ndarray | None = None) -> np.ndarray:
        B = X.shape[0]
        if U is None:
            U = np.zeros((B, 0), dtype=np.uint8)
        out = np.empty((B, self.n), dtype=np.uint8)
        arrays = (X, U)
        for j, (kind, data, sources) in enumerate(self._plan):
            if kind == "table":
                idx = np.zeros(B, dtype=np.int64)
                for which, p in sources:
                    idx = idx * self.q + arrays[which][:, p]
                out[:, j] = data[idx]
            else:
                env = {l: (X[:, a] if a is not None else U[:, b]) for l, a, b in sources}
                out[:, j] = np.broadcast_to(np.asarray(data.evaluate_columns(env), dtype=np.uint8), (B,))
        return out

    def run(self, X: np.ndarray, inputs: Sequence[np.ndarray]) -> np.ndarray:
        for U in inputs:
            X = self.step(X, U)
        return X


def all_configurations(n: int, q: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Decode codes ``start..stop-1`` into a ``(B, n)`` digit array."""
    stop = q ** n if stop is None else stop
    codes = np.arange(start, stop, dtype=np.int64)
    return decode(codes, n, q)


def decode(codes: np.ndarray, n: int, q: int) -> np.ndarray:
    """Codes to digits; the first node is the most significant digit."""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((codes.shape[0], n), dtype=np.uint8)
    for j in range(n):
        out[:, j] = (codes // q ** (n - 1 - j)) % q
    return out


def encode(X: np.ndarray, q: int) -> np.ndarray:
    codes = np.zeros(X.shape[0], dtype=np.int64)
    for j in range(X.shape[1]):
        codes = codes * q + X[:, j]
    return codes


def encode_one(x: Sequence[int], q: int) -> int:
    code = 0
    for v in x:
        code = code * q + int(v)
    return code


def decode_one(code: int, n: int, q: int) -> Configuration:
    digits = []
    for _ in range(n):
        code, r = divmod(code, q)
        digits.append(r)
    return tuple(reversed(digits))
