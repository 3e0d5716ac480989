"""Output functions of acyclic modules.

An output function of delay ``d`` over ``k`` inputs maps the last ``d`` input
configurations to a state. Arguments are indexed by AGE: age 1 is the most
recently applied configuration. Tables are dense arrays of ``q**(k*d)``
entries; the index is a mixed-radix number whose least significant block is
age 1, and within a block the first input is the most significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import expr as E
from .core import (
    ExprFunction,
    Module,
    as_vector,
    dependencies,
    topological_order,
)
from .errors import CapExceeded, ValidationError

INDEX_BITS_CAP = 24


def _check_size(q: int, k: int, d: int) -> int:
    size = q ** (k * d)
    if size > 2 ** INDEX_BITS_CAP:
        raise CapExceeded(
            f"output table over {k} inputs with delay {d} needs {size} entries "
            f"(cap 2**{INDEX_BITS_CAP})"
        )
    return size


def _digit(idx: np.ndarray, q: int, k: int, pos: int, age: int) -> np.ndarray:
    """Value of input number ``pos`` at ``age`` under the table index layout."""
    return (idx // q ** ((age - 1) * k + (k - 1 - pos))) % q


@dataclass(frozen=True, eq=False)
class OutputFunction:
    inputs: tuple[str, ...]
    delay: int
    table: np.ndarray
    q: int = 2
    minimal: bool = False
    # updates after which the node no longer depends on the start configuration
    horizon: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        table = np.asarray(self.table, dtype=np.uint8)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        if self.delay < 1:
            raise ValidationError("output functions have delay at least 1")
        expected = _check_size(self.q, self.k, self.delay)
        if table.shape != (expected,):
            raise ValidationError(f"table needs {expected} entries, got {table.shape}")

    @property
    def k(self) -> int:
        return len(self.inputs)

    @property
    def block(self) -> int:
        return self.q ** self.k

    def __eq__(self, other):
        if not isinstance(other, OutputFunction):
            return NotImplemented
        return (self.inputs, self.delay, self.q) == (other.inputs, other.delay, other.q) and bool(
            np.array_equal(self.table, other.table))

    __hash__ = None

    def __repr__(self):
        return f"OutputFunction({self.to_text()!r}, delay={self.delay}, inputs={list(self.inputs)})"

    def index(self, J: Sequence) -> int:
        """Table index of the last ``delay`` configurations of ``J`` (oldest first)."""
        if len(J) < self.delay:
            raise ValidationError(f"sequence of length {len(J)} shorter than delay {self.delay}")
        idx = 0
        for age in range(self.delay, 0, -1):
            i = as_vector(J[len(J) - age], self.k, self.q, "input configuration")
            for v in i:
                idx = idx * self.q + v
        return idx

    def __call__(self, J: Sequence) -> int:
        return int(self.table[self.index(J)])

    def depends_on_age(self, age: int) -> bool:
        Q = self.block
        view = self.table.reshape(Q ** (self.delay - age), Q, Q ** (age - 1))
        return not bool((view == view[:, :1, :]).all())

    def support(self) -> list[tuple[str, int]]:
        """``(input, age)`` pairs the table depends on, by age then input."""
        names = [(a, age) for age in range(1, self.delay + 1) for a in self.inputs]
        # variable order in the index: most significant first
        ordered = [(self.inputs[j], age) for age in range(self.delay, 0, -1) for j in range(self.k)]
        deps = E.table_support(self.table, self.q, len(ordered))
        found = {ordered[p] for p in deps}
        return [v for v in names if v in found]

    def hex(self) -> str:
        """Packed table for ``q == 2``: entry ``i`` is bit ``i``."""
        if self.q != 2:
            return "".join(str(int(v)) for v in self.table)
        value = 0
        for bit in self.table[::-1]:
            value = (value << 1) | int(bit)
        width = max(1, (len(self.table) + 3) // 4)
        return format(value, f"0{width}x")

    def to_expression(self) -> E.Expression:
        """Sum of products over ``name@age`` literals (Boolean only).

        Only the ``(input, age)`` pairs the table depends on appear; no
        further minimization is attempted.
        """
        if self.q != 2:
            raise ValidationError("expression printing is only defined for q = 2")
        variables = self.support()
        if not variables:
            return E.Const(int(self.table[0]))
        idx = np.arange(2 ** len(variables), dtype=np.int64)
        full = np.zeros_like(idx)
        for j, (a, age) in enumerate(variables):
            bit = (idx >> (len(variables) - 1 - j)) & 1
            full += bit * 2 ** ((age - 1) * self.k + (self.k - 1 - self.inputs.index(a)))
        values = self.table[full]
        terms = []
        for row in np.flatnonzero(values):
            lits = []
            for j, (a, age) in enumerate(variables):
                ref = E.Ref(f"{a}@{age}")
                lits.append(ref if (row >> (len(variables) - 1 - j)) & 1 else E.Not(ref))
            terms.append(E.conjunction(lits))
        return E.disjunction(terms)

    def to_text(self) -> str:
        if self.q != 2:
            return self.hex()
        return E.to_text(self.to_expression())

    @classmethod
    def from_function(cls, fn: Callable[[tuple], int], inputs: Sequence[str], delay: int,
                      q: int = 2, minimal: bool = False) -> "OutputFunction":
        """Tabulate ``fn`` called on every oldest-first sequence of length ``delay``."""
        inputs = tuple(inputs)
        k = len(inputs)
        size = _check_size(q, k, delay)
        table = np.empty(size, dtype=np.uint8)
        Q = q ** k
        for idx in range(size):
            J = []
            for age in range(delay, 0, -1):
                b = (idx // Q ** (age - 1)) % Q
                J.append(tuple((b // q ** (k - 1 - j)) % q for j in range(k)))
            table[idx] = fn(tuple(J))
        o = cls(inputs, delay, table, q)
        return minimize_delay(o) if minimal else o

    @classmethod
    def from_expression(cls, text: str | E.Expression, inputs: Sequence[str], delay: int | None = None,
                        q: int = 2, minimal: bool = True) -> "OutputFunction":
        """Build from an expression over ``name@age`` references.

        ``delay`` defaults to the oldest age mentioned. With ``minimal`` the
        result is delay-minimized.
        """
        e = E.parse_expression(text, ages=True) if isinstance(text, str) else text
        inputs = tuple(inputs)
        refs = {}
        for name in E.syntactic_support(e):
            label, sep, age = name.partition("@")
            if not sep or label not in inputs or int(age) < 1:
                raise ValidationError(f"{name!r} is not an age-indexed reference to {list(inputs)}")
            refs[name] = (inputs.index(label), int(age))
        if delay is None:
            delay = max((age for _, age in refs.values()), default=1)
        if any(age > delay for _, age in refs.values()):
            raise ValidationError(f"expression refers beyond delay {delay}")
        k = len(inputs)
        size = _check_size(q, k, delay)
        idx = np.arange(size, dtype=np.int64)
        env = {name: _digit(idx, q, k, pos, age) for name, (pos, age) in refs.items()}
        if q == 2:
            values = E.compile_expression(e)(env)
        elif not E.has_operators(e):
            values = env[e.name] if isinstance(e, E.Ref) else e.value
        else:
            raise ValidationError(f"logical operators are undefined over an alphabet of size {q}")
        table = np.broadcast_to(np.asarray(values, dtype=np.uint8), (size,))
        o = cls(inputs, delay, table, q)
        return minimize_delay(o) if minimal else o

    @classmethod
    def from_hex(cls, text: str, inputs: Sequence[str], delay: int, q: int = 2,
                 minimal: bool = False) -> "OutputFunction":
        inputs = tuple(inputs)
        size = _check_size(q, len(inputs), delay)
        if q == 2:
            value = int(text, 16)
            if value >> size:
                raise ValidationError("hex table has bits beyond its size")
            table = [(value >> i) & 1 for i in range(size)]
        else:
            table = [int(ch) for ch in text]
        o = cls(inputs, delay, table, q)
        return minimize_delay(o) if minimal else o


def increment(o: OutputFunction) -> OutputFunction:
    """Delay ``d+1`` lift ignoring the oldest configuration."""
    _check_size(o.q, o.k, o.delay + 1)
    return OutputFunction(o.inputs, o.delay + 1, np.tile(o.table, o.block), o.q, False, o.horizon)


def minimize_delay(o: OutputFunction) -> OutputFunction:
    """Drop trailing ages the table does not depend on (delay stays >= 1)."""
    table = o.table
    d = o.delay
    Q = o.block
    while d > 1:
        view = table.reshape(Q, Q ** (d - 1))
        if not (view == view[:1]).all():
            break
        table = view[0]
        d -= 1
    return OutputFunction(o.inputs, d, table, o.q, True, o.horizon)


def compute_output_functions(m: Module, mode: str | None = None) -> dict[str, OutputFunction]:
    """Minimal output function of every node of an acyclic module.

    Nodes are processed in topological order; each node's table is its local
    function with node predecessors replaced by their incremented output
    functions and inputs read at age 1.
    """
    order = topological_order(m, mode)
    q, k = m.q, m.k
    Q = q ** k
    node_set = set(m.nodes)
    result: dict[str, OutputFunction] = {}
    for s in order:
        deps = dependencies(m, s, mode)
        preds = [u for u in deps if u in node_set]
        d = 1 + max((result[u].delay for u in preds), default=0)
        size = _check_size(q, k, d)
        idx = np.arange(size, dtype=np.int64)
        env = {}
        for label in deps:
            if label in node_set:
                o = result[label]
                env[label] = o.table[(idx // Q) % o.table.shape[0]].astype(np.int64)
            else:
                env[label] = _digit(idx, q, k, m.inputs.index(label), 1)
        f = m.functions[s]
        if isinstance(f, ExprFunction) and len(deps) > E.SEMANTIC_CAP:
            values = f.evaluate_columns(env)
        else:
            table = f.tabulate(deps, q)
            local = np.zeros(size, dtype=np.int64)
            for label in deps:
                local = local * q + env[label]
            values = table[local]
        horizon = 1 + max((result[u].horizon for u in preds), default=0)
        raw = np.broadcast_to(np.asarray(values, dtype=np.uint8), (size,))
        result[s] = minimize_delay(OutputFunction(m.inputs, d, raw, q, False, horizon))
    return {s: result[s] for s in m.nodes}


def _bijection(g: Mapping[str, str], src: Sequence[str], dst: Sequence[str], what: str) -> dict:
    g = dict(g)
    if set(g) != set(src) or sorted(g.values()) != sorted(dst) or len(set(g.values())) != len(g):
        raise ValidationError(f"{what} is not a bijection from {list(src)} to {list(dst)}")
    return g


def equivalent(o: OutputFunction, other: OutputFunction, g: Mapping[str, str] | None = None) -> bool:
    """Equal delays and ``o(J) == other(J ∘ g⁻¹)`` for every sequence ``J``.

    ``g`` maps the inputs of ``o`` onto those of ``other``; by default the
    identity on shared names.
    """
    if g is None:
        g = {a: a for a in o.inputs}
    g = _bijection(g, o.inputs, other.inputs, "input map")
    if o.q != other.q or o.delay != other.delay:
        return False
    q, k, d = o.q, o.k, o.delay
    idx = np.arange(o.table.shape[0], dtype=np.int64)
    mapped = np.zeros_like(idx)
    for j1, a in enumerate(o.inputs):
        j2 = other.inputs.index(g[a])
        for age in range(1, d + 1):
            mapped += _digit(idx, q, k, j1, age) * q ** ((age - 1) * k + (k - 1 - j2))
    return bool(np.array_equal(o.table, other.table[mapped]))


def restrict_inputs(o: OutputFunction, inputs: Sequence[str]) -> OutputFunction:
    """Re-index ``o`` over ``inputs``.

    Inputs of ``o`` missing from ``inputs`` must be irrelevant (they are read
    as 0); new names in ``inputs`` are ignored by the result.
    """
    inputs = tuple(inputs)
    used = {a for a, _ in o.support()}
    dropped = used - set(inputs)
    if dropped:
        raise ValidationError(f"output function depends on {sorted(dropped)}")
    q, k, d = o.q, len(inputs), o.delay
    size = _check_size(q, k, d)
    idx = np.arange(size, dtype=np.int64)
    source = np.zeros_like(idx)
    for j, a in enumerate(o.inputs):
        if a not in inputs:
            continue
        j2 = inputs.index(a)
        for age in range(1, d + 1):
            source += _digit(idx, q, k, j2, age) * q ** ((age - 1) * o.k + (o.k - 1 - j))
    return OutputFunction(inputs, d, o.table[source], q, False, o.horizon)


def substitute(o: OutputFunction, replacements: Mapping[str, OutputFunction],
               inputs: Sequence[str]) -> OutputFunction:
    """Output function seen through a non-recursive wiring.

    Each input ``δ`` of ``o`` listed in ``replacements`` reads the node whose
    output function is ``replacements[δ]``; at age ``a`` that node's value
    is its output function applied from age ``a + 1`` onwards. The result is
    over ``inputs`` and is delay-minimized.
    """
    inputs = tuple(inputs)
    q, k = o.q, len(inputs)
    extra = max((r.delay for r in replacements.values()), default=0)
    D = o.delay + extra
    size = _check_size(q, k, D)
    idx = np.arange(size, dtype=np.int64)

    def digit(label, age):
        return _digit(idx, q, k, inputs.index(label), age)

    target = np.zeros(size, dtype=np.int64)
    for age in range(1, o.delay + 1):
        for j, a in enumerate(o.inputs):
            if a in replacements:
                r = replacements[a]
                sub = np.zeros(size, dtype=np.int64)
                for b in range(1, r.delay + 1):
                    for jr, ar in enumerate(r.inputs):
                        sub += digit(ar, age + b) * q ** ((b - 1) * r.k + (r.k - 1 - jr))
                value = r.table[sub].astype(np.int64)
            else:
                value = digit(a, age)
            target += value * q ** ((age - 1) * o.k + (o.k - 1 - j))
    return minimize_delay(OutputFunction(inputs, D, o.table[target], q))


def check_equivalence_hypothesis(m: Module, m2: Module, T: Sequence[str], T2: Sequence[str],
                              g: Mapping[str, str], h: Mapping[str, str]) -> bool:
    """Whether ``O_s`` and ``O'_{h(s)}`` are equivalent under ``g`` for all ``s`` in ``T``.

    When this holds, every total wiring ``ω: I → T`` of ``m`` and the wiring
    ``h ∘ ω ∘ g⁻¹`` of ``m2`` close into networks with isomorphic attractors.
    """
    T, T2 = list(T), list(T2)
    if len(T) != len(T2):
        raise ValidationError("node sets must have equal size")
    h = _bijection(h, T, T2, "node map")
    g = _bijection(g, m.inputs, m2.inputs, "input map")
    outs = compute_output_functions(m)
    outs2 = compute_output_functions(m2)
    return all(equivalent(outs[s], outs2[h[s]], g) for s in T)
