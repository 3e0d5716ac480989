"""Constructions: minimal one-to-one modules, SAT gadgets, output construction.

* :func:`synthesize_minimal_one_to_one` builds a delay line of ``d - 1``
  nodes feeding an output node that evaluates the target table.
* :func:`sat_to_attractor_gadget` and :func:`sat_to_fixpoint_gadget` turn a
  formula into a closed acyclic module whose attractor (resp. fixed point)
  existence matches satisfiability.
* :func:`verify_output_construction` / :func:`search_output_construction`
  decide whether non-recursive wirings of given parts realize a target
  output function.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import expr as E
from .core import ExprFunction, Module, TableFunction, is_acyclic
from .errors import CapExceeded, NotAcyclicError, ParseError, ValidationError, WiringError
from .output import (
    OutputFunction,
    compute_output_functions,
    equivalent,
    minimize_delay,
    restrict_inputs,
)
from .wiring import nonrecursive_wire


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def natural_key(label: str):
    return [int(part) if part.isdigit() else part for part in re.split(r"(\d+)", label)]


def formula_variables(f: E.Expression) -> list[str]:
    return sorted(E.syntactic_support(f), key=natural_key)


def _as_formula(f) -> E.Expression:
    return E.parse_expression(f) if isinstance(f, str) else f


def satisfiable(f, variables: Sequence[str] | None = None) -> bool:
    """Truth-table satisfiability (the SAT oracle)."""
    f = _as_formula(f)
    variables = list(variables) if variables is not None else formula_variables(f)
    return bool(E.truth_table(f, variables).any())


# ---------------------------------------------------------------- one-to-one synthesis

def is_one_to_one(m: Module) -> bool:
    return m.k == 1 and m.output is not None and is_acyclic(m)


def synthesize_minimal_one_to_one(o: OutputFunction, output: str = "e",
                                  chain: str = "t") -> Module:
    """Smallest one-to-one module whose output node has output function ``o``.

    Nodes ``t1 … t(d-1)`` delay the input by one step each; the output node
    reads the input for age 1 and ``t(j-1)`` for age ``j``.
    """
    if o.k != 1:
        raise ValidationError(f"one-to-one synthesis needs a single input, got {o.k}")
    if minimize_delay(o).delay != o.delay:
        raise ValidationError("output function is not delay-minimal")
    alpha = o.inputs[0]
    d = o.delay
    taken = {alpha}
    line = [_fresh(f"{chain}{j}", taken) for j in range(1, d)]
    out = _fresh(output, taken)
    functions: dict[str, object] = {}
    for j, t in enumerate(line):
        functions[t] = E.Ref(alpha if j == 0 else line[j - 1])
    # argument for age j: the input at age 1, the delay node t(j-1) otherwise
    by_age = [alpha] + line
    if o.q == 2:
        mapping = {f"{alpha}@{age}": E.Ref(by_age[age - 1]) for age in range(1, d + 1)}
        functions[out] = E.substitute(o.to_expression(), mapping)
    else:
        q = o.q
        idx = np.arange(q ** d, dtype=np.int64)
        source = np.zeros_like(idx)
        for p in range(d):
            source += ((idx // q ** (d - 1 - p)) % q) * q ** p
        functions[out] = TableFunction(tuple(by_age), tuple(o.table[source].tolist()))
    return Module.build(functions, inputs=[alpha], q=o.q, output=out)


def smallest_one_to_one(o: OutputFunction, max_nodes: int) -> Module | None:
    """Exhaustively search one-to-one modules of at most ``max_nodes`` nodes.

    Modules are enumerated in topological form: node ``j`` has a table over
    the input and nodes ``1 … j-1``, so every acyclic module is covered up to
    relabeling and semantic equality. Returns the first realization found by
    increasing size, or ``None``.
    """
    if o.k != 1:
        raise ValidationError("one-to-one search needs a single input")
    alpha, q = o.inputs[0], o.q
    for n in range(1, max_nodes + 1):
        labels = [f"n{j}" for j in range(1, n + 1)]
        spaces = [range(q ** (q ** (j + 1))) for j in range(n)]
        for choice in itertools.product(*spaces):
            functions = {}
            for j, code in enumerate(choice):
                size = q ** (j + 1)
                table = [(code // q ** p) % q for p in range(size)]
                functions[labels[j]] = TableFunction((alpha, *labels[:j]), table)
            m = Module.build(functions, inputs=[alpha], q=q)
            outs = compute_output_functions(m)
            for s in labels:
                if equivalent(outs[s], o):
                    return m.replace(output=s)
    return None


# ---------------------------------------------------------------- SAT gadgets

@dataclass(frozen=True, eq=False)
class GadgetInstance:
    kind: str
    module: Module
    wiring: Mapping[str, str]
    formula: E.Expression
    variables: tuple[str, ...]
    c: int | None = None
    tape: tuple[str, ...] = field(default=())


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def tape_length(m_vars: int) -> int:
    """Smallest ``e >= 0`` such that ``m_vars + e + 1`` is prime."""
    if m_vars < 1:
        raise ValidationError("need at least one variable")
    e = 0
    while not is_prime(m_vars + e + 1):
        e += 1
    return e


def _prepare(f, variables):
    f = _as_formula(f)
    variables = tuple(variables) if variables is not None else tuple(formula_variables(f))
    extra = E.syntactic_support(f) - set(variables)
    if extra:
        raise ValidationError(f"formula references undeclared variables {sorted(extra)}")
    return f, variables


def _ring_windows(tape: Sequence[int], m: int):
    """Valuations seen by the output node: the tape itself, then every
    rotation of the ring ``tape + (guess,)`` for both guesses."""
    yield tuple(tape[:m])
    L = len(tape)
    for guess in (0, 1):
        ring = tuple(tape) + (guess,)
        for k in range(1, L + 1):
            yield (ring[k:] + ring[:k])[:m]


def sat_to_attractor_gadget(f, variables: Sequence[str] | None = None) -> GadgetInstance:
    """One-to-one module with a size-``c`` attractor iff ``f`` is satisfiable.

    A shifting tape ``t1 … t(m+e)`` (``m + e + 1`` prime) is closed into a
    ring through node ``q`` when some rotation of the ring encodes a
    satisfying valuation on its first ``m`` cells; otherwise ``q`` emits 0
    and every trajectory reaches the all-zero fixed point.
    """
    f, variables = _prepare(f, variables)
    m = len(variables)
    if m == 0:
        raise ValidationError("attractor gadget needs a formula over at least one variable")
    e = tape_length(m)
    L = m + e
    tape = tuple(f"t{j}" for j in range(1, L + 1))
    sat = E.truth_table(f, list(variables))

    def satisfies(values):
        idx = 0
        for v in values:
            idx = idx * 2 + v
        return bool(sat[idx])

    table = []
    for code in range(2 ** L):
        cells = [(code >> (L - 1 - j)) & 1 for j in range(L)]
        ok = any(satisfies(w) for w in _ring_windows(cells, m))
        table.append(cells[-1] if ok else 0)
    functions: dict[str, object] = {tape[0]: E.Ref("alpha")}
    for j in range(1, L):
        functions[tape[j]] = E.Ref(tape[j - 1])
    functions["q"] = TableFunction(tape, table)
    module = Module.build(functions, inputs=["alpha"], name="sat_cycle", output="q")
    return GadgetInstance("sat-cycle", module, {"alpha": "q"}, f, variables, L + 1, tape)


def attractor_gadget_terms(g: GadgetInstance) -> list[E.Expression]:
    """The ``m + e + 1`` disjuncts of the gadget's output condition.

    Term 0 is ``f`` on the tape; term ``k`` is ``f`` on the ring rotated by
    ``k``, taken for both guesses of the output cell.
    """
    tape = list(g.tape)
    m = len(g.variables)
    L = len(tape)

    def instance(cells):
        return E.substitute(g.formula, dict(zip(g.variables, cells)))

    terms = [instance([E.Ref(t) for t in tape[:m]])]
    for k in range(1, L + 1):
        copies = []
        for guess in (0, 1):
            ring = [E.Ref(t) for t in tape] + [E.Const(guess)]
            copies.append(instance((ring[k:] + ring[:k])[:m]))
        terms.append(E.disjunction(copies))
    return terms


def attractor_gadget_expression(g: GadgetInstance) -> E.Expression:
    """Propositional form of the output node: ``t(m+e) & (F0 | … | F(m+e))``."""
    return E.BinOp(E.AND, E.Ref(g.tape[-1]), E.disjunction(attractor_gadget_terms(g)))


def expand_attractor_gadget(g: GadgetInstance) -> Module:
    """The gadget module with its output node written as a formula."""
    functions = dict(g.module.functions)
    functions["q"] = ExprFunction(attractor_gadget_expression(g))
    return g.module.replace(functions=functions)


def sat_to_fixpoint_gadget(f, variables: Sequence[str] | None = None) -> GadgetInstance:
    """Acyclic module whose closure has a fixed point iff ``f`` is satisfiable.

    Variable nodes copy their own input (wired back onto themselves),
    ``solver`` evaluates ``f`` and ``oscillator = !solver & !beta`` with
    ``beta`` wired onto ``oscillator``.
    """
    f, variables = _prepare(f, variables)
    taken = set(variables)
    solver = _fresh("solver", taken)
    oscillator = _fresh("oscillator", taken)
    ins = [_fresh(f"alpha_{v}", taken) for v in variables]
    beta = _fresh("beta", taken)
    functions: dict[str, object] = {v: E.Ref(a) for v, a in zip(variables, ins)}
    functions[solver] = f
    functions[oscillator] = E.BinOp(E.AND, E.Not(E.Ref(solver)), E.Not(E.Ref(beta)))
    module = Module.build(functions, inputs=ins + [beta], name="sat_fixpoint")
    wiring = dict(zip(ins, variables))
    wiring[beta] = oscillator
    return GadgetInstance("sat-fixpoint", module, wiring, f, variables)


# ---------------------------------------------------------------- output construction

@dataclass(frozen=True)
class Wire:
    """Input ``input`` of part ``part`` reads node ``node`` of part ``source``."""

    input: str
    part: int
    node: str
    source: int

    def to_text(self) -> str:
        return f"wire {self.input}@{self.part} -> {self.node}@{self.source}"


@dataclass(frozen=True)
class Plan:
    """Non-recursive wirings among indexed parts, plus the target node."""

    wires: tuple[Wire, ...] = ()
    target: tuple[str, int] | None = None

    def to_text(self) -> str:
        lines = [w.to_text() for w in self.wires]
        if self.target is not None:
            lines.append(f"target {self.target[0]}@{self.target[1]}")
        return "".join(line + "\n" for line in lines)


_PLAN_WIRE = re.compile(r"^wire\s+(\w+)@(\d+)\s*->\s*(\w+)@(\d+)$")
_PLAN_TARGET = re.compile(r"^target\s+(\w+)@(\d+)$")


def parse_plan(text: str) -> Plan:
    wires, target = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _PLAN_WIRE.match(line):
            wires.append(Wire(m.group(1), int(m.group(2)), m.group(3), int(m.group(4))))
        elif m := _PLAN_TARGET.match(line):
            target = (m.group(1), int(m.group(2)))
        else:
            raise ParseError(f"malformed plan line {line!r}", line=lineno)
    return Plan(tuple(wires), target)


def compose(parts: Sequence[Module], plan: Plan | Sequence[Wire]) -> Module:
    """Fold the parts left to right, wiring each into the union of earlier ones.

    Part indices are 0-based positions in ``parts``.
    """
    wires = plan.wires if isinstance(plan, Plan) else tuple(plan)
    if not parts:
        raise ValidationError("need at least one part")
    for w in wires:
        if not 0 <= w.part < len(parts) or not 0 <= w.source < len(parts):
            raise WiringError(f"{w.to_text()}: unknown part")
        if w.source >= w.part:
            raise WiringError(f"{w.to_text()}: may only read from an earlier part")
        if w.input not in parts[w.part].inputs:
            raise WiringError(f"{w.to_text()}: part {w.part} has no input {w.input!r}")
        if w.node not in parts[w.source].nodes:
            raise WiringError(f"{w.to_text()}: part {w.source} has no node {w.node!r}")
    acc = parts[0]
    for j in range(1, len(parts)):
        omega = {w.input: w.node for w in wires if w.part == j}
        acc = nonrecursive_wire(acc, parts[j], omega)
    return acc


def _matches(O: OutputFunction, o: OutputFunction) -> bool:
    try:
        projected = restrict_inputs(O, o.inputs)
    except ValidationError:
        return False
    return equivalent(minimize_delay(projected), o)


def verify_output_construction(parts: Sequence[Module], plan: Plan | Sequence[Wire],
                               target: tuple[str, int] | None, o: OutputFunction) -> bool:
    """Compose ``parts`` per ``plan`` and compare the target node's output function.

    The composed module's output function is first projected onto the
    inputs of ``o`` (it must not depend on any other input).
    """
    if target is None and isinstance(plan, Plan):
        target = plan.target
    if target is None:
        raise ValidationError("no target node given")
    node, part = target
    if not 0 <= part < len(parts) or node not in parts[part].nodes:
        raise WiringError(f"unknown target {node}@{part}")
    module = compose(parts, plan)
    if not is_acyclic(module):
        raise NotAcyclicError("composed module is not acyclic")
    return _matches(compute_output_functions(module)[node], o)


def search_output_construction(parts: Sequence[Module], o: OutputFunction,
                               max_plans: int = 10 ** 6) -> Plan | None:
    """First plan (in canonical order) whose target node realizes ``o``.

    Each input of each part is either wired to a node of an earlier part
    (parts, then nodes, in order) or left unwired (tried last).
    """
    slots = []
    for j, part in enumerate(parts):
        options = [(node, src) for src in range(j) for node in parts[src].nodes]
        for a in part.inputs:
            slots.append((j, a, options + [None]))
    count = 1
    for _, _, options in slots:
        count *= len(options)
    if count > max_plans:
        raise CapExceeded(f"{count} wiring plans exceed search limit {max_plans}")
    targets = [(node, j) for j, part in enumerate(parts) for node in part.nodes]
    for choice in itertools.product(*(options for _, _, options in slots)):
        wires = tuple(Wire(a, j, pick[0], pick[1])
                      for (j, a, _), pick in zip(slots, choice) if pick is not None)
        module = compose(parts, wires)
        outs = compute_output_functions(module)
        for node, j in targets:
            if _matches(outs[node], o):
                return Plan(wires, (node, j))
    return None


def output_construction_instance(f, variables: Sequence[str] | None = None):
    """Parts ``[M0, M1, Mf]`` and the identity target for formula ``f``.

    ``M0`` and ``M1`` hold one constant node each; ``Mf`` has one input per
    variable plus ``alpha`` and a node computing ``f & alpha``.
    """
    f, variables = _prepare(f, variables)
    taken = set(variables)
    zero, one, node = _fresh("zero", taken), _fresh("one", taken), _fresh("fa", taken)
    alpha = _fresh("alpha", taken)
    m0 = Module.build({zero: "0"}, name="M0")
    m1 = Module.build({one: "1"}, name="M1")
    mf = Module.build({node: E.BinOp(E.AND, f, E.Ref(alpha))}, inputs=list(variables) + [alpha], name="Mf")
    target = OutputFunction.from_expression(f"{alpha}@1", [alpha], 1)
    return [m0, m1, mf], target
