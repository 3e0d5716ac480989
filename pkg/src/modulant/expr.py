"""Propositional expressions used to write local functions.

Surface syntax (loosest to tightest binding)::

    <->   ->   |   ^   &   !

All binary operators are left-associative. Identifiers match
``[A-Za-z_][A-Za-z0-9_]*``; constants are bare digits. The Unicode forms
``↔ → ∨ ⊕ ∧ ¬`` are accepted as synonyms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union

import numpy as np

from .errors import CapExceeded, EvaluationError, ParseError

SEMANTIC_CAP = 20

AND, OR, XOR, IMPLIES, IFF = "and", "or", "xor", "implies", "iff"
BINARY_OPS = (AND, OR, XOR, IMPLIES, IFF)

_SYMBOL = {AND: "&", OR: "|", XOR: "^", IMPLIES: "->", IFF: "<->"}
_PRECEDENCE = {IFF: 1, IMPLIES: 2, OR: 3, XOR: 4, AND: 5}
_NOT_PRECEDENCE = 6
_ATOM_PRECEDENCE = 7


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"

    def __post_init__(self):
        if self.op not in _PRECEDENCE:
            raise ValueError(f"unknown binary operator {self.op!r}")


Expression = Union[Const, Ref, Not, BinOp]


# ---------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:@[0-9]+)?)
  | (?P<num>[0-9]+)
  | (?P<op><->|<=>|->|=>|[!&|^~()]|[¬∧∨⊕→↔⇒⇔])
    """,
    re.VERBOSE,
)

_OP_ALIASES = {
    "!": "!", "~": "!", "¬": "!",
    "&": "&", "∧": "&",
    "|": "|", "∨": "|",
    "^": "^", "⊕": "^",
    "->": "->", "=>": "->", "→": "->", "⇒": "->",
    "<->": "<->", "<=>": "<->", "↔": "<->", "⇔": "<->",
    "(": "(", ")": ")",
}
_BINARY_TOKENS = {"&": AND, "|": OR, "^": XOR, "->": IMPLIES, "<->": IFF}
_LEVELS = [IFF, IMPLIES, OR, XOR, AND]


@dataclass
class _Token:
    kind: str  # ident, num, op, eof
    text: str
    offset: int


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    start = text.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def _error(text: str, message: str, offset: int) -> ParseError:
    line, column = _position(text, offset)
    return ParseError(message, offset=offset, line=line, column=column)


def _tokenize(text: str, ages: bool) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _error(text, f"unknown operator token {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "ident":
            if "@" in m.group() and not ages:
                at = pos + m.group().index("@")
                raise _error(text, "unknown operator token '@'", at)
            tokens.append(_Token("ident", m.group(), pos))
        elif kind == "num":
            tokens.append(_Token("num", m.group(), pos))
        elif kind == "op":
            tokens.append(_Token("op", _OP_ALIASES[m.group()], pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ages: bool):
        self.text = text
        self.tokens = _tokenize(text, ages)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: _Token, expected: str) -> ParseError:
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return _error(self.text, f"expected {expected}, found {found}", tok.offset)

    def parse(self) -> Expression:
        expr = self.binary(0)
        tok = self.peek()
        if tok.kind != "eof":
            raise self.fail(tok, "operator or end of input")
        return expr

    def binary(self, level: int) -> Expression:
        if level == len(_LEVELS):
            return self.unary()
        op = _LEVELS[level]
        left = self.binary(level + 1)
        while self.peek().kind == "op" and _BINARY_TOKENS.get(self.peek().text) == op:
            self.advance()
            right = self.binary(level + 1)
            left = BinOp(op, left, right)
        return left

    def unary(self) -> Expression:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "!":
            self.advance()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Expression:
        tok = self.advance()
        if tok.kind == "ident":
            return Ref(tok.text)
        if tok.kind == "num":
            return Const(int(tok.text))
        if tok.kind == "op" and tok.text == "(":
            inner = self.binary(0)
            close = self.advance()
            if close.kind != "op" or close.text != ")":
                raise self.fail(close, "')'")
            return inner
        raise self.fail(tok, "operand")


def parse_expression(text: str, ages: bool = False) -> Expression:
    """Parse ``text`` into an expression tree.

    With ``ages=True`` identifiers may carry an ``@k`` suffix (``alpha@2``),
    the notation used for age-indexed output functions.

    >>> parse_expression("a | !c")
    BinOp(op='or', left=Ref(name='a'), right=Not(operand=Ref(name='c')))
    """
    return _Parser(text, ages).parse()


# ---------------------------------------------------------------- printing

def _precedence(e: Expression) -> int:
    if isinstance(e, BinOp):
        return _PRECEDENCE[e.op]
    if isinstance(e, Not):
        return _NOT_PRECEDENCE
    return _ATOM_PRECEDENCE


def to_text(e: Expression) -> str:
    """Print ``e`` with the fewest parentheses that preserve its tree."""
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Not):
        inner = to_text(e.operand)
        if _precedence(e.operand) < _NOT_PRECEDENCE:
            inner = f"({inner})"
        return "!" + inner
    p = _PRECEDENCE[e.op]
    left = to_text(e.left)
    right = to_text(e.right)
    if _precedence(e.left) < p:
        left = f"({left})"
    if _precedence(e.right) <= p:
        right = f"({right})"
    return f"{left} {_SYMBOL[e.op]} {right}"


# ---------------------------------------------------------------- structure

def iter_leaves(e: Expression) -> Iterator[Expression]:
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, (Const, Ref)):
            yield node
        elif isinstance(node, Not):
            stack.append(node.operand)
        else:
            stack.append(node.right)
            stack.append(node.left)


def syntactic_support(e: Expression) -> set[str]:
    """Labels appearing as leaves of ``e``."""
    return {leaf.name for leaf in iter_leaves(e) if isinstance(leaf, Ref)}


def ordered_support(e: Expression) -> list[str]:
    """Leaf labels of ``e`` in order of first appearance."""
    seen: dict[str, None] = {}
    for leaf in iter_leaves(e):
        if isinstance(leaf, Ref):
            seen.setdefault(leaf.name)
    return list(seen)


def has_operators(e: Expression) -> bool:
    return isinstance(e, (Not, BinOp))


def max_constant(e: Expression) -> int:
    return max((leaf.value for leaf in iter_leaves(e) if isinstance(leaf, Const)), default=0)


def substitute(e: Expression, mapping: Mapping[str, Expression]) -> Expression:
    """Replace every reference whose label is in ``mapping``."""
    if isinstance(e, Ref):
        return mapping.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Not):
        return Not(substitute(e.operand, mapping))
    return BinOp(e.op, substitute(e.left, mapping), substitute(e.right, mapping))


def rename(e: Expression, mapping: Mapping[str, str]) -> Expression:
    return substitute(e, {old: Ref(new) for old, new in mapping.items()})


def conjunction(terms: Iterable[Expression]) -> Expression:
    return _fold(AND, terms, Const(1))


def disjunction(terms: Iterable[Expression]) -> Expression:
    return _fold(OR, terms, Const(0))


def _fold(op: str, terms: Iterable[Expression], empty: Expression) -> Expression:
    result = None
    for term in terms:
        result = term if result is None else BinOp(op, result, term)
    return empty if result is None else result


# ---------------------------------------------------------------- semantics

def evaluate(e: Expression, assignment: Mapping[str, int], q: int = 2) -> int:
    """Evaluate ``e`` under ``assignment``.

    Logical operators are only defined for ``q == 2``; over larger
    alphabets an expression may only be a single constant or reference.
    """
    if q != 2 and has_operators(e):
        raise EvaluationError(f"logical operators are undefined over an alphabet of size {q}")
    return _eval(e, assignment, q)


def _eval(e: Expression, env: Mapping[str, int], q: int) -> int:
    if isinstance(e, Const):
        if not 0 <= e.value < q:
            raise EvaluationError(f"constant {e.value} outside alphabet 0..{q - 1}")
        return e.value
    if isinstance(e, Ref):
        try:
            v = env[e.name]
        except KeyError:
            raise EvaluationError(f"unbound label {e.name!r}") from None
        if not 0 <= v < q:
            raise EvaluationError(f"state {v} of {e.name!r} outside alphabet 0..{q - 1}")
        return v
    if isinstance(e, Not):
        return 1 - _eval(e.operand, env, q)
    a = _eval(e.left, env, q)
    b = _eval(e.right, env, q)
    if e.op == AND:
        return a & b
    if e.op == OR:
        return a | b
    if e.op == XOR:
        return a ^ b
    if e.op == IMPLIES:
        return (1 - a) | b
    return 1 - (a ^ b)


def compile_expression(e: Expression) -> Callable[[Mapping], object]:
    """Return a closure evaluating ``e`` on a mapping of 0/1 arrays.

    Works elementwise on numpy integer arrays as well as on plain ints; no
    range checks are performed.
    """
    if isinstance(e, Const):
        v = e.value
        return lambda env: v
    if isinstance(e, Ref):
        name = e.name
        return lambda env: env[name]
    if isinstance(e, Not):
        f = compile_expression(e.operand)
        return lambda env: 1 - f(env)
    f, g = compile_expression(e.left), compile_expression(e.right)
    if e.op == AND:
        return lambda env: f(env) & g(env)
    if e.op == OR:
        return lambda env: f(env) | g(env)
    if e.op == XOR:
        return lambda env: f(env) ^ g(env)
    if e.op == IMPLIES:
        return lambda env: (1 - f(env)) | g(env)
    return lambda env: 1 - (f(env) ^ g(env))


def truth_table(e: Expression, labels: list[str], q: int = 2) -> np.ndarray:
    """Dense table of ``e`` over ``labels``, row-major, last label fastest.

    Labels of ``e`` outside ``labels`` are evaluated at 0.
    """
    n = len(labels)
    if n > SEMANTIC_CAP:
        raise CapExceeded(f"truth table over {n} labels exceeds cap of {SEMANTIC_CAP}")
    size = q ** n
    idx = np.arange(size, dtype=np.int64)
    env = {}
    for j, label in enumerate(labels):
        env[label] = ((idx // q ** (n - 1 - j)) % q).astype(np.int64)
    for label in syntactic_support(e) - set(labels):
        env[label] = np.zeros(size, dtype=np.int64)
    if q == 2:
        values = compile_expression(e)(env)
    else:
        if has_operators(e):
            raise EvaluationError(f"logical operators are undefined over an alphabet of size {q}")
        values = env[e.name] if isinstance(e, Ref) else e.value
        if isinstance(e, Const) and not 0 <= e.value < q:
            raise EvaluationError(f"constant {e.value} outside alphabet 0..{q - 1}")
    return np.broadcast_to(np.asarray(values, dtype=np.uint8), (size,)).copy()


def table_support(table: np.ndarray, q: int, n: int) -> list[int]:
    """Positions (0-based, over ``n`` arguments) the table depends on."""
    positions = []
    for j in range(n):
        view = table.reshape(q ** j, q, q ** (n - 1 - j))
        if not (view == view[:, :1, :]).all():
            positions.append(j)
    return positions


def semantic_support(e: Expression, q: int = 2, candidate_labels=None, cap: int = SEMANTIC_CAP) -> set[str]:
    """Labels whose flip can change the value of ``e``.

    Decided by exhaustive enumeration of the syntactic support, which must
    hold at most ``cap`` labels.
    """
    labels = sorted(syntactic_support(e))
    if candidate_labels is not None:
        missing = set(labels) - set(candidate_labels)
        if missing:
            raise EvaluationError(f"labels {sorted(missing)} outside the candidate set")
    if len(labels) > cap:
        raise CapExceeded(f"support of {len(labels)} labels exceeds enumeration cap of {cap}")
    table = truth_table(e, labels, q)
    return {labels[j] for j in table_support(table, q, len(labels))}
