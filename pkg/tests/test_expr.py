import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modulant import expr as E
from modulant.errors import CapExceeded, EvaluationError, ParseError

LABELS = ["a", "b", "c", "d"]


def expressions(labels=LABELS):
    leaves = st.one_of(st.sampled_from([E.Const(0), E.Const(1)]),
                       st.sampled_from(labels).map(E.Ref))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(E.Not),
            st.tuples(st.sampled_from(E.BINARY_OPS), sub, sub).map(lambda t: E.BinOp(*t)),
        ),
        max_leaves=12,
    )


def brute_table(e, labels):
    return [E.evaluate(e, dict(zip(labels, row))) for row in itertools.product((0, 1), repeat=len(labels))]


@given(expressions())
def test_print_parse_roundtrip(e):
    assert E.parse_expression(E.to_text(e)) == e


@given(expressions())
def test_vectorized_table_matches_recursive_evaluator(e):
    assert E.truth_table(e, LABELS).tolist() == brute_table(e, LABELS)


@given(expressions())
def test_semantic_support_is_within_syntactic(e):
    sem = E.semantic_support(e)
    assert sem <= E.syntactic_support(e)
    # a label is in the semantic support iff flipping it can change the value
    table = np.array(brute_table(e, LABELS)).reshape((2,) * len(LABELS))
    for j, label in enumerate(LABELS):
        differs = bool((np.take(table, 0, axis=j) != np.take(table, 1, axis=j)).any())
        assert (label in sem) == differs


def test_precedence_and_associativity():
    assert E.parse_expression("a | b & c") == E.parse_expression("a | (b & c)")
    assert E.parse_expression("a -> b -> c") == E.parse_expression("(a -> b) -> c")
    assert E.parse_expression("a <-> b | c") == E.parse_expression("a <-> (b | c)")
    assert E.parse_expression("!a & b") == E.BinOp(E.AND, E.Not(E.Ref("a")), E.Ref("b"))
    assert E.to_text(E.parse_expression("a & (b & c)")) == "a & (b & c)"
    assert E.to_text(E.parse_expression("(a & b) & c")) == "a & b & c"


def test_unicode_and_ascii_aliases():
    assert E.parse_expression("¬a ∨ b ∧ c") == E.parse_expression("!a | b & c")
    assert E.parse_expression("~a => b") == E.parse_expression("!a -> b")
    assert E.parse_expression("a <=> b") == E.parse_expression("a <-> b")


@pytest.mark.parametrize("text, column", [("a &", 4), ("a $ b", 3), ("(a | b", 7), ("a b", 3), ("", 1)])
def test_parse_errors_carry_positions(text, column):
    with pytest.raises(ParseError) as info:
        E.parse_expression(text)
    assert info.value.column == column


def test_age_suffix_only_when_enabled():
    assert E.parse_expression("alpha@2 & alpha@3", ages=True) == E.BinOp(
        E.AND, E.Ref("alpha@2"), E.Ref("alpha@3"))
    with pytest.raises(ParseError):
        E.parse_expression("alpha@2")


def test_constant_function_has_no_semantic_support():
    assert E.semantic_support(E.parse_expression("a | !a")) == set()


def test_evaluate_rejects_unbound_and_out_of_range():
    e = E.parse_expression("a & b")
    with pytest.raises(EvaluationError):
        E.evaluate(e, {"a": 1})
    with pytest.raises(EvaluationError):
        E.evaluate(e, {"a": 2, "b": 0})


def test_truth_table_cap():
    e = E.disjunction([E.Ref(f"x{j}") for j in range(21)])
    with pytest.raises(CapExceeded):
        E.semantic_support(e)


def test_substitute_and_rename():
    e = E.parse_expression("a & !b")
    assert E.rename(e, {"a": "c"}) == E.parse_expression("c & !b")
    assert E.substitute(e, {"b": E.Const(0)}) == E.parse_expression("a & !0")


@settings(max_examples=50)
@given(expressions(["a", "b"]))
def test_compiled_expression_on_columns(e):
    grid = np.array(list(itertools.product((0, 1), repeat=2)))
    values = np.broadcast_to(E.compile_expression(e)({"a": grid[:, 0], "b": grid[:, 1]}), (4,))
    assert values.tolist() == brute_table(e, ["a", "b"])
