import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modulant import expr as E
from modulant.core import Module, TableFunction, is_acyclic, update
from modulant.errors import ParseError, WiringError
from modulant.generators import random_acyclic_module, random_wiring
from modulant.output import compute_output_functions, equivalent, substitute
from modulant.textio import load_module
from modulant.wiring import (
    close,
    feedback,
    format_wiring,
    is_total,
    nonrecursive_wire,
    parse_wiring,
    recursive_wire,
)

from .helpers import FIXTURES, same_function


@pytest.fixture
def M():
    return load_module(FIXTURES / "example3.an").module


def test_recursive_example(M):
    W = recursive_wire(M, {"alpha": "c", "gamma": "a"})
    assert W.inputs == ("beta",)
    assert same_function(W.functions["a"], E.parse_expression("!b | c"), ["a", "b", "c"])
    assert same_function(W.functions["c"], E.parse_expression("!c & !a"), ["a", "c"])


def test_empty_wiring_is_identity(M):
    assert recursive_wire(M, {}) == M


def test_closure_matches_feedback_update(M):
    w = {"alpha": "c", "beta": "a", "gamma": "b"}
    F = close(M, w)
    assert F.is_network
    for x in itertools.product((0, 1), repeat=3):
        assert update(F, x) == update(M, x, feedback(M, w, x))


def test_close_requires_total(M):
    assert not is_total(M, {"alpha": "c"})
    with pytest.raises(WiringError):
        close(M, {"alpha": "c"})


def test_wiring_domain_errors(M):
    with pytest.raises(WiringError):
        recursive_wire(M, {"delta": "a"})
    with pytest.raises(WiringError):
        recursive_wire(M, {"alpha": "z"})


def test_nonrecursive_example(M):
    M2 = load_module(FIXTURES / "example8_second.an").module
    U = nonrecursive_wire(M, M2, {"delta": "b"})
    assert U.nodes == ("a", "b", "c", "d", "e") and U.inputs == ("alpha", "beta", "gamma")
    assert same_function(U.functions["d"], E.parse_expression("!d | e | b"), ["b", "d", "e"])
    assert U.functions["a"] == M.functions["a"]


def test_nonrecursive_empty_is_disjoint_union(M):
    M2 = load_module(FIXTURES / "example8_second.an").module
    U = nonrecursive_wire(M, M2, {})
    assert U.n == 5 and U.inputs == ("alpha", "beta", "gamma", "delta")


def test_nonrecursive_collisions(M):
    with pytest.raises(WiringError):
        nonrecursive_wire(M, M, {})
    other = Module.build({"d": "a"}, inputs=["a"])
    with pytest.raises(WiringError):
        nonrecursive_wire(M, other, {})


def test_shared_inputs_merge():
    m1 = Module.build({"a": "x"}, inputs=["x"])
    m2 = Module.build({"b": "x & y"}, inputs=["x", "y"])
    U = nonrecursive_wire(m1, m2, {"y": "a"})
    assert U.inputs == ("x",)


def test_table_substitution_merges_duplicates():
    m = Module.build({"s": TableFunction(("a", "i"), (0, 1, 1, 0)), "a": "a"}, inputs=["i"])
    W = recursive_wire(m, {"i": "a"})
    assert W.functions["s"].support == ("a",)
    assert W.functions["s"].table == (0, 0)


def test_parse_wiring_text():
    w = parse_wiring("wire alpha -> c\n# comment\nbeta->a\n")
    assert w == {"alpha": "c", "beta": "a"}
    assert parse_wiring(format_wiring(w)) == w
    with pytest.raises(ParseError):
        parse_wiring("alpha => c")
    with pytest.raises(ParseError):
        parse_wiring("alpha -> c\nalpha -> b")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.integers(1, 2))
def test_closure_semantics_pointwise(seed, n, k):
    m = random_acyclic_module(seed, n, k)
    w = random_wiring(seed, m)
    F = close(m, w)
    assert len(F.nodes) == len(m.nodes)
    for x in itertools.product((0, 1), repeat=n):
        assert update(F, x) == update(m, x, feedback(m, w, x))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4), st.integers(1, 4), st.integers(1, 2))
def test_nonrecursive_wiring_commutes_with_output_substitution(seed, n1, n2, k):
    m1 = random_acyclic_module(seed, n1, k)
    m2 = random_acyclic_module(seed + 1, n2, 2).relabel(
        {f"x{j}": f"y{j}" for j in range(n2)} | {"i0": "j0", "i1": "j1"})
    w = {"j0": m1.nodes[seed % n1]}
    U = nonrecursive_wire(m1, m2, w)
    assert is_acyclic(U)
    assert U.n == n1 + n2 and U.k == k + 1
    outs1 = compute_output_functions(m1)
    outs2 = compute_output_functions(m2)
    outs = compute_output_functions(U)
    repl = {a: outs1[s] for a, s in w.items()}
    for s in m2.nodes:
        assert equivalent(outs[s], substitute(outs2[s], repl, U.inputs))
    for s in m1.nodes:
        # nodes of the first module keep their function; lift it to the union's inputs
        assert equivalent(outs[s], substitute(outs1[s], {}, U.inputs))
