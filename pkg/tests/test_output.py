import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modulant.core import Kernel, Module, all_configurations, update_sequence
from modulant.errors import CapExceeded, NotAcyclicError, ValidationError
from modulant.generators import random_acyclic_module, random_output_function
from modulant.output import (
    OutputFunction,
    check_equivalence_hypothesis,
    compute_output_functions,
    equivalent,
    increment,
    minimize_delay,
    restrict_inputs,
)
from modulant.textio import load_module

from .helpers import FIXTURES


def sequences(k, d, q=2):
    return itertools.product(itertools.product(range(q), repeat=k), repeat=d)


def test_example_output_functions():
    m = load_module(FIXTURES / "example6.an").module
    outs = compute_output_functions(m)
    assert outs["a"].to_text() == "alpha@1"
    assert outs["c"].to_text() == "!gamma@1 & alpha@2 & !beta@2 & !alpha@3"
    assert outs["b"] == OutputFunction.from_expression("alpha@2 | beta@1 | !alpha@1",
                                                       ["alpha", "beta", "gamma"])


def test_constant_node_has_delay_one():
    m = Module.build({"a": "1", "b": "a & !a"}, inputs=["i"])
    outs = compute_output_functions(m)
    assert outs["a"].delay == 1 and outs["a"].table.tolist() == [1, 1]
    assert outs["b"].delay == 1 and outs["b"].table.tolist() == [0, 0]


def test_cancelling_predecessor_keeps_horizon():
    # b = i@2 ^ i@2 = 0, but only once a and c have been overwritten
    m = Module.build({"a": "i", "c": "i", "b": "a ^ c"}, inputs=["i"])
    outs = compute_output_functions(m)
    assert outs["b"].delay == 1 and outs["b"].table.tolist() == [0, 0]
    assert outs["b"].horizon == 2
    assert update_sequence(m, "101", [(0,)]) == (0, 0, 1)
    assert update_sequence(m, "101", [(0,), (0,)])[2] == 0


def test_cyclic_module_rejected():
    with pytest.raises(NotAcyclicError):
        compute_output_functions(load_module(FIXTURES / "example1.an").module)


def test_index_layout_age_one_least_significant():
    o = OutputFunction.from_expression("a@1", ["a", "b"], delay=2, minimal=False)
    # entry i: bit (k-1-pos) of block 1 is input a at age 1
    assert o.table.tolist() == [0, 0, 1, 1] * 4
    assert o([(0, 0), (1, 0)]) == 1 and o([(1, 1), (0, 1)]) == 0


def test_increment_and_minimize_roundtrip():
    o = OutputFunction.from_expression("a@2 & !b@1", ["a", "b"])
    up = increment(o)
    assert up.delay == 3 and not up.depends_on_age(3)
    assert minimize_delay(up) == o
    for J in sequences(2, 3):
        assert up(J) == o(J)


def test_hex_roundtrip():
    o = OutputFunction.from_expression("alpha@2 & alpha@3", ["alpha"])
    assert o.hex() == "c0"
    assert OutputFunction.from_hex("c0", ["alpha"], 3) == OutputFunction(o.inputs, 3, o.table)
    with pytest.raises(ValidationError):
        OutputFunction.from_hex("1c0", ["alpha"], 3)


def test_index_cap():
    with pytest.raises(CapExceeded):
        OutputFunction(("a", "b", "c"), 9, np.zeros(2 ** 27, dtype=np.uint8))


def test_expression_references_checked():
    with pytest.raises(ValidationError):
        OutputFunction.from_expression("beta@1", ["alpha"])
    with pytest.raises(ValidationError):
        OutputFunction.from_expression("alpha@3", ["alpha"], delay=2)


def test_equivalence_under_input_bijection():
    o = OutputFunction.from_expression("a@1 & !b@2", ["a", "b"])
    p = OutputFunction.from_expression("y@1 & !x@2", ["x", "y"])
    assert equivalent(o, p, {"a": "y", "b": "x"})
    assert not equivalent(o, p, {"a": "x", "b": "y"})
    with pytest.raises(ValidationError):
        equivalent(o, p, {"a": "x", "b": "x"})


def test_restrict_inputs():
    o = OutputFunction.from_expression("a@1", ["a", "b"])
    r = restrict_inputs(o, ["a"])
    assert r == OutputFunction.from_expression("a@1", ["a"], minimal=False)
    with pytest.raises(ValidationError):
        restrict_inputs(OutputFunction.from_expression("b@1", ["a", "b"]), ["a"])


def test_equivalence_hypothesis_on_fixtures():
    right = load_module(FIXTURES / "fig4right.an").module
    left = load_module(FIXTURES / "fig4left.an").module
    outs = compute_output_functions(left)
    # the left module realises the complement pattern, with the same delay
    assert outs["c"] == OutputFunction.from_expression("!alpha@2 & !alpha@3", ["alpha"])
    assert not check_equivalence_hypothesis(left, right, ["c"], ["c"], {"alpha": "alpha"}, {"c": "c"})
    assert check_equivalence_hypothesis(right, right.relabel({"a": "p", "b": "r", "c": "s"}),
                                        ["c"], ["s"], {"alpha": "alpha"}, {"c": "s"})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.integers(1, 2))
def test_output_functions_match_simulation(seed, n, k):
    """Every start configuration and every sequence of length d gives O(J)."""
    m = random_acyclic_module(seed, n, k)
    outs = compute_output_functions(m)
    kernel = Kernel(m)
    X0 = all_configurations(n, 2)
    for j, s in enumerate(m.nodes):
        o = outs[s]
        for J in sequences(k, max(o.delay, o.horizon)):
            X = X0
            for i in J:
                X = kernel.step(X, np.tile(np.array(i, dtype=np.uint8), (X.shape[0], 1)))
            assert (X[:, j] == o(J)).all(), (s, J)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_output_functions_match_direct_updates(seed, n):
    m = random_acyclic_module(seed, n, 1)
    outs = compute_output_functions(m)
    for j, s in enumerate(m.nodes):
        o = outs[s]
        depth = max(o.delay, o.horizon)
        for J in sequences(1, depth):
            for x in itertools.product((0, 1), repeat=n):
                assert update_sequence(m, x, J)[j] == o(J)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4), st.integers(1, 2))
def test_minimal_delay_is_minimal(seed, d, k):
    o = random_output_function(seed, [f"i{j}" for j in range(k)], d)
    assert o.delay == d
    assert d == 1 or o.depends_on_age(d)
    assert minimize_delay(o) == o
