import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modulant.core import Module, update
from modulant.dynamics import (
    Attractor,
    DynamicsGraph,
    attractor_exists_fpt,
    attractors,
    attractors_isomorphic,
    bound_table,
    brute_attractor_exists,
    count_attractors_by_size,
    fixed_point_exists,
    fixed_points,
    generated_input_sequence,
    period_of,
    settle,
)
from modulant.errors import CapExceeded, ValidationError, WiringError
from modulant.generators import random_acyclic_module, random_network, random_wiring
from modulant.textio import load_module
from modulant.wiring import close

from .helpers import FIXTURES, mobius_bound


def naive_attractors(an):
    """Cycles found by iterating ``update`` from every configuration."""
    found = set()
    for x in itertools.product(range(an.q), repeat=an.n):
        seen = []
        while x not in seen:
            seen.append(x)
            x = update(an, x)
        cycle = seen[seen.index(x):]
        found.add(frozenset(cycle))
    return sorted((len(c), min(c)) for c in found)


def test_network_attractor():
    F = load_module(FIXTURES / "example1.an").module
    (a,) = attractors(F)
    assert a.configs == ((0, 1, 0), (1, 1, 1))
    assert count_attractors_by_size(F) == {2: 1}
    assert fixed_points(F) == []
    assert period_of(F, "111") == 2
    with pytest.raises(ValidationError):
        period_of(F, "000")


def test_canonical_rotation():
    a = Attractor.from_cycle([(1, 1), (0, 1), (1, 0)])
    assert a.configs == ((0, 1), (1, 0), (1, 1))
    with pytest.raises(ValidationError):
        Attractor.from_cycle([(0,), (0,)])


def test_dynamics_need_a_network():
    with pytest.raises(ValidationError):
        attractors(load_module(FIXTURES / "example3.an").module)


def test_state_cap():
    m = Module.build({f"x{j}": f"x{j}" for j in range(12)})
    with pytest.raises(CapExceeded):
        attractors(m, cap=2 ** 10)
    with pytest.raises(CapExceeded):
        DynamicsGraph(m).edges(cap=2 ** 10)


def test_closed_one_to_one_fixture():
    m = load_module(FIXTURES / "fig4right.an")
    F = close(m.module, m.wiring)
    assert fixed_points(F) == [(0, 0, 0), (1, 1, 1)]
    for c in range(1, 5):
        assert attractor_exists_fpt(m.module, m.wiring, c).found == brute_attractor_exists(
            m.module, m.wiring, c)


def test_bound_examples():
    assert bound_table(2, 1, 6).values == (2, 2, 6, 12, 30, 54)
    assert bound_table(2, 3, 1).values == (8,)
    assert bound_table(2, 0, 3).values == (1, 0, 0)
    big = bound_table(2, 4, 20)
    assert big[20] == mobius_bound(2, 4, 20) and big[20] > 2 ** 64
    with pytest.raises(IndexError):
        big[21]
    with pytest.raises(ValidationError):
        bound_table(1, 1, 1)


def test_fpt_errors():
    m = load_module(FIXTURES / "example6.an").module
    with pytest.raises(WiringError):
        attractor_exists_fpt(m, {"alpha": "c"}, 1)
    with pytest.raises(ValidationError):
        attractor_exists_fpt(m, {"alpha": "c", "beta": "a", "gamma": "b"}, 0)
    with pytest.raises(CapExceeded):
        attractor_exists_fpt(m, {"alpha": "c", "beta": "a", "gamma": "b"}, 6, cap=2 ** 10)


def test_fixed_point_shortcut():
    m = load_module(FIXTURES / "fig4right.an")
    assert fixed_point_exists(m.module, m.wiring)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 7))
def test_vectorized_enumeration_matches_naive(seed, n):
    F = random_network(seed, n)
    assert [(a.size, a.configs[0]) for a in attractors(F)] == naive_attractors(F)


def test_threads_do_not_change_results():
    F = random_network(7, 17)
    assert attractors(F, threads=4) == attractors(F, threads=1)
    m = random_acyclic_module(3, 6, 2)
    w = random_wiring(3, m)
    for c in range(1, 7):
        assert attractor_exists_fpt(m, w, c, threads=3) == attractor_exists_fpt(m, w, c)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 6), st.integers(1, 2), st.integers(1, 6))
def test_fpt_witness_is_an_attractor(seed, n, k, c):
    m = random_acyclic_module(seed, n, k)
    w = random_wiring(seed, m)
    F = close(m, w)
    res = attractor_exists_fpt(m, w, c, exact=False)
    if res.found:
        a = res.witness
        assert c % a.size == 0
        for x, y in zip(a.configs, a.configs[1:] + a.configs[:1]):
            assert update(F, x) == y


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.sampled_from([3]))
def test_fpt_over_larger_alphabets(seed, n, q):
    m = random_acyclic_module(seed, n, 1, q)
    w = random_wiring(seed, m)
    sizes = {a.size for a in attractors(close(m, w))}
    for c in range(1, 5):
        assert attractor_exists_fpt(m, w, c).found == (c in sizes)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 8))
def test_acyclic_network_single_fixed_point(seed, n):
    F = random_acyclic_module(seed, n, 0)
    (a,) = attractors(F)
    assert a.size == 1
    X = settle(F)
    assert (X == X[0]).all()


def test_generated_input_sequence_and_isomorphism():
    m = load_module(FIXTURES / "fig4right.an")
    assert generated_input_sequence(m.module, m.wiring, "111", 3) == ((1,), (1,), (1,))
    F = close(m.module, m.wiring)
    assert attractors_isomorphic(attractors(F), attractors(F.relabel({"a": "z"})))
    assert not attractors_isomorphic(attractors(F), attractors(load_module(FIXTURES / "example1.an").module))
