import pytest

from modulant.core import is_acyclic
from modulant.errors import ValidationError
from modulant.generators import (
    random_acyclic_module,
    random_one_to_one,
    random_output_function,
    random_wiring,
)


def test_seed_required():
    with pytest.raises(ValidationError):
        random_acyclic_module(None, 3, 1)


def test_same_seed_same_module():
    assert random_acyclic_module(11, 6, 2) == random_acyclic_module(11, 6, 2)
    assert random_acyclic_module(11, 6, 2) != random_acyclic_module(12, 6, 2)


@pytest.mark.parametrize("seed", range(20))
def test_generated_instances_are_well_formed(seed):
    m = random_acyclic_module(seed, 1 + seed % 8, seed % 3, 2 + seed % 2)
    assert is_acyclic(m)
    w = random_wiring(seed, m)
    assert set(w) == set(m.inputs) and set(w.values()) <= set(m.nodes)
    o = random_one_to_one(seed, 3)
    assert o.k == 1 and o.output in o.nodes
    assert random_output_function(seed, ["a"], 3).delay == 3
