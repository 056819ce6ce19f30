import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clusterfreeze.errors import (BadFreeze, DimensionError, FrozenMutation, IncompatiblePair,
                                  SeedInvariantError)
from clusterfreeze.seed import (Seed, catalog, check_compatibility, freeze_seed, get_seed,
                                mutate_seed, mutate_word)

from oracle import mutate_matrix
from strategies import principal_seeds


def ints(M):
    return [[int(x) for x in row] for row in M]


@given(principal_seeds(), st.data())
def test_mutation_matches_reference_rule(seed, data):
    k = data.draw(st.sampled_from(seed.unfrozen))
    # [DERIVED] matrix mutation rule evaluated by the sympy oracle
    assert ints(mutate_seed(seed, k).B) == ints(mutate_matrix(ints(seed.B), k))


@given(principal_seeds(), st.data())
def test_mutation_is_an_involution(seed, data):
    k = data.draw(st.sampled_from(seed.unfrozen))
    assert mutate_seed(mutate_seed(seed, k), k) == seed


@given(principal_seeds(), st.data())
def test_compatibility_is_preserved(seed, data):
    word = data.draw(st.lists(st.sampled_from(seed.unfrozen), max_size=6))
    deltas = check_compatibility(seed)
    assert check_compatibility(mutate_word(seed, word)) == deltas


@pytest.mark.parametrize("name", sorted(catalog()))
def test_catalog_seeds_validate(name):
    seed = get_seed(name)
    seed.validate()
    assert check_compatibility(seed)


@pytest.mark.parametrize("name", sorted(catalog()))
def test_json_round_trip(name):
    seed = get_seed(name)
    again = Seed.from_json(seed.to_json())
    assert again == seed and again.id == seed.id


def test_dict_uses_one_based_vertices():
    d = get_seed("ex4").to_dict()
    assert d["unfrozen"] == [1]
    assert d["B"] == [["0", "-1"], ["1", "0"]]


def test_from_btilde_fills_frozen_columns():
    # only the unfrozen column is given: vertex 1 unfrozen, vertex 2 frozen
    seed = Seed.from_dict({"n": 2, "B": [[0], [1]], "unfrozen": [1]})
    assert ints(seed.B) == [[0, -1], [1, 0]]


def test_skew_symmetrizable_b2():
    seed = get_seed("B2")
    assert seed.d == (1, 2)
    # [TRIVIAL] mutating B2 at vertex 1 negates row and column 1
    assert ints(mutate_seed(seed, 0).B) == [[0, -1], [2, 0]]


def test_invalid_seeds():
    with pytest.raises(SeedInvariantError, match="skew-symmetrizable"):
        Seed([[0, 1], [1, 0]], [0, 1])
    with pytest.raises(SeedInvariantError, match="full-rank"):
        Seed([[0, 0], [0, 0]], [0, 1])
    with pytest.raises(DimensionError):
        Seed([[0, 1, 0], [-1, 0, 0]], [0])
    with pytest.raises(IncompatiblePair):
        Seed([[0, 1], [-1, 0]], [0, 1], lam=[[0, 1], [-1, 0]])
    with pytest.raises(SeedInvariantError, match="positive"):
        Seed([[0, 1], [-1, 0]], [0, 1], d=[0, 1])


def test_frozen_mutation_and_bad_freeze():
    seed = get_seed("ex4")
    with pytest.raises(FrozenMutation):
        mutate_seed(seed, 1)
    with pytest.raises(BadFreeze):
        freeze_seed(seed, [1])


def test_freeze_seed_keeps_matrix():
    seed = get_seed("A3")
    frozen = freeze_seed(seed, [0, 2])
    assert frozen.unfrozen == (1,)
    assert frozen.B == seed.B and frozen.lam == seed.lam
    check_compatibility(frozen)


def test_ids_are_stable():
    a, b = get_seed("A2"), get_seed("A2")
    assert a.id == b.id
    assert a.id != get_seed("kronecker").id
    assert json.loads(a.to_json())["n"] == 2
