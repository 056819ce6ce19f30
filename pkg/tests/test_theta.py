import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clusterfreeze.errors import BadBasePoint, NotFound
from clusterfreeze.expansion import cluster_monomial, exchange_graph, g_vector
from clusterfreeze.freezing import _localized_exponent
from clusterfreeze.ring import LaurentElement, render
from clusterfreeze.scattering import complete_rank2
from clusterfreeze.seed import get_seed
from clusterfreeze.theta import (enumerate_broken_lines, freeze_theta_check, generic_point,
                                 monotone_bends, property_s_search, theta, theta_at,
                                 theta_cluster_chamber)


@pytest.fixture(scope="module")
def diagrams():
    return {name: complete_rank2(get_seed(name), 8) for name in ("A2", "B2", "kronecker", "ex4")}


@pytest.mark.parametrize("name", ["A2", "B2", "kronecker"])
def test_theta_is_a_monomial_on_the_positive_chamber(diagrams, name):
    D = diagrams[name]
    rng = random.Random(1)
    for _ in range(10):
        m = (rng.randint(0, 4), rng.randint(0, 4))
        th, _ = theta_at(m, D, rng=rng)
        assert th == LaurentElement.monomial(m)


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_theta_equals_cluster_monomials_in_reachable_chambers(diagrams, name):
    seed = get_seed(name)
    D = diagrams[name]
    graph = exchange_graph(seed, 8)
    rng = random.Random(2)
    for key in graph.order:
        state = graph.states[key]
        for i in seed.unfrozen:
            g = g_vector(state, i)
            # [DERIVED] the cluster variable from the Laurent recursion
            th, _ = theta_at(g, D, rng=rng)
            assert th == state.vars[i].at_one(), (state.word, i)


def test_worked_example_theta(diagrams):
    th, _ = theta_at((-1, 0), diagrams["ex4"])
    assert render(th) == "x^(-1,0) + x^(-1,1)"


@pytest.mark.parametrize("name", ["A2", "kronecker", "B2"])
def test_freezing_theta_functions(diagrams, name):
    D = diagrams[name]
    rng = random.Random(3)
    for _ in range(10):
        m = (rng.randint(-3, 3), rng.randint(-3, 3))
        F = rng.choice([{0}, {1}, {0, 1}])
        ok, witness = freeze_theta_check(m, F, D, K=8, rng=rng)
        assert ok, witness


def test_kronecker_imaginary_direction_has_positive_coefficients(diagrams):
    th, _ = theta_at((-1, 1), diagrams["kronecker"])
    assert all(c.at_one() > 0 for c in th.terms().values())
    assert th.coefficient((-1, 1)).at_one() == 1


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 10 ** 6))
def test_bends_are_monotone(m1, m2, salt):
    D = complete_rank2(get_seed("A2"), 6)
    Q = generic_point(D.seed, random.Random(salt))
    try:
        lines = enumerate_broken_lines((m1, m2), Q, D)
    except BadBasePoint:
        return
    assert lines
    for line in lines:
        assert monotone_bends(line, D.seed)


def test_theta_is_independent_of_the_point_in_a_chamber(diagrams):
    D = diagrams["A2"]
    a = theta((-2, 1), (Fraction(7, 3), Fraction(5, 7)), D)
    b = theta((-2, 1), (Fraction(11, 5), Fraction(13, 11)), D)
    assert a == b


def test_base_point_on_a_wall(diagrams):
    with pytest.raises(BadBasePoint):
        theta((1, 0), (Fraction(0), Fraction(1)), diagrams["A2"])


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_property_s_within_predicted_shift(diagrams, name):
    D = diagrams[name]
    seed = D.seed
    for g in [(-1, -1), (-2, 1), (1, -2), (-2, -2)]:
        for k in seed.unfrozen:
            d, predicted = property_s_search(g, k, D, 8, rng=random.Random(4))
            assert d <= predicted


def test_property_s_inconclusive_when_bound_too_small(diagrams):
    with pytest.raises(NotFound):
        property_s_search((-2, -2), 0, diagrams["A2"], 0, rng=random.Random(5))


def test_cluster_chamber_mode_in_rank_three():
    seed = get_seed("A3")
    graph = exchange_graph(seed, 8)
    states = [graph.states[k] for k in graph.order]
    target = states[-1]
    g = g_vector(target, 0)
    th, word = theta_cluster_chamber(g, seed, 8, states)
    st_ = next(s for s in states if s.word == word)
    a = _localized_exponent(st_, g)
    assert th == cluster_monomial(st_, a).at_one()
    with pytest.raises(NotFound):
        theta_cluster_chamber((1, 1, 1, 0, 0, 0), seed, 0, states[:1][:0])
