import pytest
from hypothesis import given
from hypothesis import strategies as st

from clusterfreeze.errors import NotNormalized, NotPointed
from clusterfreeze.pointed import (dominance_leq, dominance_vector, element_support,
                                   extract_pointed, in_convex_hull, newton_polytopes_equal,
                                   supp_dim)
from clusterfreeze.ring import LaurentElement, parse
from clusterfreeze.seed import get_seed

A2 = get_seed("A2")


@given(st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
       st.tuples(st.integers(0, 4), st.integers(0, 4)))
def test_dominance_vector_inverts_pstar(g, n):
    h = tuple(a + b for a, b in zip(g, A2.pstar_vec(n)))
    assert dominance_vector(h, g, A2) == n
    assert dominance_leq(h, g, A2)
    if any(n):
        assert not dominance_leq(g, h, A2)


def test_dominance_is_not_total():
    # [TRIVIAL] in A3 with principal coefficients, frozen shifts are incomparable
    A3 = get_seed("A3")
    assert dominance_vector((0, 0, 0, 1, 0, 0), (0,) * 6, A3) is None


def test_extract_pointed_reassembles():
    z = parse("x^(-1,-1) + x^(-1,0) + x^(0,-1)", 2)
    p = extract_pointed(z, A2)
    # [TRIVIAL] p*e1 = (0,-1), p*e2 = (1,0), so F = 1 + y1 + y1 y2
    assert p.degree == (-1, 0)
    assert p.fpoly_at_one() == {(0, 0): 1, (1, 0): 1, (1, 1): 1}
    assert p.reassemble() == z
    assert element_support(p) == {0, 1}
    assert supp_dim(p) == (1, 1)


def test_not_pointed_and_not_normalized():
    with pytest.raises(NotPointed):
        extract_pointed(parse("x^(0,0) + x^(1,1)", 2), A2)
    with pytest.raises(NotNormalized):
        extract_pointed(parse("2 * x^(1,0)", 2), A2)
    with pytest.raises(NotPointed):
        extract_pointed(LaurentElement.zero(2), A2)


def test_convex_hull_membership():
    square = [(0, 0), (2, 0), (0, 2), (2, 2)]
    assert in_convex_hull((1, 1), square)
    assert not in_convex_hull((3, 1), square)
    assert newton_polytopes_equal(square + [(1, 1)], square)
    assert not newton_polytopes_equal(square, square[:3])
