"""Dominance order, pointed elements, supports and Newton polytopes."""

from fractions import Fraction
from itertools import combinations
from math import lcm

from . import linalg
from .errors import NotNormalized, NotPointed, RankError
from .ring import LaurentElement, VCoeff


def _require_full_rank(seed):
    try:
        return seed.btilde_left_inverse()
    except RankError:
        raise RankError("the extended exchange matrix is not of full rank") from None


def _int_solver(seed):
    """Integer data ``(Q, den, cols)`` with ``Q / den`` a left inverse of B~."""
    key = "int_solver"
    if key not in seed._cache:
        linv = _require_full_rank(seed)
        den = 1
        for row in linv:
            for x in row:
                den = lcm(den, Fraction(x).denominator)
        q = tuple(tuple(int(Fraction(x) * den) for x in row) for row in linv)
        cols = tuple(seed.pstar(k) for k in seed.unfrozen)
        seed._cache[key] = (q, den, cols)
    return seed._cache[key]


def dominance_vector(g1, g2, seed):
    """The unique ``n`` with ``g1 = g2 + p*n``, or None.

    Entries are ``int`` when integral and ``Fraction`` otherwise.
    """
    if not seed.unfrozen:
        return () if tuple(g1) == tuple(g2) else None
    q, den, cols = _int_solver(seed)
    diff = [a - b for a, b in zip(g1, g2)]
    n = []
    for row in q:
        num = sum(x * y for x, y in zip(row, diff))
        n.append(num // den if num % den == 0 else Fraction(num, den))
    for i in range(seed.n):
        if sum(x * col[i] for x, col in zip(n, cols)) != diff[i]:
            return None
    return tuple(n)


def dominance_leq(g1, g2, seed):
    """True iff ``g1 = g2 + p*n`` for some ``n`` in N^{I_uf}."""
    n = dominance_vector(g1, g2, seed)
    return n is not None and all(isinstance(x, int) and x >= 0 for x in n)


def _grading(seed):
    """A rational ``w`` with ``w . p*e_k = -1`` for every unfrozen ``k``.

    Strictly dominated exponents have strictly smaller ``w``-value, so the
    degree of a pointed element is its unique ``w``-maximal exponent.
    """
    key = "grading"
    if key not in seed._cache:
        bt = seed.btilde
        btt = linalg.transpose(bt, seed.rank)
        gram_inv = linalg.inverse(linalg.mat_mul(btt, bt))
        rhs = linalg.mat_vec(gram_inv, [-1] * seed.rank)
        seed._cache[key] = tuple(Fraction(x) for x in linalg.mat_vec(bt, rhs))
    return seed._cache[key]


def _int_grading(seed):
    key = "int_grading"
    if key not in seed._cache:
        w = _grading(seed)
        den = 1
        for x in w:
            den = lcm(den, x.denominator)
        seed._cache[key] = tuple(int(x * den) for x in w)
    return seed._cache[key]


def grading_value(seed, e):
    """A positive multiple of ``w . e``; only comparisons are meaningful."""
    return sum(w * x for w, x in zip(_int_grading(seed), e))


class PointedElement:
    """A Laurent element with its degree ``g`` and F-polynomial coefficients.

    ``fpoly`` maps ``n`` (indexed by the unfrozen vertices in order) to the
    coefficient of ``x^{g + p*n}``.
    """

    __slots__ = ("element", "degree", "fpoly", "seed")

    def __init__(self, element, degree, fpoly, seed):
        self.element = element
        self.degree = tuple(degree)
        self.fpoly = dict(fpoly)
        self.seed = seed

    def reassemble(self):
        terms = {}
        for n, c in self.fpoly.items():
            e = tuple(a + b for a, b in zip(self.degree, self.seed.pstar_vec(n)))
            terms[e] = c
        return LaurentElement.from_terms(len(self.degree), terms)

    def fpoly_at_one(self):
        return {n: c.at_one() for n, c in self.fpoly.items() if c.at_one()}

    def __repr__(self):
        return f"PointedElement(degree={self.degree}, terms={len(self.fpoly)})"


def extract_pointed(a, seed):
    """Read off the degree and F-polynomial of a pointed element."""
    if a.is_zero():
        raise NotPointed("the zero element is not pointed")
    exps = a.support()
    if not seed.unfrozen:
        if len(exps) != 1:
            raise NotPointed("without unfrozen vertices only monomials are pointed")
        g = exps[0]
    else:
        vals = {e: grading_value(seed, e) for e in exps}
        top = max(vals.values())
        cands = [e for e in exps if vals[e] == top]
        if len(cands) != 1:
            raise NotPointed(f"no unique maximal degree among {cands}")
        g = cands[0]
    lead = a.coefficient(g)
    if lead != VCoeff(1):
        raise NotNormalized(f"leading coefficient at {g} is {lead}, not 1")
    fpoly = {}
    for e in exps:
        if not seed.unfrozen:
            n = ()
        else:
            n = dominance_vector(e, g, seed)
            if n is None or any(not isinstance(x, int) or x < 0 for x in n):
                raise NotPointed(f"exponent {e} is not dominated by {g}")
        fpoly[tuple(n)] = a.coefficient(e)
    return PointedElement(a, g, fpoly, seed)


def support_of(n, seed):
    """``supp n`` as a set of (0-based) unfrozen vertices."""
    return {k for k, x in zip(seed.unfrozen, n) if x}


def element_support(p):
    """Union of ``supp n`` over the F-polynomial of a pointed element."""
    out = set()
    for n in p.fpoly:
        out |= support_of(n, p.seed)
    return out


def supp_dim(p):
    """Coordinate-wise maximum of the exponents of the F-polynomial."""
    r = len(p.seed.unfrozen)
    return tuple(max((n[c] for n, v in p.fpoly.items() if v), default=0) for c in range(r))


# Newton polytopes -------------------------------------------------------------

def in_convex_hull(point, pts):
    """Exact membership of ``point`` in the convex hull of ``pts``.

    By Caratheodory it suffices to test affinely independent subsets of size
    at most ``dim + 1``.
    """
    point = tuple(Fraction(x) for x in point)
    pts = [tuple(Fraction(x) for x in p) for p in set(pts)]
    if point in pts:
        return True
    dim = len(point)
    for size in range(2, min(dim + 1, len(pts)) + 1):
        for sub in combinations(pts, size):
            a = [[p[i] for p in sub] for i in range(dim)] + [[Fraction(1)] * size]
            lam = linalg.solve_unique(a, list(point) + [Fraction(1)])
            if lam is not None and all(x >= 0 for x in lam):
                return True
    return False


def hull_vertices(pts):
    pts = sorted(set(tuple(p) for p in pts))
    return [p for p in pts if not in_convex_hull(p, [q for q in pts if q != p])]


def newton_polytopes_equal(pts1, pts2):
    v1, v2 = hull_vertices(pts1), hull_vertices(pts2)
    return all(in_convex_hull(p, v2) for p in v1) and all(in_convex_hull(p, v1) for p in v2)


def fpoly_newton_points(fpoly, at_one=False):
    if at_one:
        return [n for n, c in fpoly.items() if c.at_one() != 0]
    return [n for n, c in fpoly.items() if not c.is_zero()]
