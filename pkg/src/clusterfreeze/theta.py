"""Broken lines and truncated theta functions.

Broken lines are enumerated backwards from the base point: the final
segment leaves ``Q`` in the direction ``+m_final``, and at every wall
crossing we either pass straight or undo a bend ``m_prev = m_cur - j p*n0``.
A line is complete once its attached exponent is back to ``m``.
"""

import random
from fractions import Fraction
from itertools import product

from .errors import BadBasePoint, NotFound
from .pointed import element_support, extract_pointed
from .ring import LaurentElement
from .scattering import (exponent_pair, freeze_pushforward, pair, s_mul, s_one, s_pow)

_PRIMES = (101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173)


class BrokenLine:
    """Segments ``(exponent, coefficient, start)`` in the direction of travel, ending at ``Q``.

    ``start`` is the bend point where a segment begins (None for the first).
    """

    __slots__ = ("m", "base", "segments")

    def __init__(self, m, base, segments):
        self.m = tuple(m)
        self.base = tuple(base)
        self.segments = list(segments)

    @property
    def monomial(self):
        exp, coeff, _ = self.segments[-1]
        return exp, coeff

    def bend_degrees(self, seed):
        from .pointed import dominance_vector
        return [dominance_vector(e, self.m, seed) for e, _, _ in self.segments]

    def to_json(self):
        return {
            "initial": list(self.m),
            "base_point": [str(x) for x in self.base],
            "segments": [{"exponent": list(e), "coefficient": str(c),
                          "start": None if p is None else [str(x) for x in p]}
                         for e, c, p in self.segments],
        }


def _hits_along(diagram, P, direction):
    """Nearest wall hits on the open ray ``P + s direction``, ``s > 0``."""
    seed = diagram.seed
    best = None
    group = []
    for wall in diagram.walls:
        num = pair(seed, P, wall.n0)
        den = pair(seed, direction, wall.n0)
        if den == 0:
            if num == 0 and all(sum(h * x for h, x in zip(hv, P)) >= 0 for hv in wall.bounds):
                raise BadBasePoint("a broken line runs inside a wall")
            continue
        s = -num / den
        if s <= 0:
            continue
        X = tuple(Fraction(p) + s * Fraction(d) for p, d in zip(P, direction))
        vals = [sum(h * x for h, x in zip(hv, X)) for hv in wall.bounds]
        if any(v < 0 for v in vals):
            continue
        if any(v == 0 for v in vals):
            raise BadBasePoint(f"a broken line meets the boundary of a wall at {X}")
        if best is None or s < best:
            best, group = s, [(wall, X)]
        elif s == best:
            group.append((wall, X))
    if best is None:
        return None
    if len({w.n0 for w, _ in group}) > 1:
        raise BadBasePoint(f"a broken line passes through a joint at {group[0][1]}")
    return best, group[0][1], group


def enumerate_broken_lines(m, Q, diagram, K=None):
    """All broken lines for ``m`` ending at ``Q`` with final y-degree at most ``K``."""
    seed = diagram.seed
    K = diagram.K if K is None else K
    m = tuple(m)
    Q = tuple(Fraction(x) for x in Q)
    for wall in diagram.walls:
        if pair(seed, Q, wall.n0) == 0 and all(
                sum(h * x for h, x in zip(hv, Q)) >= 0 for hv in wall.bounds):
            raise BadBasePoint("the base point lies on a wall")
    lines = []
    finals = [n for n in product(range(K + 1), repeat=seed.rank) if sum(n) <= K]
    for n_final in sorted(finals):
        m_final = tuple(a + b for a, b in zip(m, seed.pstar_vec(n_final)))
        _trace(diagram, m, Q, Q, m_final, n_final, [(m_final, None, None)], lines, K)
    return lines


def _trace(diagram, m, Q, P, m_cur, n_cur, hist, out, K):
    """Walk backwards from ``P`` carrying the exponent ``m_cur``.

    ``hist`` lists ``(exponent, bend point, bend coefficient)`` from ``Q``
    outwards; the last entry is the segment being traced.
    """
    seed = diagram.seed
    if not any(n_cur):
        out.append(BrokenLine(m, Q, _forward_segments(hist)))
        return
    hit = _hits_along(diagram, P, m_cur)
    if hit is None:
        return
    _, X, group = hit
    fn = s_one(seed.rank)
    for wall, _ in group:
        fn = s_mul(fn, wall.fn, K)
    n0 = group[0][0].n0
    _trace(diagram, m, Q, X, m_cur, n_cur, hist, out, K)
    pn0 = seed.pstar_vec(n0)
    j = 1
    while all(a - j * b >= 0 for a, b in zip(n_cur, n0)):
        n_prev = tuple(a - j * b for a, b in zip(n_cur, n0))
        m_prev = tuple(a - j * b for a, b in zip(m_cur, pn0))
        power = abs(exponent_pair(seed, m_prev, n0))
        if power:
            c = s_pow(fn, int(power), K, seed.rank).get(tuple(j * b for b in n0), 0)
            if c:
                new = hist[:-1] + [(m_cur, X, c), (m_prev, None, None)]
                _trace(diagram, m, Q, X, m_prev, n_prev, new, out, K)
        j += 1


def _forward_segments(hist):
    """``(exponent, coefficient, start point)`` in the direction of travel."""
    segs = []
    coeff = Fraction(1)
    for exp, point, c in reversed(hist):
        if c is not None:
            coeff *= c
        segs.append((exp, coeff, point))
    return segs


def theta(m, Q, diagram, K=None):
    """``theta_{Q,m}`` truncated at y-degree ``K`` as a classical Laurent element."""
    seed = diagram.seed
    terms = {}
    for line in enumerate_broken_lines(m, Q, diagram, K):
        e, c = line.segments[-1][0], line.segments[-1][1]
        terms[e] = terms.get(e, 0) + c
    out = {}
    for e, c in terms.items():
        if c:
            if c.denominator != 1:
                raise ValueError(f"non-integral theta coefficient {c} at {e}")
            out[e] = int(c)
    return LaurentElement.from_terms(seed.n, out)


# base points -------------------------------------------------------------------

def generic_point(seed, rng, generators=None, frozen=True):
    """A rational point with prime denominators inside the cone of ``generators``.

    Without generators the point lies in the interior of ``C^+``.
    """
    n = seed.n
    if generators is None:
        pt = [Fraction(0)] * n
        for k in seed.unfrozen:
            p = rng.choice(_PRIMES)
            pt[k] = Fraction(rng.randint(p, 5 * p) + 1, p)
    else:
        pt = [Fraction(0)] * n
        for g in generators:
            p = rng.choice(_PRIMES)
            a = Fraction(rng.randint(p, 3 * p) + 1, p)
            pt = [x + a * y for x, y in zip(pt, g)]
    if frozen:
        for j in seed.frozen:
            p = rng.choice(_PRIMES)
            pt[j] = pt[j] + Fraction(rng.randint(-3 * p, 3 * p), p)
    return tuple(pt)


def theta_at(m, diagram, K=None, rng=None, generators=None, attempts=20):
    """Theta function at a generic base point, re-sampled on collisions."""
    rng = rng or random.Random(0)
    for _ in range(attempts):
        Q = generic_point(diagram.seed, rng, generators)
        try:
            return theta(m, Q, diagram, K), Q
        except BadBasePoint:
            continue
    raise NotFound("no generic base point found")


def freeze_theta_check(m, F, diagram, K=None, rng=None):
    """``frz_{F,m}`` of the theta function equals the pushforward's theta function."""
    from .freezing import freeze_element
    seed = diagram.seed
    rng = rng or random.Random(0)
    pushed = freeze_pushforward(diagram, F)
    for _ in range(20):
        Q = generic_point(seed, rng)
        try:
            th = theta(m, Q, diagram, K)
            th_f = theta(m, Q, pushed, K)
        except BadBasePoint:
            continue
        lhs = freeze_element(th, F, seed, m)
        return lhs == th_f, {"frozen": str(lhs), "pushforward": str(th_f), "base_point": [str(x) for x in Q]}
    raise NotFound("no generic base point found")


# Property (S) ---------------------------------------------------------------------

def predicted_shift(th, g, k, seed):
    """Smallest ``d`` satisfying the derivative inequality for every relevant term.

    Requires ``<g + d f_k + p*n', n_j> > 0`` for ``n`` in the support of
    ``theta_g`` with ``n_k > 0``, all ``0 <= n' <= n`` and all ``0 < n_j <= n``
    with positive ``k``-th coordinate.
    """
    pe = extract_pointed(th, seed)
    pos = seed.unfrozen.index(k)
    need = 0
    for n, c in pe.fpoly.items():
        if c.is_zero() or n[pos] == 0:
            continue
        boxes = [range(x + 1) for x in n]
        for n1 in product(*boxes):
            base = tuple(a + b for a, b in zip(g, seed.pstar_vec(n1)))
            for nj in product(*boxes):
                if nj[pos] <= 0:
                    continue
                val = pair(seed, base, nj)
                # d * nj_k / d_k > -val
                bound = -val * seed.d[k] / nj[pos]
                d = int(bound // 1) + 1 if bound >= 0 else 0
                need = max(need, d)
    return need


def property_s_search(g, k, diagram, d_max, K=None, rng=None):
    """Smallest ``d <= d_max`` with ``k`` outside the support of ``theta_{g + d f_k}``.

    Returns ``(d, predicted)``; raises NotFound (inconclusive) otherwise.
    """
    seed = diagram.seed
    rng = rng or random.Random(0)
    th0, _ = theta_at(g, diagram, K, rng)
    predicted = predicted_shift(th0, g, k, seed)
    for d in range(d_max + 1):
        gd = tuple(x + (d if i == k else 0) for i, x in enumerate(g))
        th, _ = theta_at(gd, diagram, K, rng)
        if k not in element_support(extract_pointed(th, seed)):
            return d, predicted
    raise NotFound(f"property (S) not reached for d <= {d_max}", d_max)


# cluster-chamber mode ----------------------------------------------------------------

def theta_cluster_chamber(m, seed, max_depth, states=None):
    """Theta function of a degree in a reachable chamber, for any rank.

    There it is the localized cluster monomial of the seed whose g-vector cone
    contains ``m``. Returns ``(element, word)``; raises NotFound when no seed
    within ``max_depth`` has ``m`` in its cone.
    """
    from .expansion import exchange_graph
    from .freezing import _localized_exponent
    from .expansion import cluster_monomial
    if states is None:
        graph = exchange_graph(seed, max_depth)
        states = [graph.states[k] for k in graph.order]
    cache = {}
    for st in states:
        a = _localized_exponent(st, tuple(m), cache)
        if a is not None:
            return cluster_monomial(st, a).at_one(), st.word
    raise NotFound(f"{tuple(m)} is not in a chamber reachable within depth {max_depth}", max_depth)


def monotone_bends(line, seed):
    """Bend degrees ``n^(i)`` are nonnegative and nondecreasing along the line."""
    prev = None
    for n in line.bend_degrees(seed):
        if n is None or any(not isinstance(x, int) or x < 0 for x in n):
            return False
        if prev is not None and any(a < b for a, b in zip(n, prev)):
            return False
        prev = n
    return True


__all__ = ["BrokenLine", "enumerate_broken_lines", "theta", "theta_at", "generic_point",
           "freeze_theta_check", "property_s_search", "predicted_shift",
           "theta_cluster_chamber", "monotone_bends"]
