"""Order-truncated cluster scattering diagrams.

Everything lives in ``M_R = Q^I`` written in the basis ``f_i``; the pairing
with ``N_uf`` is ``<m, n> = sum_k m_k n_k / d_k``. A wall is stored as its
primitive normal ``n0``, a list of half-space bounds ``h . m >= 0`` cutting
the hyperplane ``n0^perp``, and a wall function ``f`` in ``y^{n0}``.

Group elements act on the torus by ``x^m -> x^m f^{<m, n0'>}`` where ``n0'``
generates ``R_{>=0} n0`` inside ``N° = sum_i Z d_i e_i``, so that the incoming
wall ``(e_k^perp, 1 + y_k)`` acts on ``x_k`` by ``x_k (1 + y_k)``.

Series in ``y`` are dicts ``{n: Fraction}`` truncated at total degree ``K``.
"""

import random
from fractions import Fraction
from math import gcd

from . import linalg
from .errors import BadBasePoint, NotFound, TheoremViolation, UnsupportedRank
from .expansion import c_vector, g_vector

ONE = Fraction(1)


# truncated power series -------------------------------------------------------

def s_one(r):
    return {(0,) * r: ONE}


def s_mul(a, b, K):
    out = {}
    for n1, c1 in a.items():
        d1 = sum(n1)
        for n2, c2 in b.items():
            if d1 + sum(n2) > K:
                continue
            n = tuple(x + y for x, y in zip(n1, n2))
            v = out.get(n, 0) + c1 * c2
            if v:
                out[n] = v
            else:
                out.pop(n, None)
    return out


def s_pow(f, e, K, r):
    """``f^e`` for integer ``e`` and ``f`` with constant term 1 (generalized binomial)."""
    zero = (0,) * r
    if f.get(zero) != 1:
        raise ValueError("series powers need constant term 1")
    if e == 0:
        return s_one(r)
    g = {n: c for n, c in f.items() if n != zero}
    out = s_one(r)
    term = s_one(r)
    binom = ONE
    j = 0
    while True:
        j += 1
        if j > K or (e > 0 and j > e):
            break
        term = s_mul(term, g, K)
        if not term:
            break
        binom = binom * (e - j + 1) / j
        for n, c in term.items():
            v = out.get(n, 0) + binom * c
            if v:
                out[n] = v
            else:
                out.pop(n, None)
    return out


def s_trunc(a, K):
    return {n: c for n, c in a.items() if sum(n) <= K and c}


def render_series(a, r):
    if not a:
        return "0"
    parts = []
    for n in sorted(a):
        c = linalg.normalize(a[n])
        mono = "*".join(f"y{k + 1}^{x}" if x > 1 else f"y{k + 1}" for k, x in enumerate(n) if x)
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts)


# pairings ---------------------------------------------------------------------

def pair(seed, m, n):
    """``<m, n>`` with ``n`` indexed by the unfrozen vertices in order."""
    return sum(Fraction(m[k]) * x / seed.d[k] for k, x in zip(seed.unfrozen, n))


def primitive(n):
    g = 0
    for x in n:
        g = gcd(g, abs(int(x)))
    if g == 0:
        raise ValueError("the zero vector has no primitive generator")
    return tuple(int(x) // g for x in n), g


def n0_scale(seed, n0):
    """``lam`` with ``lam * n0`` primitive in ``N°``."""
    lam = 1
    for k, x in zip(seed.unfrozen, n0):
        if x:
            dk = seed.d[k]
            need = dk // gcd(dk, abs(x))
            lam = lam * need // gcd(lam, need)
    return lam


def exponent_pair(seed, m, n0):
    """``<m, n0'>``, an integer for lattice ``m``."""
    return pair(seed, m, n0) * n0_scale(seed, n0)


# automorphisms ------------------------------------------------------------------

class Automorphism:
    """``x^{f_i} -> x^{f_i} S_i(y)``, truncated at y-degree ``K``."""

    __slots__ = ("seed", "K", "S")

    def __init__(self, seed, K, S):
        self.seed = seed
        self.K = K
        self.S = tuple(S)

    @classmethod
    def identity(cls, seed, K):
        r = seed.rank
        return cls(seed, K, [s_one(r) for _ in range(seed.n)])

    @classmethod
    def from_wall(cls, wall, eps, seed, K):
        r = seed.rank
        S = []
        for i in range(seed.n):
            e = eps * exponent_pair(seed, _unit(seed.n, i), wall.n0)
            S.append(s_pow(wall.fn, int(e), K, r) if e else s_one(r))
        return cls(seed, K, S)

    def factor(self, m):
        """The series ``Phi_m`` with ``x^m -> x^m Phi_m``."""
        r = self.seed.rank
        out = s_one(r)
        for i, e in enumerate(m):
            if e:
                out = s_mul(out, s_pow(self.S[i], e, self.K, r), self.K)
        return out

    def y_images(self):
        return [self.factor(self.seed.pstar(k)) for k in self.seed.unfrozen]

    def substitute(self, series):
        """``series(phi(y))`` where ``phi(y_k) = y_k Phi_{p*e_k}``."""
        K, r = self.K, self.seed.rank
        ys = self.y_images()
        powers = []
        for c, Yf in enumerate(ys):
            unit = tuple(1 if j == c else 0 for j in range(r))
            Y = s_mul({unit: ONE}, Yf, K)
            pw = [s_one(r)]
            for _ in range(K):
                pw.append(s_mul(pw[-1], Y, K))
            powers.append(pw)
        out = {}
        for n, c in series.items():
            if sum(n) > K:
                continue
            term = {(0,) * r: c}
            for k, x in enumerate(n):
                if x:
                    term = s_mul(term, powers[k][x], K)
            for key, v in term.items():
                val = out.get(key, 0) + v
                if val:
                    out[key] = val
                else:
                    out.pop(key, None)
        return out

    def then(self, after):
        """``after o self``: apply ``self`` first."""
        K = min(self.K, after.K)
        S = [s_mul(after.S[i], after.substitute(self.S[i]), K) for i in range(self.seed.n)]
        return Automorphism(self.seed, K, S)

    def is_identity(self):
        r = self.seed.rank
        return all(s == s_one(r) for s in self.S)

    def m_keyed(self):
        """Series re-keyed by ``p*n`` so that different seeds can be compared."""
        out = []
        for s in self.S:
            out.append({self.seed.pstar_vec(n): c for n, c in s.items()})
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.m_keyed() == other.m_keyed()

    def to_json(self):
        r = self.seed.rank
        return {self.seed.labels[i]: render_series(self.S[i], r) for i in range(self.seed.n)}


def _unit(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


# walls and diagrams -----------------------------------------------------------------

class Wall:
    """A wall ``{m : <m, n0> = 0, h . m >= 0 for h in bounds}`` with function ``fn``."""

    __slots__ = ("n0", "bounds", "fn", "generators")

    def __init__(self, n0, bounds, fn, generators):
        self.n0 = tuple(n0)
        self.bounds = [tuple(h) for h in bounds]
        self.fn = dict(fn)
        self.generators = [tuple(g) for g in generators]

    @property
    def incoming(self):
        return not self.bounds

    def to_json(self, seed):
        return {
            "normal": list(self.n0),
            "generators": [[str(linalg.normalize(x)) for x in g] for g in self.generators],
            "fn": {str(sum(n) // sum(self.n0)): str(linalg.normalize(c))
                   for n, c in sorted(self.fn.items()) if any(n)},
            "incoming": self.incoming,
        }


def _hyperplane_generators(seed, n0):
    """Generators (as a symmetric set) of ``n0^perp``."""
    n = seed.n
    normal = [Fraction(0)] * n
    for k, x in zip(seed.unfrozen, n0):
        normal[k] = Fraction(x, seed.d[k])
    pivot = next(i for i in range(n) if normal[i])
    gens = []
    for j in range(n):
        if j == pivot:
            continue
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        v[pivot] = -normal[j] / normal[pivot]
        gens.append(tuple(v))
        gens.append(tuple(-x for x in v))
    return gens


def incoming_wall(seed, k):
    r = seed.rank
    pos = seed.unfrozen.index(k)
    n0 = _unit(r, pos)
    return Wall(n0, [], {(0,) * r: ONE, n0: ONE}, _hyperplane_generators(seed, n0))


def _ray_direction(seed, n0):
    """Unfrozen projection of ``-p*n0``."""
    v = seed.pstar_vec(n0)
    return tuple(Fraction(-v[i]) if i in seed.unfrozen else Fraction(0) for i in range(seed.n))


def outgoing_wall(seed, n0, fn):
    ray = _ray_direction(seed, n0)
    if not any(ray):
        raise TheoremViolation(f"normal {n0} has no outgoing direction")
    gens = [ray]
    for j in seed.frozen:
        gens.append(_unit(seed.n, j))
        gens.append(tuple(-x for x in _unit(seed.n, j)))
    return Wall(n0, [ray], fn, [tuple(Fraction(x) for x in g) for g in gens])


class ScatteringDiagram:
    """Finitely many walls of a diagram truncated at order ``K``."""

    def __init__(self, seed, K, walls):
        self.seed = seed
        self.K = K
        self.walls = list(walls)

    def outgoing(self):
        return [w for w in self.walls if not w.incoming]

    def to_json(self):
        walls = sorted(self.walls, key=lambda w: (not w.incoming, w.n0))
        return {"order": self.K, "walls": [w.to_json(self.seed) for w in walls]}


# crossings and path-ordered products -------------------------------------------------

def _dot(h, m):
    return sum(a * b for a, b in zip(h, m))


def wall_hits(wall, seed, P, Q):
    """Crossings of segment ``P -> Q`` with ``wall`` as ``(s, point, eps)``.

    Raises BadBasePoint for non-generic incidences (tangency, crossing at a
    wall boundary or through a segment endpoint).
    """
    a = pair(seed, P, wall.n0)
    b = pair(seed, Q, wall.n0)
    if a == 0 and b == 0:
        if _in_wall(wall, P, strict=False) or _in_wall(wall, Q, strict=False):
            raise BadBasePoint("path runs inside a wall")
        return []
    if (a > 0 and b > 0) or (a < 0 and b < 0):
        return []
    s = a / (a - b)
    X = tuple(Fraction(p) + s * (Fraction(q) - Fraction(p)) for p, q in zip(P, Q))
    if not _in_wall(wall, X, strict=False):
        return []
    if not _in_wall(wall, X, strict=True):
        raise BadBasePoint(f"path meets the boundary of a wall at {X}")
    if s == 0 or s == 1:
        raise BadBasePoint(f"path vertex {X} lies on a wall")
    eps = 1 if a - b > 0 else -1
    return [(s, X, eps)]


def _in_wall(wall, X, strict):
    if strict:
        return all(_dot(h, X) > 0 for h in wall.bounds)
    return all(_dot(h, X) >= 0 for h in wall.bounds)


def crossings(diagram, path):
    """Time-ordered crossings ``(segment, s, point, wall, eps)`` of a polyline."""
    seed = diagram.seed
    out = []
    for idx in range(len(path) - 1):
        P, Q = path[idx], path[idx + 1]
        hits = []
        for wall in diagram.walls:
            for s, X, eps in wall_hits(wall, seed, P, Q):
                hits.append((s, X, wall, eps))
        hits.sort(key=lambda h: h[0])
        for i in range(1, len(hits)):
            if hits[i][0] == hits[i - 1][0] and hits[i][2].n0 != hits[i - 1][2].n0:
                raise BadBasePoint(f"path crosses walls with different normals at {hits[i][1]}")
        out.extend((idx, s, X, w, e) for s, X, w, e in hits)
    return out


def path_ordered_product(diagram, path, K=None):
    """Composite wall-crossing automorphism along a polyline, first crossing first."""
    K = diagram.K if K is None else K
    acc = Automorphism.identity(diagram.seed, K)
    for _, _, _, wall, eps in crossings(diagram, path):
        acc = acc.then(Automorphism.from_wall(wall, eps, diagram.seed, K))
    return acc


def wall_cross(series_m, m, wall, eps, seed, K):
    """Act on ``x^m * series`` by one wall; returns the new series factor."""
    auto = Automorphism.from_wall(wall, eps, seed, K)
    return s_mul(auto.factor(m), auto.substitute(series_m), K)


# rank-2 completion ------------------------------------------------------------------

def _embed(seed, u, frozen=None):
    """A point of ``M_R`` with unfrozen coordinates ``u``."""
    out = [Fraction(0)] * seed.n
    for k, x in zip(seed.unfrozen, u):
        out[k] = Fraction(x)
    if frozen is not None:
        for j, x in zip(seed.frozen, frozen):
            out[j] = Fraction(x)
    return tuple(out)


_PRIMES = (97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151)


def standard_loop(seed, shift=0):
    """A counterclockwise polygon around the joint of a rank-2 diagram."""
    p = _PRIMES[shift % len(_PRIMES)]
    q = _PRIMES[(shift + 3) % len(_PRIMES)]
    verts = [(Fraction(7), Fraction(3, p)), (Fraction(-5, q), Fraction(7)),
             (Fraction(-7), Fraction(-2, p)), (Fraction(4, q), Fraction(-7))]
    pts = [_embed(seed, v) for v in verts]
    return pts + [pts[0]]


def _pair_vec(seed, m, n0):
    return exponent_pair(seed, m, n0)


def complete_rank2(seed, K):
    """Consistent diagram with the incoming walls of ``seed``, up to order ``K``.

    Outgoing walls are added order by order so that the loop around the
    joint acts trivially modulo higher order.
    """
    r = seed.rank
    if r > 2:
        raise UnsupportedRank(f"completion is implemented for at most two unfrozen directions, got {r}")
    walls = [incoming_wall(seed, k) for k in seed.unfrozen]
    diagram = ScatteringDiagram(seed, K, walls)
    if r < 2:
        return diagram
    loop = None
    for shift in range(len(_PRIMES)):
        try:
            crossings(diagram, standard_loop(seed, shift))
            loop = standard_loop(seed, shift)
            break
        except BadBasePoint:
            continue
    out_walls = {}
    for order in range(2, K + 1):
        while True:
            diagram = ScatteringDiagram(seed, K, walls + list(out_walls.values()))
            try:
                auto = path_ordered_product(diagram, loop, order)
                break
            except BadBasePoint:
                loop = _resample_loop(seed, loop)
        defects = {}
        for i in range(seed.n):
            for n, c in auto.S[i].items():
                if sum(n) == order and c:
                    defects.setdefault(n, []).append((i, c))
                elif 0 < sum(n) < order and c:
                    raise TheoremViolation(f"loop defect at lower order {n}")
        for n in sorted(defects):
            n0, _ = primitive(n)
            if sum(1 for x in n0 if x) < 2:
                raise TheoremViolation(f"defect {n} along an incoming direction")
            wall = out_walls.get(n0)
            if wall is None:
                wall = outgoing_wall(seed, n0, s_one(r))
            hits = []
            for idx in range(len(loop) - 1):
                hits.extend(wall_hits(wall, seed, loop[idx], loop[idx + 1]))
            if len(hits) != 1:
                raise TheoremViolation(f"loop crosses the ray of {n0} {len(hits)} times")
            eps = hits[0][2]
            coeffs = set()
            for i, a in defects[n]:
                p = _pair_vec(seed, _unit(seed.n, i), n0)
                if p == 0:
                    raise TheoremViolation(f"defect in x_{i + 1} orthogonal to {n0}")
                coeffs.add(-Fraction(eps) * a / p)
            if len(coeffs) != 1:
                raise TheoremViolation(f"defect at {n} is not of wall type: {coeffs}")
            c = coeffs.pop()
            fn = s_mul(wall.fn, {(0,) * r: ONE, n: c}, K)
            out_walls[n0] = outgoing_wall(seed, n0, fn)
        diagram = ScatteringDiagram(seed, K, walls + list(out_walls.values()))
        if not path_ordered_product(diagram, loop, order).is_identity():
            raise TheoremViolation(f"completion failed to cancel the loop defect at order {order}")
    return ScatteringDiagram(seed, K, walls + [out_walls[k] for k in sorted(out_walls)])


def _resample_loop(seed, loop):
    rng = random.Random(len(loop))
    return sample_loop(seed, rng)


def _rand_rational(rng, lo, hi):
    p = rng.choice(_PRIMES)
    return Fraction(rng.randint(lo * p, hi * p), p)


def sample_loop(seed, rng, around=True):
    """A random closed polyline; with ``around`` it winds once around the joint."""
    quads = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
    start = rng.randrange(4)
    verts = []
    for i in range(4):
        sx, sy = quads[(start + i) % 4]
        for _ in range(rng.randint(1, 2)):
            u = (sx * _rand_rational(rng, 1, 9), sy * _rand_rational(rng, 1, 9))
            verts.append(u)
    if not around:
        cx, cy = _rand_rational(rng, 20, 30), _rand_rational(rng, 20, 30)
        verts = [(cx + x / 4, cy + y / 4) for x, y in verts]
    nf = len(seed.frozen)
    pts = [_embed(seed, u, [_rand_rational(rng, -3, 3) for _ in range(nf)]) for u in verts]
    return pts + [pts[0]]


def generic_loops(diagram, count, seed_value=0, around=True):
    """``count`` loops that are generic for ``diagram`` (re-sampled on collisions)."""
    rng = random.Random(seed_value)
    loops = []
    attempts = 0
    while len(loops) < count:
        attempts += 1
        if attempts > 50 * count:
            raise NotFound("could not sample generic loops")
        loop = sample_loop(diagram.seed, rng, around)
        try:
            crossings(diagram, loop)
        except BadBasePoint:
            continue
        loops.append(loop)
    return loops


def is_consistent(diagram, loops):
    return all(path_ordered_product(diagram, loop).is_identity() for loop in loops)


# pushforward, p_D and chambers -------------------------------------------------------

def freeze_pushforward(diagram, F):
    """Apply ``y^n -> 0`` for ``supp n`` meeting ``F`` to every wall function."""
    seed = diagram.seed
    F = set(F)
    walls = []
    for w in diagram.walls:
        fn = {n: c for n, c in w.fn.items() if not any(x and k in F for k, x in zip(seed.unfrozen, n))}
        if fn == s_one(seed.rank):
            continue
        walls.append(Wall(w.n0, w.bounds, fn, w.generators))
    return ScatteringDiagram(seed, diagram.K, walls)


def reindex_diagram(diagram, target_seed):
    """Rewrite a diagram of ``seed`` over the unfrozen set of ``target_seed``.

    Only valid when every wall normal is supported on that smaller set.
    """
    src = diagram.seed
    pos = [src.unfrozen.index(k) for k in target_seed.unfrozen]
    walls = []
    for w in diagram.walls:
        if any(x for c, x in enumerate(w.n0) if c not in pos):
            raise ValueError("wall normal leaves the target unfrozen set")
        n0 = tuple(w.n0[c] for c in pos)
        fn = {tuple(n[c] for c in pos): v for n, v in w.fn.items()}
        walls.append(Wall(n0, w.bounds, fn, w.generators))
    return ScatteringDiagram(target_seed, diagram.K, walls)


def plus_to_minus_path(seed):
    """A polyline from the interior of ``C^+`` to the interior of ``C^-``."""
    r = seed.rank
    if r == 2:
        verts = [(5, 1), (-1, 5), (-5, -1)]
    elif r == 1:
        verts = [(5,), (-5,)]
    elif r == 0:
        verts = [(), ()]
    else:
        verts = [tuple([5] * r), tuple([-5] * r)]
    frozen = [Fraction(1, 3)] * len(seed.frozen)
    return [_embed(seed, v, frozen) for v in verts]


def p_diagram(diagram, path=None):
    return path_ordered_product(diagram, path or plus_to_minus_path(diagram.seed))


class Chamber:
    """A cone given by generators, with its half-space description by c-vectors."""

    def __init__(self, seed, generators, normals, word):
        self.seed = seed
        self.generators = [tuple(g) for g in generators]
        self.normals = [tuple(c) for c in normals]
        self.word = tuple(word)

    def contains_point(self, m, strict=False):
        vals = [pair(self.seed, m, c) for c in self.normals]
        return all(v > 0 for v in vals) if strict else all(v >= 0 for v in vals)

    def contains(self, other):
        return all(self.contains_point(g) for g in other.generators)


def chamber_of_state(state):
    """Chamber of a seed from its g-vectors, cross-checked against its c-vectors."""
    seed = state.init
    gens = [g_vector(state, i) for i in range(seed.n)]
    gens += [tuple(-x for x in _unit(seed.n, j)) for j in seed.frozen]
    normals = [c_vector(state, k) for k in state.seed.unfrozen]
    for k, c in zip(state.seed.unfrozen, normals):
        for i in state.seed.unfrozen:
            v = pair(seed, gens[i], c)
            if (i == k and v <= 0) or (i != k and v != 0):
                raise TheoremViolation(f"g-vector cone and c-vector {c} disagree at seed {state.word}")
    return Chamber(seed, gens, normals, state.word)


def reachable_chambers(graph):
    return [chamber_of_state(graph.states[k]) for k in graph.order]


def svg_slice(diagram, path=None, size=400):
    """SVG sketch of the unfrozen-plane slice of a rank-2 diagram."""
    from .figures import diagram_svg
    return diagram_svg(diagram, size)
