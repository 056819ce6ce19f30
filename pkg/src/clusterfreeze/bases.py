"""Pointed sets, unitriangular transitions and bases of frozen seeds.

A pointed set is given lazily by a provider ``g -> s_g`` so that shifted
degrees such as ``g + d f_k`` are available outside the box under test.
All checks return plain report dicts in the format of ``freezing.report``.
"""

import random
from itertools import product

from .errors import NotFound, NotInSpan, NotPointed
from .expansion import cluster_monomial, exchange_graph
from .freezing import _localized_exponent, freeze_element, report
from .pointed import dominance_vector, element_support, extract_pointed, grading_value, supp_dim
from .ring import LaurentElement, VCoeff, pairing, twisted_mul
from .seed import freeze_seed


class PointedSet:
    """``{s_g}`` with ``s_g`` pointed at ``g``, produced on demand and cached."""

    def __init__(self, seed, provider, name="S", quantum=True):
        self.seed = seed
        self.provider = provider
        self.name = name
        self.quantum = quantum and seed.lam is not None
        self._cache = {}

    @property
    def lam(self):
        """The form used for products; None for classical sets."""
        return self.seed.lam if self.quantum else None

    def __getitem__(self, g):
        g = tuple(g)
        if g not in self._cache:
            self._cache[g] = self.provider(g)
        return self._cache[g]

    def pointed(self, g):
        p = extract_pointed(self[g], self.seed)
        if p.degree != tuple(g):
            raise NotPointed(f"element for {tuple(g)} is pointed at {p.degree}")
        return p

    def support(self, g):
        return element_support(self.pointed(g))

    def supp_dim(self, g):
        return supp_dim(self.pointed(g))

    @classmethod
    def from_dict(cls, seed, elements, name="S", quantum=True):
        elements = {tuple(g): z for g, z in elements.items()}

        def provider(g):
            if g not in elements:
                raise NotInSpan(f"degree {g} is not in the set")
            return elements[g]
        return cls(seed, provider, name, quantum)


def box(seed, r):
    """All degrees ``g`` with ``|g_i| <= r``, in lexicographic order."""
    return [g for g in product(range(-r, r + 1), repeat=seed.n)]


# standard pointed sets ------------------------------------------------------------

def cluster_monomial_set(seed, max_depth, quantum=True):
    """Localized cluster monomials of the seeds reachable within ``max_depth``."""
    graph = exchange_graph(seed, max_depth)
    states = [graph.states[k] for k in graph.order]
    inv_cache = {}

    def provider(g):
        for st in states:
            a = _localized_exponent(st, g, inv_cache)
            if a is not None:
                z = cluster_monomial(st, a)
                return z if quantum else z.at_one()
        raise NotFound(f"{g} is not in a chamber reachable within depth {max_depth}", max_depth)
    return PointedSet(seed, provider, "cluster", quantum)


def theta_set(diagram, K=None):
    """Theta functions of a rank-2 diagram at generic points of ``C^+``."""
    from .theta import theta_at

    def provider(g):
        th, _ = theta_at(g, diagram, K, random.Random(repr(g)))
        return th
    return PointedSet(diagram.seed, provider, "theta", quantum=False)


def shifted_set(S, n=None):
    """A second pointed set ``z_g = s_g + s_{g + p*n}`` for half of the degrees.

    Only degrees of even parity along one coordinate of ``p*n`` are modified
    and the shift flips the parity, so both transitions are finite:
    ``s_g = z_g - z_{g + p*n}``.
    """
    seed = S.seed
    n = n or tuple(1 if i == 0 else 0 for i in range(seed.rank))
    step = seed.pstar_vec(n)
    i = next(c for c, x in enumerate(step) if x)
    width = abs(step[i])

    def provider(g):
        if (g[i] // width) % 2:
            return S[g]
        return S[g] + S[tuple(a + b for a, b in zip(g, step))]
    return PointedSet(seed, provider, f"{S.name}+shift", S.quantum)


def corrupted_set(S, g_bad, extra):
    """Negative control: ``s_{g_bad}`` gets an extra (dominated) term ``x^extra``."""
    g_bad = tuple(g_bad)

    def provider(g):
        z = S[g]
        return z + LaurentElement.monomial(extra) if g == g_bad else z
    return PointedSet(S.seed, provider, f"{S.name}-corrupted", S.quantum)


# decompositions ---------------------------------------------------------------------

def _top_exponent(z, seed):
    exps = z.support()
    return max(exps, key=lambda e: (grading_value(seed, e), e))


def decompose(z, S, max_steps=5000, window=None):
    """Row ``{g: b_g}`` with ``z = sum b_g s_g``, by dominance-descending elimination.

    ``window = (top, bound)`` confines residual degrees to ``top + p*n`` with
    ``0 <= n <= bound``; leaving it raises NotInSpan instead of descending
    forever.
    """
    seed = S.seed
    row = {}
    rest = z
    for _ in range(max_steps):
        if rest.is_zero():
            return row
        g = _top_exponent(rest, seed)
        if window is not None:
            n = dominance_vector(g, window[0], seed)
            if n is None or any(not isinstance(x, int) or x < 0 or x > b
                                for x, b in zip(n, window[1])):
                raise NotInSpan(f"residual degree {g} leaves the window of the product")
        c = rest.coefficient(g)
        try:
            s = S[g]
        except (NotInSpan, NotFound) as exc:
            raise NotInSpan(f"residual degree {g} has no element: {exc}") from None
        rest = rest - s.scale(c)
        row[g] = row.get(g, VCoeff()) + c
    raise NotInSpan(f"elimination did not terminate within {max_steps} steps")


def is_unitriangular(row, g, seed):
    """``row`` has coefficient 1 at ``g`` and every other degree strictly below ``g``."""
    g = tuple(g)
    if row.get(g) != VCoeff(1):
        return False
    for h, c in row.items():
        if h == g or c.is_zero():
            continue
        n = dominance_vector(h, g, seed)
        if n is None or any(not isinstance(x, int) or x < 0 for x in n) or not any(n):
            return False
    return True


def is_m_unitriangular(row, g, seed):
    """Unitriangular with off-diagonal coefficients in ``v^{-1} Z[v^{-1}]``."""
    if not is_unitriangular(row, g, seed):
        return False
    return all(all(k < 0 for k in c.terms) for h, c in row.items() if h != tuple(g))


def transition(Z, S, degrees):
    """Rows ``z_g = sum b_{g,g'} s_{g'}`` for ``g`` in ``degrees``."""
    return {tuple(g): decompose(Z[g], S) for g in degrees}


def product_row(S, g1, g2, max_steps=5000, window=None):
    """Decomposition of ``v^{-lambda(g1, g2)} s_{g1} * s_{g2}``."""
    lam = S.lam
    prod = twisted_mul(S[g1], S[g2], lam)
    if lam is not None:
        prod = prod.vshift(-pairing(lam, g1, g2))
    return decompose(prod, S, max_steps, window)


def _dim_leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def check_local_support(S, pairs, dims=True, max_steps=500):
    """Local support (and support dimensions) of products over ``pairs``."""
    seed = S.seed
    witnesses = []
    for g1, g2 in pairs:
        g1, g2 = tuple(g1), tuple(g2)
        total = tuple(a + b for a, b in zip(g1, g2))
        # every exponent of the product lies in total + p*[0, bound]
        bound = tuple(a + b for a, b in zip(S.supp_dim(g1), S.supp_dim(g2)))
        try:
            row = product_row(S, g1, g2, max_steps, (total, bound))
        except NotInSpan as exc:
            witnesses.append({"pair": [list(g1), list(g2)], "reason": str(exc)})
            continue
        if not is_unitriangular(row, total, seed):
            witnesses.append({"pair": [list(g1), list(g2)], "reason": "not unitriangular"})
            continue
        allowed = S.support(g1) | S.support(g2)
        for g, c in sorted(row.items()):
            if c.is_zero():
                continue
            if not S.support(g) <= allowed:
                witnesses.append({"pair": [list(g1), list(g2)], "degree": list(g),
                                  "reason": "support"})
            elif dims:
                sd = S.supp_dim(g)
                if not _dim_leq(sd, bound) or (g != total and sd == bound):
                    witnesses.append({"pair": [list(g1), list(g2)], "degree": list(g),
                                      "reason": "support dimension"})
    status = "verified" if not witnesses else "falsified"
    return report("local-support", {"set": S.name, "pairs": len(pairs)}, status, witnesses or None)


def check_local_transition(S, Z, degrees, dims=True):
    """``supp s_{g'} ⊆ supp z_g`` whenever ``b_{g,g'} != 0``."""
    witnesses = []
    for g in degrees:
        g = tuple(g)
        row = decompose(Z[g], S)
        sz = element_support(extract_pointed(Z[g], S.seed))
        dz = supp_dim(extract_pointed(Z[g], S.seed))
        for h, c in sorted(row.items()):
            if c.is_zero():
                continue
            if not S.support(h) <= sz:
                witnesses.append({"degree": list(g), "term": list(h), "reason": "support"})
            elif dims:
                sd = S.supp_dim(h)
                if not _dim_leq(sd, dz) or (h != g and sd == dz):
                    witnesses.append({"degree": list(g), "term": list(h),
                                      "reason": "support dimension"})
    status = "verified" if not witnesses else "falsified"
    return report("local-transition", {"from": Z.name, "to": S.name}, status, witnesses or None)


def positive_fast_path(S, pairs):
    """Nonnegative expansions and structure constants (sufficient for local support)."""
    for g1, g2 in pairs:
        for g in (g1, g2):
            if any(c < 0 for _, c in S[g].flat_items()):
                return False
        for c in product_row(S, g1, g2).values():
            if any(a < 0 for a in c.terms.values()):
                return False
    return True


# construction by freezing ------------------------------------------------------------

def basis_by_freezing(S, F):
    """``{frz_{F,g} s_g}`` as a pointed set of the frozen seed."""
    seed = S.seed
    F = frozenset(F)
    fseed = freeze_seed(seed, F)

    def provider(g):
        return freeze_element(S[g], F, seed, g)
    return PointedSet(fseed, provider, f"frz({S.name})", S.quantum)


def freeze_transport(z, S, F):
    """The linear map ``frz^S``: decompose over ``S`` and freeze each basis element."""
    row = decompose(z, S)
    fz = basis_by_freezing(S, F)
    out = LaurentElement.zero(S.seed.n)
    for g, c in sorted(row.items()):
        out = out + fz[g].scale(c)
    return out


def check_basis_independence(S, Z, F, degrees):
    """``frz^S A = frz^Z A`` on ``degrees``: each side decomposes over the other."""
    fs, fz = basis_by_freezing(S, F), basis_by_freezing(Z, F)
    witnesses = []
    for g in degrees:
        g = tuple(g)
        for a, b in ((fs, fz), (fz, fs)):
            try:
                row = decompose(a[g], b)
            except NotInSpan as exc:
                witnesses.append({"degree": list(g), "from": a.name, "error": str(exc)})
                continue
            if not is_unitriangular(row, g, a.seed):
                witnesses.append({"degree": list(g), "from": a.name, "reason": "not unitriangular"})
    status = "verified" if not witnesses else "falsified"
    instance = {"F": sorted(k + 1 for k in F), "sets": [S.name, Z.name], "box": len(degrees)}
    return report("basis-independence", instance, status, witnesses or None)


# construction by localization -----------------------------------------------------------

def _unit(n, j, d=1):
    return tuple(d if i == j else 0 for i in range(n))


def property_s_degree(S, g, k, d_max):
    """Smallest ``d <= d_max`` with ``k`` outside ``supp s_{g + d f_k}``."""
    for d in range(d_max + 1):
        gd = tuple(a + b for a, b in zip(g, _unit(S.seed.n, k, d)))
        if k not in S.support(gd):
            return d
    raise NotFound(f"property (S) not reached for {tuple(g)}, k={k + 1}, d <= {d_max}", d_max)


def localization_shift(S, g, F, d_max):
    """Per-coordinate minimal ``d_j`` (``j`` in ``F``) clearing ``F`` from the support."""
    n = S.seed.n
    d = {j: 0 for j in sorted(F)}
    while True:
        shift = tuple(sum(d[j] for j in d if j == i) for i in range(n))
        gd = tuple(a + b for a, b in zip(g, shift))
        bad = S.support(gd) & set(F)
        if not bad:
            return d
        for j in sorted(bad):
            d[j] += 1
            if d[j] > d_max:
                raise NotFound(f"property (S) not reached for {tuple(g)} within {d_max}", d_max)


def localized(S, g, d):
    """``x^{-sum d_j f_j} . s_{g + sum d_j f_j}`` (commutative product)."""
    n = S.seed.n
    shift = tuple(d.get(i, 0) for i in range(n))
    gd = tuple(a + b for a, b in zip(g, shift))
    return S[gd].shift(tuple(-x for x in shift))


def basis_by_localization(S, F, degrees, d_max):
    """Localized functions ``s'_g`` on ``degrees`` together with the shifts used.

    Each element is recomputed with every ``d_j`` raised by one; a mismatch
    raises ValueError since the result must not depend on the choice.
    """
    F = frozenset(F)
    seed = S.seed
    fseed = freeze_seed(seed, F)
    elements, shifts = {}, {}
    for g in degrees:
        g = tuple(g)
        d = localization_shift(S, g, F, d_max)
        z = localized(S, g, d)
        if any(d.values()):
            again = localized(S, g, {j: x + 1 for j, x in d.items()})
            if again != z:
                raise ValueError(f"localized function at {g} depends on the shift {d}")
        elements[g] = z
        shifts[g] = d
    return PointedSet.from_dict(fseed, elements, f"loc({S.name})", S.quantum), shifts


def compare_constructions(S, F, degrees, d_max):
    """``s'_g = frz_{F,g} s_g`` elementwise on ``degrees``."""
    loc, shifts = basis_by_localization(S, F, degrees, d_max)
    frz = basis_by_freezing(S, F)
    witnesses = []
    for g in degrees:
        g = tuple(g)
        if loc[g] != frz[g]:
            witnesses.append({"degree": list(g), "localized": str(loc[g]), "frozen": str(frz[g]),
                              "shift": {str(j + 1): x for j, x in shifts[g].items()}})
    status = "verified" if not witnesses else "falsified"
    instance = {"F": sorted(k + 1 for k in F), "set": S.name, "box": len(degrees)}
    return report("localization", instance, status, witnesses or None)


# factorization -------------------------------------------------------------------------

def _times_variable(S, j, g, d=1):
    """``v^{-lambda(d f_j, g)} x_j^d * z`` for the element ``S[g]``."""
    lam = S.lam
    fj = _unit(S.seed.n, j, d)
    prod = twisted_mul(LaurentElement.monomial(fj), S[g], lam)
    if lam is not None:
        prod = prod.vshift(-pairing(lam, fj, g))
    return prod


def check_factorization(S, direction, degrees):
    """``v^{-lambda(f_j, g)} x_j * s_g = s_{g+f_j}`` for ``j`` in ``direction``."""
    witnesses = []
    for g in degrees:
        g = tuple(g)
        for j in sorted(direction):
            lhs = _times_variable(S, j, g)
            gj = tuple(a + b for a, b in zip(g, _unit(S.seed.n, j)))
            if lhs != S[gj]:
                witnesses.append({"degree": list(g), "direction": j + 1})
    status = "verified" if not witnesses else "falsified"
    instance = {"set": S.name, "direction": sorted(j + 1 for j in direction)}
    return report("factorization", instance, status, witnesses or None)


def check_shift_product(S, k, degrees, d_max):
    """``s_{g+d f_k} = v^{-lambda(d f_k, g)} x_k^d * frz_{k} s_g`` once ``k`` leaves the support."""
    frz = basis_by_freezing(S, {k})
    witnesses = []
    checked = 0
    for g in degrees:
        g = tuple(g)
        d = property_s_degree(S, g, k, d_max)
        gd = tuple(a + b for a, b in zip(g, _unit(S.seed.n, k, d)))
        rhs = _times_variable(frz, k, g, d)
        checked += 1
        if rhs != S[gd]:
            witnesses.append({"degree": list(g), "d": d, "lhs": str(S[gd]), "rhs": str(rhs)})
    status = "verified" if not witnesses else "falsified"
    return report("shift-product", {"set": S.name, "k": k + 1, "checked": checked}, status,
                  witnesses or None)


def non_multiplicativity_example(seed, k=0):
    """Classical ``frz^S(x_k x_k')`` and ``frz^S(x_k) frz^S(x_k')`` for ``F = {k}``.

    ``S`` is the set of classical cluster monomials; returns the product and
    both sides.
    """
    from .expansion import initial_state, mutate_state
    S = cluster_monomial_set(seed, 2, quantum=False)
    root = initial_state(seed)
    x = root.vars[k].at_one()
    xp = mutate_state(root, k).vars[k].at_one()
    prod = twisted_mul(x, xp)
    F = {k}
    lhs = freeze_transport(prod, S, F)
    rhs = twisted_mul(freeze_transport(x, S, F), freeze_transport(xp, S, F))
    return prod, lhs, rhs
