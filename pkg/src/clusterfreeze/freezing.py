"""Freezing operators and instance-level checks of their properties.

For a set ``F`` of unfrozen vertices and a degree ``m``, the operator
``frz_{F,m}`` keeps the terms ``x^{m + p*n}`` of an element with
``supp n`` disjoint from ``F`` and discards the rest.
"""

from collections import deque

from . import linalg
from .errors import BadFreeze, BadWord, DomainError, InexactDivision, NotFound, NotPointed
from .expansion import (cluster_monomial, express_in, find_injective_reachable, g_vector,
                        initial_state, mutate_state, pull_back, run_word, tropical_word)
from .pointed import dominance_vector, extract_pointed
from .ring import twisted_mul
from .seed import freeze_seed


class FreezeSpec:
    """A subset ``F`` of the unfrozen vertices of a seed and its complement ``R``."""

    __slots__ = ("F", "R", "seed", "_frozen")

    def __init__(self, seed, F):
        F = frozenset(F)
        if not F <= set(seed.unfrozen):
            bad = sorted(k + 1 for k in F - set(seed.unfrozen))
            raise BadFreeze(f"vertices {bad} are not unfrozen")
        self.seed = seed
        self.F = F
        self.R = tuple(k for k in seed.unfrozen if k not in F)
        self._frozen = None

    @property
    def frozen_seed(self):
        if self._frozen is None:
            self._frozen = freeze_seed(self.seed, self.F)
        return self._frozen

    def __repr__(self):
        return f"FreezeSpec(F={sorted(k + 1 for k in self.F)})"


def _kills(n, seed, F):
    return any(x and k in F for k, x in zip(seed.unfrozen, n))


def freeze_element(z, F, seed, m=None):
    """``frz_{F,m} z`` for ``z`` in the torus of ``seed``.

    ``m`` defaults to the degree of ``z``. Every exponent of ``z`` must be
    dominated by ``m``.
    """
    F = frozenset(F)
    if not F <= set(seed.unfrozen):
        raise BadFreeze("F must consist of unfrozen vertices")
    if m is None:
        m = extract_pointed(z, seed).degree if not z.is_zero() else (0,) * seed.n
    m = tuple(m)
    if not F:
        _check_dominated(z, seed, m)
        return z
    keep = {}
    for e in z.support():
        n = dominance_vector(e, m, seed)
        if n is None or any(not isinstance(x, int) or x < 0 for x in n):
            raise DomainError(f"exponent {e} is not dominated by {m}")
        keep[e] = not _kills(n, seed, F)
    return z.filter_exponents(lambda e: keep[e])


def _check_dominated(z, seed, m):
    for e in z.support():
        n = dominance_vector(e, m, seed)
        if n is None or any(not isinstance(x, int) or x < 0 for x in n):
            raise DomainError(f"exponent {e} is not dominated by {m}")


def freeze_pointed(p, F, m=None):
    """Freeze a PointedElement; the result is pointed in the frozen seed."""
    seed = p.seed
    out = freeze_element(p.element, F, seed, m if m is not None else p.degree)
    return extract_pointed(out, freeze_seed(seed, F))


def freeze_fpoly(fpoly, F, seed, reindex=False):
    """Send ``y^n`` to zero when ``supp n`` meets ``F``.

    With ``reindex`` the surviving keys are restricted to the coordinates of
    the remaining unfrozen vertices.
    """
    F = frozenset(F)
    out = {}
    keep_pos = [c for c, k in enumerate(seed.unfrozen) if k not in F]
    for n, c in fpoly.items():
        if _kills(n, seed, F):
            continue
        key = tuple(n[c] for c in keep_pos) if reindex else tuple(n)
        out[key] = c
    return out


def report(theorem, instance, status, witness=None):
    return {"theorem": theorem, "instance": instance, "status": status, "witness": witness}


# Lemma-level checks ----------------------------------------------------------------

def check_multiplicativity(z1, z2, F, seed, m1=None, m2=None):
    """``frz_{m1}(z1) * frz_{m2}(z2) = frz_{m1+m2}(z1 * z2)``; returns (ok, witness)."""
    lam = seed.lam
    m1 = m1 if m1 is not None else extract_pointed(z1, seed).degree
    m2 = m2 if m2 is not None else extract_pointed(z2, seed).degree
    lhs = twisted_mul(freeze_element(z1, F, seed, m1), freeze_element(z2, F, seed, m2), lam)
    m = tuple(a + b for a, b in zip(m1, m2))
    rhs = freeze_element(twisted_mul(z1, z2, lam), F, seed, m)
    if lhs == rhs:
        return True, None
    return False, {"lhs": str(lhs), "rhs": str(rhs)}


def freeze_commutes_with_mutation(z_t, word, F, seed):
    """Check ``mu^* frz_F z = frz_F mu^* z`` for ``z_t`` in the torus of ``word(seed)``.

    The left side freezes in the seed ``t`` and pulls back along the frozen
    seeds; the right side pulls back first and freezes in ``t0``.
    """
    F = frozenset(F)
    if any(k in F for k in word):
        raise BadWord("the mutation word must avoid the frozen set")
    state = run_word(seed, word)
    frozen_state = run_word(freeze_seed(seed, F), word)
    lhs = pull_back(freeze_element(z_t, F, state.seed), frozen_state)
    z0 = pull_back(z_t, state)
    rhs = freeze_element(z0, F, seed)
    return lhs == rhs, (None if lhs == rhs else {"lhs": str(lhs), "rhs": str(rhs)})


def degree_matrix(state):
    """Columns are the degrees of the variables of ``state`` in the initial seed."""
    return linalg.transpose([g_vector(state, i) for i in range(state.seed.n)])


def _localized_exponent(state, g, inv_cache=None):
    """Exponent ``a`` of the localized cluster monomial of ``state`` at degree ``g``, or None."""
    key = state.key()
    if inv_cache is not None and key in inv_cache:
        inv = inv_cache[key]
    else:
        inv = linalg.inverse(degree_matrix(state))
        if inv_cache is not None:
            inv_cache[key] = inv
    a = linalg.mat_vec(inv, g)
    if any(not isinstance(x, int) for x in a):
        return None
    if any(a[k] < 0 for k in state.seed.unfrozen):
        return None
    return a


def frozen_states(spec, max_depth):
    """All states of the frozen seed reachable by words over ``R`` (BFS order)."""
    root = initial_state(spec.frozen_seed)
    seen = {root.key(): root}
    queue = deque([root])
    while queue:
        st = queue.popleft()
        if len(st.word) >= max_depth:
            continue
        for k in spec.R:
            new = mutate_state(st, k)
            if new.key() not in seen:
                seen[new.key()] = new
                queue.append(new)
    return list(seen.values())


def identify_frozen_cluster_monomial(z, spec, max_depth, states=None, inv_cache=None):
    """Find a seed of ``frz_F t0`` in which ``frz_F z`` is a localized cluster monomial.

    Returns ``(word, exponent, frozen_value)``; raises NotFound when the
    bounded search fails (inconclusive).
    """
    seed = spec.seed
    fz = freeze_element(z, spec.F, seed)
    g = extract_pointed(fz, spec.frozen_seed).degree
    if states is None:
        states = frozen_states(spec, max_depth)
    for st in states:
        a = _localized_exponent(st, g, inv_cache)
        if a is None:
            continue
        if cluster_monomial(st, a) == fz:
            return st.word, a, fz
    raise NotFound(f"no localized cluster monomial found within depth {max_depth}", max_depth)


def reachability_reduction(target, spec, max_depth):
    """A word over ``R`` reaching the seed of ``target`` (up to permutation)."""
    seed = spec.seed
    tvars = set(target.vars)
    for j in spec.F:
        if initial_state(seed).vars[j] not in tvars:
            raise DomainError(f"x_{j + 1}(t0) is not a cluster variable of the target seed")
    goal = target.key()
    root = initial_state(seed)
    seen = {root.key()}
    queue = deque([root])
    while queue:
        st = queue.popleft()
        if st.key() == goal:
            return st.word
        if len(st.word) >= max_depth:
            continue
        for k in spec.R:
            new = mutate_state(st, k)
            if new.key() not in seen:
                seen.add(new.key())
                queue.append(new)
    raise NotFound(f"no word over the remaining vertices within depth {max_depth}", max_depth)


def check_freeze_inj_reachable(spec, max_depth):
    """If ``t0`` is injective-reachable within the bound, so is ``frz_F t0``."""
    instance = {"F": sorted(k + 1 for k in spec.F)}
    try:
        word0, _ = find_injective_reachable(spec.seed, max_depth)
    except NotFound:
        return report("freeze-inj-reachable", instance, "inconclusive", {"depth": max_depth})
    try:
        word1, sigma = find_injective_reachable(spec.frozen_seed, max_depth)
    except NotFound:
        return report("freeze-inj-reachable", instance, "inconclusive", {"depth": max_depth})
    witness = {"t0_word": [k + 1 for k in word0], "frozen_word": [k + 1 for k in word1],
               "sigma": {str(k + 1): v + 1 for k, v in sorted(sigma.items())}}
    return report("freeze-inj-reachable", instance, "verified", witness)


def check_upper_membership(z, spec, states):
    """``frz_F z`` is Laurent in every listed frozen seed."""
    fz = freeze_element(z, spec.F, spec.seed)
    for st in states:
        try:
            express_in(fz, st)
        except InexactDivision:
            return False, {"word": [k + 1 for k in st.word]}
    return True, None


def check_compatibly_pointed(z, spec, states):
    """``frz_F z`` is pointed in each frozen seed at the tropical image of its degree."""
    fz = freeze_element(z, spec.F, spec.seed)
    fseed = spec.frozen_seed
    g0 = extract_pointed(fz, fseed).degree
    for st in states:
        local = express_in(fz, st)
        expected = tropical_word(g0, fseed, st.word)
        try:
            got = extract_pointed(local, st.seed).degree
        except (NotPointed, InexactDivision) as exc:
            return False, {"word": [k + 1 for k in st.word], "error": str(exc)}
        if got != expected:
            return False, {"word": [k + 1 for k in st.word], "degree": list(got),
                           "expected": list(expected)}
    return True, None

