"""Laurent expansions of cluster variables and related combinatorics.

A ``SeedState`` records a seed ``t`` reached from the initial seed ``t0``
together with the cluster variables of ``t`` written in the torus of ``t0``.
Quantum products of non-commuting variables use normalized monomials:
``X^a = v^{-sum_{i<j} a_i a_j lambda_t(f_i, f_j)} X_1^{a_1} * ... * X_n^{a_n}``.
"""

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

from . import linalg
from .errors import BadWord, FrozenMutation, NotFound, TheoremViolation
from .pointed import extract_pointed
from .ring import LaurentElement, exact_div, inverse_monomial, power, twisted_mul
from .seed import mutate_seed


def _pos(x):
    return x if x > 0 else 0


@lru_cache(maxsize=None)
def _var_power(var, e, lam):
    if e >= 0:
        return power(var, e, lam)
    return power(inverse_monomial(var), -e, lam)


@lru_cache(maxsize=500000)
def normalized_monomial(variables, a, lam_target, lam_source):
    """Normalized monomial ``X^a`` of ``variables`` in the target torus.

    ``lam_source`` is the quantization matrix of the seed owning the
    variables, ``lam_target`` that of the torus they are written in.
    Negative exponents are only allowed on monomial variables.
    """
    dim = variables[0].dim
    out = LaurentElement.one(dim)
    for var, e in zip(variables, a):
        if e:
            out = twisted_mul(out, _var_power(var, e, lam_target), lam_target)
    if lam_source is not None:
        shift = 0
        for i in range(len(a)):
            if a[i]:
                for j in range(i + 1, len(a)):
                    shift += a[i] * a[j] * lam_source[i][j]
        out = out.vshift(-shift)
    return out


def substitute(z, variables, lam_target, source_seed):
    """Rewrite ``z``, given in the torus of ``source_seed``, in a target torus.

    ``variables`` are the source seed's cluster variables in the target
    torus. Negative unfrozen exponents are cleared by multiplying with a
    cluster monomial first and dividing it out exactly afterwards.
    """
    variables = tuple(variables)
    lam_s = source_seed.lam if lam_target is not None else None
    n = source_seed.n
    clear = [0] * n
    for e in z.support():
        for i in source_seed.unfrozen:
            if e[i] < 0:
                clear[i] = max(clear[i], -e[i])
    clear = tuple(clear)
    if any(clear):
        shifted = twisted_mul(z, LaurentElement.monomial(clear), lam_s)
    else:
        shifted = z
    total = LaurentElement.zero(variables[0].dim)
    for (e, k), c in sorted(shifted.flat_items()):
        term = normalized_monomial(variables, e, lam_target, lam_s)
        total = total + term.vshift(k).scale(c)
    if not any(clear):
        return total
    denom = normalized_monomial(variables, clear, lam_target, lam_s)
    return exact_div(total, denom, lam_target)


class SeedState:
    """A seed reached from ``init`` with its variables in the initial torus."""

    __slots__ = ("init", "seed", "vars", "C", "word", "_key")

    def __init__(self, init, seed, variables, C, word):
        self.init = init
        self.seed = seed
        self.vars = tuple(variables)
        self.C = tuple(tuple(r) for r in C)
        self.word = tuple(word)
        self._key = None

    @property
    def lam0(self):
        return self.init.lam

    def key(self):
        """Canonical form: sorted unfrozen g-vectors and the matching B rows."""
        if self._key is None:
            uf = self.seed.unfrozen
            gs = {k: g_vector(self, k) for k in uf}
            order = sorted(uf, key=lambda k: gs[k])
            perm = order + list(self.seed.frozen)
            B = tuple(tuple(self.seed.B[i][j] for j in perm) for i in perm)
            self._key = (tuple(gs[k] for k in order), B)
        return self._key

    def __repr__(self):
        return f"SeedState(word={[k + 1 for k in self.word]})"


def initial_state(seed):
    n = seed.n
    variables = [LaurentElement.monomial(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)]
    r = seed.rank
    C = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    return SeedState(seed, seed, variables, C, ())


_MUTATION_CACHE = {}


def _exchange_numerator(state, k):
    seed = state.seed
    lam0 = state.lam0
    col = seed.pstar(k)
    a_plus = tuple(_pos(x) for x in col)
    a_minus = tuple(_pos(-x) for x in col)
    parts = []
    for a in (a_plus, a_minus):
        mono = normalized_monomial(state.vars, a, lam0, seed.lam if lam0 is not None else None)
        if lam0 is not None:
            tw = sum(seed.lam[k][j] * a[j] for j in range(seed.n))
            mono = mono.vshift(-tw)
        parts.append(mono)
    return parts[0] + parts[1]


def _check_positive(var, seed):
    skew = all(seed.B[i][j] == -seed.B[j][i] for i in seed.unfrozen for j in seed.unfrozen)
    if skew:
        bad = [c for _, c in var.flat_items() if c < 0]
    else:
        bad = [c for e, c in var.at_one().terms().items() if c.at_one() < 0]
    if bad:
        raise TheoremViolation(f"negative coefficient in a cluster variable: {var}")


def mutate_state(state, k):
    """Mutate at the unfrozen vertex ``k`` (0-based); results are memoized."""
    if k not in state.seed.unfrozen:
        raise FrozenMutation(f"vertex {k + 1} is frozen")
    key = (state.init, state.seed, state.vars, k)
    hit = _MUTATION_CACHE.get(key)
    if hit is not None:
        new_seed, new_vars, new_C = hit
        return SeedState(state.init, new_seed, new_vars, new_C, state.word + (k,))
    numerator = _exchange_numerator(state, k)
    new_var = exact_div(numerator, state.vars[k], state.lam0)
    _check_positive(new_var, state.init)
    new_vars = list(state.vars)
    new_vars[k] = new_var
    new_seed = mutate_seed(state.seed, k)
    new_C = _mutate_c(state.C, state.seed, k)
    _MUTATION_CACHE[key] = (new_seed, tuple(new_vars), new_C)
    return SeedState(state.init, new_seed, new_vars, new_C, state.word + (k,))


def run_word(seed_or_state, word):
    state = seed_or_state if isinstance(seed_or_state, SeedState) else initial_state(seed_or_state)
    for k in word:
        state = mutate_state(state, k)
    return state


def clear_cache():
    _MUTATION_CACHE.clear()
    normalized_monomial.cache_clear()
    _var_power.cache_clear()


# g-vectors, F-polynomials, c-vectors --------------------------------------------

def pointed_var(state, i):
    return extract_pointed(state.vars[i], state.init)


def g_vector(state, i):
    return pointed_var(state, i).degree


def f_polynomial(state, i):
    return pointed_var(state, i).fpoly


def _mutate_c(C, seed, k):
    """``c'_j = -c_k`` if ``j = k`` else ``c_j + [eps b_kj]_+ c_k`` with ``eps = sign c_k``."""
    uf = seed.unfrozen
    pk = uf.index(k)
    r = len(uf)
    ck = [C[i][pk] for i in range(r)]
    eps = 1 if any(x > 0 for x in ck) else -1
    out = [list(row) for row in C]
    for pj, j in enumerate(uf):
        if j == k:
            for i in range(r):
                out[i][pj] = -ck[i]
        else:
            factor = _pos(eps * seed.B[k][j])
            if factor:
                for i in range(r):
                    out[i][pj] += factor * ck[i]
    for pj in range(r):
        col = [out[i][pj] for i in range(r)]
        if not any(col) or (any(x > 0 for x in col) and any(x < 0 for x in col)):
            raise TheoremViolation(f"c-vector {col} is not sign-coherent")
    return tuple(tuple(row) for row in out)


def c_matrix(state):
    return state.C


def c_vector(state, k):
    pk = state.seed.unfrozen.index(k)
    return tuple(row[pk] for row in state.C)


def pairing(seed, m, n):
    """``<m, n>`` for ``m`` in f-coordinates and ``n`` over the unfrozen vertices."""
    from fractions import Fraction
    return sum(Fraction(m[k] * x, seed.d[k]) for k, x in zip(seed.unfrozen, n))


# tropical and linear transformations ----------------------------------------------

def tropical_transform(m, seed, k):
    """``phi_{mu_k t, t}`` applied to ``m`` in the lattice of ``seed``."""
    if k not in seed.unfrozen:
        raise FrozenMutation(f"vertex {k + 1} is frozen")
    mk = m[k]
    out = []
    for i in range(seed.n):
        b = seed.B[i][k]
        if i == k:
            out.append(-mk)
        elif b >= 0:
            out.append(m[i] + b * _pos(mk))
        else:
            out.append(m[i] + b * _pos(-mk))
    return tuple(out)


def tropical_word(m, seed, word):
    for k in word:
        m = tropical_transform(m, seed, k)
        seed = mutate_seed(seed, k)
    return m


def connecting_word(word_from, word_to):
    """A word taking the seed at ``word_from`` to the seed at ``word_to``."""
    a, b = list(word_from), list(word_to)
    while a and b and a[0] == b[0]:
        a.pop(0)
        b.pop(0)
    return tuple(reversed(a)) + tuple(b)


def psi_linear(state_target, state_source):
    """Integer matrix of ``psi_{t',t}`` with columns ``deg^{t'} x_i(t)``."""
    word = connecting_word(state_target.word, state_source.word)
    st = run_word(state_target.seed, word)
    cols = [g_vector(st, i) for i in range(st.seed.n)]
    return linalg.transpose(cols)


def reverse_variables(state):
    """Variables of ``state.init`` written in the torus of ``state.seed``."""
    back = run_word(state.seed, tuple(reversed(state.word)))
    return back.vars


def express_in(z, state):
    """Rewrite ``z`` (in the initial torus) in the torus of ``state.seed``.

    Raises InexactDivision when ``z`` is not Laurent in that seed.
    """
    if not state.word:
        return z
    return substitute(z, reverse_variables(state), state.seed.lam if state.lam0 is not None else None,
                      state.init)


def pull_back(z, state):
    """Rewrite ``z`` given in the torus of ``state.seed`` in the initial torus."""
    if not state.word:
        return z
    return substitute(z, state.vars, state.lam0, state.seed)


def cluster_monomial(state, a):
    """Normalized (localized) cluster monomial of ``state`` in the initial torus."""
    lam0 = state.lam0
    return normalized_monomial(state.vars, tuple(a), lam0, state.seed.lam if lam0 is not None else None)


def is_laurent_in(z, state):
    from .errors import InexactDivision
    try:
        express_in(z, state)
        return True
    except InexactDivision:
        return False


# exchange graph ----------------------------------------------------------------

class ExchangeGraph:
    """Canonical seeds reached by BFS, with edges labelled by vertex."""

    def __init__(self, root):
        self.root = root
        self.states = {}
        self.order = []
        self.edges = set()
        self.complete = False

    def add(self, state):
        key = state.key()
        if key in self.states:
            return False
        self.states[key] = state
        self.order.append(key)
        return True

    def node_ids(self):
        return {key: idx for idx, key in enumerate(self.order)}

    def __len__(self):
        return len(self.states)

    def _id_edges(self, ids):
        return sorted((min(ids[a], ids[b]), max(ids[a], ids[b]), k) for a, b, k in self.edges)

    def to_dot(self):
        ids = self.node_ids()
        lines = ["graph exchange {"]
        for key in self.order:
            st = self.states[key]
            label = ",".join(str(k + 1) for k in st.word) or "t0"
            lines.append(f'  n{ids[key]} [label="{label}"];')
        for a, b, k in self._id_edges(ids):
            lines.append(f'  n{a} -- n{b} [label="{k + 1}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self):
        ids = self.node_ids()
        nodes = []
        for key in self.order:
            st = self.states[key]
            nodes.append({
                "id": ids[key],
                "word": [k + 1 for k in st.word],
                "g_vectors": [list(g_vector(st, k)) for k in st.seed.unfrozen],
                "C": [list(r) for r in st.C],
            })
        edges = [{"source": a, "target": b, "vertex": k + 1} for a, b, k in self._id_edges(ids)]
        return {"nodes": nodes, "edges": edges, "complete": self.complete}


def exchange_graph(seed, max_depth, threads=1):
    """Breadth-first search of the exchange graph up to ``max_depth``.

    Each level is expanded (optionally in a thread pool) and merged in a
    fixed order, so the result does not depend on scheduling.
    """
    root = initial_state(seed)
    graph = ExchangeGraph(root)
    graph.add(root)
    frontier = [root]
    depth = 0
    while frontier and depth < max_depth:
        tasks = [(st, k) for st in frontier for k in st.seed.unfrozen]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda t: mutate_state(*t), tasks))
        else:
            results = [mutate_state(st, k) for st, k in tasks]
        nxt = []
        for (st, k), new in zip(tasks, results):
            if graph.add(new):
                nxt.append(new)
            graph.edges.add(tuple(sorted((st.key(), new.key()))) + (k,))
        frontier = nxt
        depth += 1
    if not frontier:
        graph.complete = True
    else:
        # a finished graph has no new seeds one level further
        probe = [mutate_state(st, k) for st in frontier for k in st.seed.unfrozen]
        graph.complete = all(p.key() in graph.states for p in probe)
        if graph.complete:
            for st in frontier:
                for k in st.seed.unfrozen:
                    new = mutate_state(st, k)
                    graph.edges.add(tuple(sorted((st.key(), new.key()))) + (k,))
    # the same edge may be seen from both ends with permuted vertex labels
    best = {}
    for a, b, k in graph.edges:
        best[(a, b)] = min(k, best.get((a, b), k))
    graph.edges = {(a, b, k) for (a, b), k in best.items()}
    return graph


def injective_witness(state):
    """Permutation ``sigma`` with ``g_{sigma k}`` in ``-f_k + Z^{I_f}``, or None."""
    seed = state.seed
    uf = seed.unfrozen
    sigma = {}
    gs = {i: g_vector(state, i) for i in uf}
    for k in uf:
        target = tuple(-1 if j == k else 0 for j in uf)
        match = [i for i in uf if tuple(gs[i][j] for j in uf) == target and i not in sigma.values()]
        if not match:
            return None
        sigma[k] = min(match)
    return sigma


def find_injective_reachable(seed, max_depth):
    """Shortest word to a seed ``t0[1]``; raises NotFound after ``max_depth``."""
    root = initial_state(seed)
    if not seed.unfrozen:
        return (), {}
    seen = {root.key()}
    queue = deque([root])
    while queue:
        st = queue.popleft()
        sigma = injective_witness(st)
        if sigma is not None:
            return st.word, sigma
        if len(st.word) >= max_depth:
            continue
        for k in seed.unfrozen:
            new = mutate_state(st, k)
            if new.key() not in seen:
                seen.add(new.key())
                queue.append(new)
    raise NotFound(f"no injective-reachability witness within depth {max_depth}", max_depth)


def check_word(seed, word):
    for k in word:
        if k not in seed.unfrozen:
            raise BadWord(f"vertex {k + 1} is not unfrozen")
