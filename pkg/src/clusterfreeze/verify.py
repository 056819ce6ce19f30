"""Instance-level verification harnesses, addressed by stable theorem ids.

Every harness takes a seed and a :class:`Options` record and returns a
report ``{"theorem", "instance", "status", "witness"}`` with status one of
``verified``, ``falsified`` or ``inconclusive``.
"""

import random
from dataclasses import dataclass, field
from itertools import combinations

from . import bases
from .errors import (ClusterError, InexactDivision, NotFound, TheoremViolation,
                     UnsupportedRank)
from .expansion import (cluster_monomial, exchange_graph, express_in, initial_state,
                        is_laurent_in, mutate_state, pointed_var)
from .freezing import (FreezeSpec, check_compatibly_pointed, check_freeze_inj_reachable,
                       check_multiplicativity, freeze_commutes_with_mutation, freeze_element,
                       frozen_states, identify_frozen_cluster_monomial, reachability_reduction,
                       report)
from .pointed import fpoly_newton_points, newton_polytopes_equal
from .ring import render
from .seed import Seed, freeze_seed, get_seed

EXIT_CODES = {"verified": 0, "falsified": 1, "inconclusive": 2}


@dataclass
class Options:
    freeze: list = None
    depth: int = 6
    order: int = 6
    box: int = 1
    d_max: int = 8
    samples: int = 10
    threads: int = 1
    extra: dict = field(default_factory=dict)


def combine(theorem, instance, reports):
    """Merge sub-reports: any falsified wins, then any inconclusive."""
    statuses = [r["status"] for r in reports]
    if "falsified" in statuses:
        status = "falsified"
    elif "inconclusive" in statuses:
        status = "inconclusive"
    else:
        status = "verified"
    witness = [r for r in reports if r["status"] != "verified"] or None
    return report(theorem, dict(instance, checks=len(reports)), status, witness)


def freeze_sets(seed, opts):
    if opts.freeze is not None:
        return [frozenset(opts.freeze)]
    uf = seed.unfrozen
    return [frozenset(c) for r in range(1, len(uf) + 1) for c in combinations(uf, r)]


def _label(F):
    return sorted(k + 1 for k in F)


def mutation_words(seed, length):
    """All words of length at most ``length`` without immediate repetitions."""
    words = [()]
    frontier = [()]
    for _ in range(length):
        nxt = [w + (k,) for w in frontier for k in seed.unfrozen if not w or w[-1] != k]
        words.extend(nxt)
        frontier = nxt
    return words


def _box_degrees(seed, r):
    return bases.box(seed, r)


def _states(seed, depth, threads=1):
    graph = exchange_graph(seed, depth, threads)
    return graph, [graph.states[k] for k in graph.order]


# harnesses ------------------------------------------------------------------------

def v_freeze_cluster_monomial(seed, opts):
    """Frozen localized cluster monomials are localized cluster monomials."""
    S = bases.cluster_monomial_set(seed, opts.depth)
    degrees = _box_degrees(seed, opts.box)
    reports = []
    identified = 0
    for F in freeze_sets(seed, opts):
        spec = FreezeSpec(seed, F)
        states = frozen_states(spec, opts.depth)
        cache = {}
        found, missing, failures = 0, [], []
        for g in degrees:
            try:
                z = S[g]
            except NotFound:
                missing.append(list(g))
                continue
            try:
                identify_frozen_cluster_monomial(z, spec, opts.depth, states, cache)
                found += 1
            except NotFound:
                missing.append(list(g))
            except ClusterError as exc:
                failures.append({"degree": list(g), "error": str(exc)})
        status = "falsified" if failures else ("inconclusive" if missing else "verified")
        witness = {"identified": found, "missing": missing[:10], "failures": failures[:10]}
        identified += found
        reports.append(report("freeze-cluster-monomial", {"F": _label(F)}, status, witness))
    return combine("freeze-cluster-monomial",
                   {"box": opts.box, "depth": opts.depth, "identified": identified}, reports)


def _diagram(seed, K):
    from .scattering import complete_rank2
    return complete_rank2(seed, K)


def v_freeze_theta(seed, opts):
    """Frozen theta functions are theta functions of the pushforward diagram."""
    from .theta import freeze_theta_check
    D = _diagram(seed, opts.order)
    rng = random.Random(0)
    degrees = _box_degrees(seed, opts.box)
    reports = []
    for F in freeze_sets(seed, opts):
        bad = []
        for m in degrees:
            ok, witness = freeze_theta_check(m, F, D, rng=rng)
            if not ok:
                bad.append(dict(witness, m=list(m)))
        reports.append(report("freeze-theta", {"F": _label(F)},
                              "falsified" if bad else "verified", bad or None))
    return combine("freeze-theta", {"order": opts.order, "box": opts.box}, reports)


def v_pushforward(seed, opts):
    """Pushforward of the completed diagram equals the frozen seed's diagram."""
    from .scattering import freeze_pushforward, p_diagram
    D = _diagram(seed, opts.order)
    reports = []
    for F in freeze_sets(seed, opts):
        pushed = p_diagram(freeze_pushforward(D, F))
        direct = p_diagram(_diagram(freeze_seed(seed, F), opts.order))
        ok = pushed == direct
        witness = None if ok else {"pushforward": pushed.to_json(), "frozen": direct.to_json()}
        reports.append(report("pushforward", {"F": _label(F)}, "verified" if ok else "falsified",
                              witness))
    return combine("pushforward", {"order": opts.order}, reports)


def v_scattering_consistency(seed, opts):
    """Path-ordered products around sampled generic loops are trivial."""
    from .scattering import generic_loops, is_consistent
    D = _diagram(seed, opts.order)
    loops = generic_loops(D, max(opts.samples, 1), seed_value=0)
    local = generic_loops(D, max(opts.samples // 2, 1), seed_value=1, around=False)
    ok = is_consistent(D, loops) and is_consistent(D, local)
    witness = {"outgoing": [w.to_json(seed) for w in D.outgoing()], "loops": len(loops) + len(local)}
    return report("scattering-consistency", {"order": opts.order},
                  "verified" if ok else "falsified", witness)


def v_freeze_mutation(seed, opts):
    """Freezing commutes with mutations along words avoiding ``F``."""
    reports = []
    for F in freeze_sets(seed, opts):
        spec = FreezeSpec(seed, F)
        bad = []
        count = 0
        for st in frozen_states(spec, opts.depth):
            state = initial_state(seed)
            for k in st.word:
                state = mutate_state(state, k)
            for i in range(seed.n):
                z_t = express_in(initial_state(seed).vars[i], state)
                ok, witness = freeze_commutes_with_mutation(z_t, st.word, F, seed)
                count += 1
                if not ok:
                    bad.append(dict(witness, word=[k + 1 for k in st.word], var=i + 1))
        reports.append(report("freeze-mutation", {"F": _label(F), "checked": count},
                              "falsified" if bad else "verified", bad or None))
    return combine("freeze-mutation", {"depth": opts.depth}, reports)


def v_seed_reachability(seed, opts):
    """Seeds containing ``x_j(t0)`` for ``j`` in ``F`` are reachable avoiding ``F``."""
    _, states = _states(seed, opts.depth, opts.threads)
    reports = []
    for F in freeze_sets(seed, opts):
        spec = FreezeSpec(seed, F)
        root = initial_state(seed)
        targets = [st for st in states if all(root.vars[j] in st.vars for j in F)]
        missing = []
        for st in targets:
            try:
                reachability_reduction(st, spec, opts.depth)
            except NotFound:
                missing.append([k + 1 for k in st.word])
        reports.append(report("seed-reachability", {"F": _label(F), "targets": len(targets)},
                              "inconclusive" if missing else "verified", missing or None))
    return combine("seed-reachability", {"depth": opts.depth}, reports)


def v_freeze_inj_reachable(seed, opts):
    reports = [check_freeze_inj_reachable(FreezeSpec(seed, F), opts.depth)
               for F in freeze_sets(seed, opts)]
    return combine("freeze-inj-reachable", {"depth": opts.depth}, reports)


def v_compatibly_pointed(seed, opts):
    """Frozen cluster monomials are compatibly pointed at the frozen seeds."""
    S = bases.cluster_monomial_set(seed, opts.depth)
    degrees = _box_degrees(seed, opts.box)
    reports = []
    for F in freeze_sets(seed, opts):
        spec = FreezeSpec(seed, F)
        states = frozen_states(spec, opts.depth)
        bad = []
        for g in degrees:
            ok, witness = check_compatibly_pointed(S[g], spec, states)
            if not ok:
                bad.append(dict(witness, degree=list(g)))
        reports.append(report("compatibly-pointed", {"F": _label(F)},
                              "falsified" if bad else "verified", bad[:10] or None))
    return combine("compatibly-pointed", {"box": opts.box}, reports)


def _pointed_sets(seed, opts):
    sets = [bases.cluster_monomial_set(seed, opts.depth)]
    if seed.rank <= 2 and opts.extra.get("theta", True):
        sets.append(bases.theta_set(_diagram(seed, max(opts.order, 12))))
    return sets


def v_local_support(seed, opts):
    degrees = _box_degrees(seed, opts.box)
    pairs = [(a, b) for a in degrees for b in degrees]
    reports = []
    for S in _pointed_sets(seed, opts):
        reports.append(bases.check_local_support(S, pairs))
        reports.append(bases.check_local_transition(S, bases.shifted_set(S), degrees))
    return combine("local-support", {"box": opts.box}, reports)


def v_localization(seed, opts):
    """Localized functions equal frozen basis elements; the transport is basis independent."""
    degrees = _box_degrees(seed, opts.box)
    reports = []
    for S in _pointed_sets(seed, opts):
        for F in freeze_sets(seed, opts):
            try:
                reports.append(bases.compare_constructions(S, F, degrees, opts.d_max))
            except NotFound as exc:
                reports.append(report("localization", {"F": _label(F), "set": S.name},
                                      "inconclusive", {"error": str(exc)}))
            reports.append(bases.check_basis_independence(S, bases.shifted_set(S), F, degrees))
    return combine("localization", {"box": opts.box, "d_max": opts.d_max}, reports)


def v_property_s(seed, opts):
    """Shifting along ``f_k`` eventually removes ``k`` from the support."""
    degrees = _box_degrees(seed, opts.box)
    reports = []
    if seed.rank <= 2:
        from .theta import property_s_search
        D = _diagram(seed, max(opts.order, 12))
        bad, missing, found = [], [], []
        for g in degrees:
            for k in seed.unfrozen:
                try:
                    d, predicted = property_s_search(g, k, D, opts.d_max)
                except NotFound:
                    missing.append({"g": list(g), "k": k + 1})
                    continue
                found.append(d)
                if d > predicted:
                    bad.append({"g": list(g), "k": k + 1, "d": d, "predicted": predicted})
        status = "falsified" if bad else ("inconclusive" if missing else "verified")
        reports.append(report("property-s", {"set": "theta", "max_d": max(found, default=0)},
                              status, (bad + missing) or None))
    S = bases.cluster_monomial_set(seed, opts.depth)
    missing = []
    for g in degrees:
        for k in seed.unfrozen:
            try:
                bases.property_s_degree(S, g, k, opts.d_max)
            except NotFound:
                missing.append({"g": list(g), "k": k + 1})
    reports.append(report("property-s", {"set": "cluster"},
                          "inconclusive" if missing else "verified", missing or None))
    for k in seed.unfrozen:
        reports.append(bases.check_shift_product(S, k, degrees, opts.d_max))
    return combine("property-s", {"box": opts.box, "d_max": opts.d_max}, reports)


def v_starfish(seed, opts):
    """Cluster monomials are Laurent in the initial seed and all its neighbours."""
    S = bases.cluster_monomial_set(seed, opts.depth)
    root = initial_state(seed)
    neighbours = [mutate_state(root, k) for k in seed.unfrozen]
    bad = []
    degrees = _box_degrees(seed, opts.box)
    for g in degrees:
        z = S[g]
        for st in neighbours:
            if not is_laurent_in(z, st):
                bad.append({"degree": list(g), "neighbour": st.word[0] + 1})
    return report("starfish", {"box": opts.box, "elements": len(degrees)},
                  "falsified" if bad else "verified", bad or None)


def worked_example():
    """The rank-one example with one frozen vertex, reproduced exactly."""
    seed = get_seed("ex4")
    F = {0}
    root = initial_state(seed)
    x1p = mutate_state(root, 0).vars[0].at_one()
    checks = {}
    checks["x1'"] = render(x1p)
    checks["frz x1'"] = render(freeze_element(x1p, F, seed, (-1, 0)))
    S = bases.cluster_monomial_set(seed, 2, quantum=False)
    mult = []
    for m1 in bases.box(seed, 1):
        for m2 in bases.box(seed, 1):
            ok, _ = check_multiplicativity(S[m1], S[m2], F, Seed(seed.B, seed.unfrozen, seed.d),
                                           m1, m2)
            mult.append(ok)
    prod, lhs, rhs = bases.non_multiplicativity_example(seed)
    checks["x1 x1'"] = render(prod)
    checks["frzS(x1 x1')"] = render(lhs)
    checks["frzS(x1) frzS(x1')"] = render(rhs)
    checks["multiplicativity"] = all(mult)
    expected = {"x1'": "x^(-1,0) + x^(-1,1)", "frz x1'": "x^(-1,0)", "x1 x1'": "x^(0,0) + x^(0,1)",
                "frzS(x1 x1')": "x^(0,0) + x^(0,1)", "frzS(x1) frzS(x1')": "x^(0,0)",
                "multiplicativity": True}
    return checks, expected


def v_worked_example(seed, opts):
    checks, expected = worked_example()
    ok = checks == expected
    return report("worked-example", {"seed": "ex4", "F": [1]}, "verified" if ok else "falsified",
                  checks)


def v_laurent_positivity(seed, opts):
    """Every word up to the depth yields Laurent variables with nonnegative coefficients."""
    words = mutation_words(seed, opts.depth)
    count = 0
    try:
        states = {(): initial_state(seed)}
        for w in words[1:]:
            st = mutate_state(states[w[:-1]], w[-1])
            states[w] = st
            count += 1
    except TheoremViolation as exc:
        return report("laurent-positivity", {"depth": opts.depth}, "falsified", {"error": str(exc)})
    except InexactDivision as exc:
        return report("laurent-positivity", {"depth": opts.depth}, "falsified",
                      {"error": f"not Laurent: {exc}"})
    return report("laurent-positivity", {"depth": opts.depth, "words": count}, "verified", None)


def v_quantum_consistency(seed, opts):
    """Quantum variables are bar-invariant, specialize correctly and share Newton polytopes."""
    if seed.lam is None:
        return report("quantum-consistency", {}, "inconclusive", {"error": "classical seed"})
    classical = Seed(seed.B, seed.unfrozen, seed.d)
    _, states = _states(seed, opts.depth, opts.threads)
    bad = []
    for st in states:
        cl = initial_state(classical)
        for k in st.word:
            cl = mutate_state(cl, k)
        for i in st.seed.unfrozen:
            z = st.vars[i]
            if z.bar() != z:
                bad.append({"word": [k + 1 for k in st.word], "var": i + 1, "reason": "bar"})
            if z.at_one() != cl.vars[i]:
                bad.append({"word": [k + 1 for k in st.word], "var": i + 1, "reason": "v=1"})
            fp = pointed_var(st, i).fpoly
            if not newton_polytopes_equal(fpoly_newton_points(fp), fpoly_newton_points(fp, True)):
                bad.append({"word": [k + 1 for k in st.word], "var": i + 1, "reason": "newton"})
    return report("quantum-consistency", {"seeds": len(states)},
                  "falsified" if bad else "verified", bad or None)


def v_exchange_graph(seed, opts):
    graph, _ = _states(seed, opts.depth, opts.threads)
    witness = {"seeds": len(graph), "edges": len(graph.edges), "complete": graph.complete}
    return report("exchange-graph", {"depth": opts.depth},
                  "verified" if graph.complete else "inconclusive", witness)


REGISTRY = {
    "freeze-cluster-monomial": v_freeze_cluster_monomial,
    "freeze-theta": v_freeze_theta,
    "pushforward": v_pushforward,
    "scattering-consistency": v_scattering_consistency,
    "freeze-mutation": v_freeze_mutation,
    "seed-reachability": v_seed_reachability,
    "freeze-inj-reachable": v_freeze_inj_reachable,
    "compatibly-pointed": v_compatibly_pointed,
    "local-support": v_local_support,
    "localization": v_localization,
    "property-s": v_property_s,
    "starfish": v_starfish,
    "worked-example": v_worked_example,
    "laurent-positivity": v_laurent_positivity,
    "quantum-consistency": v_quantum_consistency,
    "exchange-graph": v_exchange_graph,
}


def run(theorem, seed, opts=None):
    opts = opts or Options()
    if theorem not in REGISTRY:
        raise KeyError(f"unknown theorem id {theorem!r}")
    try:
        return REGISTRY[theorem](seed, opts)
    except UnsupportedRank as exc:
        return report(theorem, {}, "inconclusive", {"error": str(exc)})
    except NotFound as exc:
        return report(theorem, {}, "inconclusive", {"error": str(exc)})
    except TheoremViolation as exc:
        return report(theorem, {}, "falsified", {"error": str(exc)})
