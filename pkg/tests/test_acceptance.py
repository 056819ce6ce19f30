"""Acceptance suite: one test per criterion, each with its time budget.

Every test records a one-line verdict; the lines are printed at the end of
the pytest session (see ``conftest.py``) and when this file is run as a
script.
"""

import hashlib
import os
import random
import subprocess
import sys
import time
from itertools import combinations

import pytest

from clusterfreeze import bases, verify
from clusterfreeze.expansion import exchange_graph, g_vector, mutate_state, initial_state
from clusterfreeze.ring import LaurentElement
from clusterfreeze.scattering import (complete_rank2, freeze_pushforward, generic_loops,
                                      is_consistent, p_diagram)
from clusterfreeze.seed import freeze_seed, get_seed
from clusterfreeze.theta import freeze_theta_check, theta_at

RESULTS = {}


def record(number, ok, elapsed, budget, detail=""):
    ok = ok and elapsed < budget
    line = (f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  "
            f"{elapsed:7.2f}s / {budget:g}s  {detail}")
    RESULTS[number] = line
    print(line)
    return ok


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _subsets(seed):
    uf = seed.unfrozen
    return [set(c) for r in range(1, len(uf) + 1) for c in combinations(uf, r)]


def test_criterion_01_worked_example():
    with Timer() as t:
        checks, expected = verify.worked_example()
    ok = checks == expected
    assert record(1, ok, t.elapsed, 1.0, "x1' = x1^-1 + x1^-1 x2; frz x1' = x1^-1; "
                  "multiplicativity on sampled m, m'; frz^S(x1 x1') = 1 + x2 != 1"), checks


def test_criterion_02_laurent_positivity():
    details = []
    ok = True
    with Timer() as t:
        for name in ("A2", "A3", "kronecker"):
            seed = get_seed(name)
            r = verify.run("laurent-positivity", seed, verify.Options(depth=8))
            ok &= r["status"] == "verified"
            # independent pass over the same words: every coefficient is a
            # nonnegative integer polynomial in v^{+-1}
            states = {(): initial_state(seed)}
            for w in verify.mutation_words(seed, 8)[1:]:
                st = mutate_state(states[w[:-1]], w[-1])
                states[w] = st
                ok &= all(c >= 0 for z in st.vars for _, c in z.flat_items())
            details.append(f"{name}:{r['instance'].get('words')} words")
    assert record(2, ok, t.elapsed, 30.0, ", ".join(details))


def test_criterion_03_quantum_consistency():
    ok = True
    details = []
    with Timer() as t:
        for name in ("A2", "A3"):
            r = verify.run("quantum-consistency", get_seed(name), verify.Options(depth=8))
            ok &= r["status"] == "verified"
            details.append(f"{name}:{r['instance']['seeds']} seeds")
    assert record(3, ok, t.elapsed, 30.0, "bar-invariant, v=1 specialization, N_v = N_1; "
                  + ", ".join(details))


def test_criterion_04_exchange_graphs():
    with Timer() as t:
        a2 = exchange_graph(get_seed("A2"), 10)
        a3 = exchange_graph(get_seed("A3"), 10)
        ids = a2.node_ids()
        degree = {}
        for a, b, _ in a2._id_edges(ids):
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
        cycle = len(a2) == 5 and len(a2.edges) == 5 and set(degree.values()) == {2}
        # [DERIVED] 14 seeds: BFS with canonical deduplication, frozen as golden
        a3_ok = a3.complete and len(a3) == 14
        inj = all(verify.run("freeze-inj-reachable", get_seed(n),
                             verify.Options(depth=9))["status"] == "verified"
                  for n in ("A2", "A3"))
    ok = cycle and a3_ok and inj
    assert record(4, ok, t.elapsed, 60.0, f"A2 5-cycle={cycle}, A3 seeds={len(a3)}, "
                  f"injective-reachable under every freezing={inj}")


def test_criterion_05_freezing_cluster_monomials():
    seed = get_seed("A3")
    statuses, identified = [], []
    with Timer() as t:
        for F in ([0], [1], [2], [0, 2]):
            r = verify.run("freeze-cluster-monomial", seed,
                           verify.Options(freeze=F, depth=8, box=2))
            statuses.append(r["status"])
            identified.append(r["instance"]["identified"])
    ok = statuses == ["verified"] * 4 and identified == [5 ** 6] * 4
    assert record(5, ok, t.elapsed, 300.0, f"A3 box r=2, F in {{1}},{{2}},{{3}},{{1,3}}: "
                  f"{statuses}, identified {identified}")


def test_criterion_06_scattering_consistency():
    with Timer() as t:
        a2 = complete_rank2(get_seed("A2"), 8)
        out = a2.outgoing()
        one_wall = len(out) == 1 and out[0].fn == {(0, 0): 1, (1, 1): 1}
        a2_loops = is_consistent(a2, generic_loops(a2, 20))
        kr = complete_rank2(get_seed("kronecker"), 6)
        loops = generic_loops(kr, 20)
        kr_ok = len(loops) >= 20 and is_consistent(kr, loops)
    ok = one_wall and a2_loops and kr_ok
    assert record(6, ok, t.elapsed, 120.0, f"A2 K=8 single outgoing wall 1+y1y2={one_wall} "
                  f"(loop-trivial={a2_loops}); Kronecker K=6 on {len(loops)} loops={kr_ok}")


def test_criterion_07_pushforward():
    ok = True
    count = 0
    with Timer() as t:
        for name in ("A2", "kronecker"):
            seed = get_seed(name)
            D = complete_rank2(seed, 6)
            for F in _subsets(seed):
                pushed = p_diagram(freeze_pushforward(D, F))
                direct = p_diagram(complete_rank2(freeze_seed(seed, F), 6))
                ok &= pushed == direct
                count += 1
    assert record(7, ok, t.elapsed, 120.0, f"p_D agrees for {count} (seed, F) instances at K=6")


def test_criterion_08_theta_functions():
    rng = random.Random(8)
    with Timer() as t:
        D = complete_rank2(get_seed("A2"), 8)
        positive = []
        for _ in range(10):
            m = (rng.randint(0, 5), rng.randint(0, 5))
            th, _ = theta_at(m, D, rng=rng)
            positive.append(th == LaurentElement.monomial(m))
        graph = exchange_graph(get_seed("A2"), 8)
        chambers = []
        for key in graph.order:
            st = graph.states[key]
            for i in st.seed.unfrozen:
                th, _ = theta_at(g_vector(st, i), D, rng=rng)
                chambers.append(th == st.vars[i].at_one())
        frozen = []
        for _ in range(10):
            m = (rng.randint(-3, 3), rng.randint(-3, 3))
            F = rng.choice([{0}, {1}, {0, 1}])
            frozen.append(freeze_theta_check(m, F, D, rng=rng)[0])
    ok = all(positive) and all(chambers) and all(frozen)
    assert record(8, ok, t.elapsed, 120.0, f"theta_m = x^m on C+ {sum(positive)}/10; "
                  f"chamber g-vectors {sum(chambers)}/{len(chambers)}; "
                  f"frozen theta {sum(frozen)}/10")


def test_criterion_09_bases_on_boxes():
    seed = get_seed("A2")
    opts = verify.Options(box=2, depth=6, order=12, d_max=8)
    statuses = {}
    with Timer() as t:
        S = bases.cluster_monomial_set(seed, 6)
        Z = bases.shifted_set(S)
        degrees = bases.box(seed, 2)
        rows = bases.transition(Z, S, degrees)
        statuses["unitriangular"] = all(bases.is_unitriangular(r, g, seed) for g, r in rows.items())
        for theorem in ("local-support", "localization", "property-s"):
            statuses[theorem] = verify.run(theorem, seed, opts)["status"] == "verified"
    ok = all(statuses.values())
    assert record(9, ok, t.elapsed, 300.0, "A2 box r=2: " + ", ".join(
        f"{k}={v}" for k, v in statuses.items()))


ARTIFACTS = [
    ["verify", "worked-example", "ex4"],
    ["verify", "laurent-positivity", "kronecker", "--depth", "8"],
    ["verify", "quantum-consistency", "A3", "--depth", "8", "--threads", "{t}"],
    ["graph", "A3", "--depth", "8", "--threads", "{t}"],
    ["verify", "exchange-graph", "A3", "--depth", "8", "--threads", "{t}"],
    ["verify", "freeze-cluster-monomial", "A3", "--freeze", "1,3", "--depth", "8"],
    ["scatter", "A2", "--order", "8", "--check", "5"],
    ["scatter", "kronecker", "--order", "6", "--check", "5"],
    ["verify", "pushforward", "kronecker"],
    ["theta", "A2", "--m", "-2,1", "--lines", "--order", "8"],
    ["verify", "localization", "A2", "--box", "1"],
    ["report", "A2", "-o", "{out}", "--threads", "{t}"],
]


def _run_artifacts(tmp, threads, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    env.pop("CLUSTERFREEZE_CACHE", None)
    digests = []
    out_dir = os.path.join(tmp, f"report-{threads}-{hashseed}")
    for argv in ARTIFACTS:
        argv = [a.format(t=threads, out=out_dir) for a in argv]
        proc = subprocess.run([sys.executable, "-m", "clusterfreeze.cli", *argv],
                              capture_output=True, env=env)
        stdout = proc.stdout.replace(out_dir.encode(), b"<out>")
        digests.append(hashlib.sha256(stdout + bytes([proc.returncode])).hexdigest())
    for name in sorted(os.listdir(out_dir)):
        with open(os.path.join(out_dir, name), "rb") as fh:
            digests.append(hashlib.sha256(fh.read()).hexdigest())
    return digests


def test_criterion_10_determinism(tmp_path):
    with Timer() as t:
        a = _run_artifacts(str(tmp_path), 1, 0)
        b = _run_artifacts(str(tmp_path), 1, 12345)
        c = _run_artifacts(str(tmp_path), 4, 777)
    ok = a == b == c
    diff = [i for i, (x, y, z) in enumerate(zip(a, b, c)) if not x == y == z]
    assert record(10, ok, t.elapsed, 300.0, f"{len(a)} artifacts byte-identical across runs, "
                  f"hash seeds and --threads 1/4" + (f"; differing {diff}" if diff else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
