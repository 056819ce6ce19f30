import pytest

from clusterfreeze import verify
from clusterfreeze.errors import TheoremViolation, UnsupportedRank
from clusterfreeze.freezing import report
from clusterfreeze.seed import get_seed


@pytest.mark.parametrize("theorem", sorted(verify.REGISTRY))
def test_every_harness_verifies_the_worked_example_seed(theorem):
    r = verify.run(theorem, get_seed("ex4"), verify.Options(depth=4, box=1, order=6))
    assert r["theorem"] == theorem
    assert r["status"] == "verified", r["witness"]


def test_rank_three_scattering_is_inconclusive():
    r = verify.run("scattering-consistency", get_seed("A3"), verify.Options())
    assert r["status"] == "inconclusive"
    assert "two unfrozen directions" in r["witness"]["error"]


def test_kronecker_imaginary_degrees_are_inconclusive():
    r = verify.run("freeze-cluster-monomial", get_seed("kronecker"), verify.Options(depth=3))
    assert r["status"] == "inconclusive"
    assert [-1, 1] in r["witness"][0]["witness"]["missing"]


def test_status_mapping(monkeypatch):
    def boom(seed, opts):
        raise TheoremViolation("negative coefficient")

    def unsupported(seed, opts):
        raise UnsupportedRank("rank 3")
    monkeypatch.setitem(verify.REGISTRY, "boom", boom)
    monkeypatch.setitem(verify.REGISTRY, "unsupported", unsupported)
    assert verify.run("boom", get_seed("A2"))["status"] == "falsified"
    assert verify.run("unsupported", get_seed("A2"))["status"] == "inconclusive"
    with pytest.raises(KeyError):
        verify.run("no-such-id", get_seed("A2"))


def test_combine_precedence():
    ok = report("t", {}, "verified")
    maybe = report("t", {}, "inconclusive", {"why": 1})
    bad = report("t", {}, "falsified", {"why": 2})
    assert verify.combine("t", {}, [ok, ok])["status"] == "verified"
    assert verify.combine("t", {}, [ok, maybe])["status"] == "inconclusive"
    r = verify.combine("t", {}, [maybe, bad, ok])
    assert r["status"] == "falsified" and r["instance"]["checks"] == 3 and len(r["witness"]) == 2


def test_mutation_words_avoid_repeats():
    words = verify.mutation_words(get_seed("A3"), 3)
    assert len(words) == 1 + 3 + 6 + 12
    assert all(a != b for w in words for a, b in zip(w, w[1:]))


def test_freeze_sets():
    seed = get_seed("A3")
    assert len(verify.freeze_sets(seed, verify.Options())) == 7
    assert verify.freeze_sets(seed, verify.Options(freeze=[0, 2])) == [frozenset({0, 2})]


def test_worked_example_values():
    checks, expected = verify.worked_example()
    assert checks == expected
