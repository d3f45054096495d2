import pytest

from clustersim import indices as ix
from clustersim import inconsistency as inc
from clustersim.partitions import Partition, write_partition

from conftest import P

A = P({0, 1}, {2}, {3})
B = P({0, 1}, {2, 3})
C = P({0}, {1}, {2, 3})


def test_preference():
    assert inc.preference("rand", 0.9, 0.8) == 1
    assert inc.preference("vi", 0.9, 0.8) == -1
    assert inc.preference("rand", 0.5, 0.5) == 0
    assert inc.preference("rand", float("nan"), 0.5) is None


def test_consistent_on_reference_triplet():
    rec = inc.analyze_triplet(A, B, C, ["adjusted_rand", "correlation_coefficient"])
    assert rec.verdicts[("adjusted_rand", "correlation_coefficient")] == "consistent"
    ar_b, ar_c = rec.scores["adjusted_rand"]
    assert ar_b > ar_c


def test_identical_candidates_tie():
    rec = inc.analyze_triplet(A, B, B, ix.COVER_IDS)
    assert set(rec.verdicts.values()) == {"tie"}
    tallies = inc.inconsistency_matrix([rec], ix.COVER_IDS)
    assert all(t.percent is None for t in tallies.values())


def test_matrix_symmetric():
    recs = [inc.analyze_triplet(A, B, C, ix.COVER_IDS), inc.analyze_triplet(B, A, C, ix.COVER_IDS)]
    m = inc.inconsistency_matrix(recs, ix.COVER_IDS)
    for (i, j), t in m.items():
        assert m[(j, i)] is t


def test_manifest(tmp_path):
    for name, p in (("a", A), ("b", B), ("c", C)):
        write_partition(p, tmp_path / f"{name}.txt")
    (tmp_path / "m.txt").write_text("# triplets\na.txt b.txt c.txt\n")
    assert inc.read_manifest(tmp_path / "m.txt") == [(A, B, C)]
    (tmp_path / "bad.txt").write_text("a.txt b.txt\n")
    with pytest.raises(ValueError):
        inc.read_manifest(tmp_path / "bad.txt")
    write_partition(Partition((0, 0)), tmp_path / "short.txt")
    (tmp_path / "mix.txt").write_text("a.txt b.txt short.txt\n")
    with pytest.raises(ValueError):
        inc.read_manifest(tmp_path / "mix.txt")


def test_nmi_pair_needs_one_triplet():
    res = inc.find_inconsistency_cover(["nmi", "nmi_max"], n_max=6, budget_seconds=60)
    assert res.complete and len(res.triplets) == 1
    assert inc.verify_cover(res)


def test_equivalent_pair_is_unorderable():
    res = inc.find_inconsistency_cover(["rand", "hubert"], n_max=5, budget_seconds=30)
    assert res.unorderable == [("rand", "hubert")]
    assert res.triplets == [] and res.complete


def test_small_cover_is_self_certifying():
    ids = ["nmi", "rand", "adjusted_rand", "jaccard", "fmeasure"]
    res = inc.find_inconsistency_cover(ids, n_max=6, budget_seconds=60, seed=2)
    assert res.complete
    assert inc.verify_cover(res)
    seen = set()
    for t in res.triplets:
        seen |= inc.analyze_triplet(*t, ids).inconsistent_pairs()
    assert seen >= res.covered
