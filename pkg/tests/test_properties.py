import itertools
import math
from collections import deque

import numpy as np
import pytest

from clustersim import indices as ix
from clustersim import properties as pr
from clustersim.partitions import (
    ClusterSizeSpec,
    Partition,
    enumerate_partitions,
    enumerate_with_sizes,
    is_consistent_improvement,
    perfect_merges,
    perfect_splits,
)

from conftest import P


def _assert_violated(v):
    assert v.verdict == pr.VIOLATED, v
    assert pr.recheck_witness(v), v.witness


class TestMaxAgreement:
    def test_rand(self):
        v = pr.check_max_agreement("rand", 6)
        assert v.verdict == pr.HOLDS and v.value == pytest.approx(1.0)

    def test_smi(self):
        _assert_violated(pr.check_max_agreement("smi", 4))

    def test_wallace(self):
        v = pr.check_max_agreement("wallace_1", 6)
        _assert_violated(v)


class TestMinAgreement:
    def test_adjusted_rand(self):
        _assert_violated(pr.check_min_agreement("adjusted_rand", 30))

    def test_cc(self):
        v = pr.check_min_agreement("correlation_coefficient", 30)
        assert v.verdict == pr.HOLDS and v.value == pytest.approx(-1.0)

    def test_jaccard(self):
        _assert_violated(pr.check_min_agreement("jaccard", 30))

    def test_general_index_is_rejected(self):
        with pytest.raises(ValueError):
            pr.check_min_agreement("nmi", 10)


class TestSymmetryDistance:
    @pytest.mark.parametrize("i", ["fnmi", "wallace_1"])
    def test_asymmetric(self, i):
        _assert_violated(pr.check_symmetry(i, 4))

    def test_vi_symmetric(self):
        assert pr.check_symmetry("vi", 5).verdict == pr.HOLDS

    def test_adjusted_rand_triangle(self):
        v = pr.check_distance("adjusted_rand", 4)
        _assert_violated(v)

    def test_cd_distance(self):
        assert pr.check_distance("correlation_distance", 5).verdict == pr.HOLDS

    def test_fmeasure_triangle(self):
        _assert_violated(pr.check_distance("fmeasure", 3))

    def test_known_triangle_violations(self):
        # A, B, C with 1 - V(A,C) > (1 - V(A,B)) + (1 - V(B,C)) for five indices
        a, b, c = P({0, 1}, {2}, {3}), P({0, 1}, {2, 3}), P({0}, {1}, {2, 3})
        cfg = ix.SamplingConfig(mode="exact")
        for i in ("adjusted_rand", "dice", "correlation_coefficient", "sokal_sneath_1", "ami"):
            s = lambda x, y: ix.evaluate(i, x, y, cfg).value
            top = ix.lookup(i).c_max
            assert top - s(a, c) > (top - s(a, b)) + (top - s(b, c)) + 1e-9, i


class TestMonotonicity:
    def test_fmeasure_merge(self):
        a = P({0, 1, 2, 3, 4, 5, 6})
        b = P({0, 1, 2, 3}, {4, 5}, {6})
        b2 = P({0, 1, 2, 3}, {4, 5, 6})
        assert b2 in perfect_merges(b, a)
        v1, v2 = (ix.evaluate("fmeasure", a, x).value for x in (b, b2))
        assert v1 == pytest.approx(v2, abs=1e-12)
        _assert_violated(pr.check_monotonicity("fmeasure", 5))

    def test_nmi_max(self):
        _assert_violated(pr.check_monotonicity("nmi_max", 4))

    def test_adjusted_rand_holds(self):
        assert pr.check_monotonicity("adjusted_rand", 6).verdict == pr.HOLDS

    def test_smi(self):
        _assert_violated(pr.check_monotonicity("smi", 4))

    def test_trivial_references_skipped(self):
        v = pr.check_monotonicity("wallace_1", 5)
        _assert_violated(v)
        a = Partition(tuple(int(x) for x in v.witness["a"].split(",")))
        assert 1 < a.k < a.n

    def test_strong(self):
        _assert_violated(pr.check_strong_monotonicity("jaccard", 20))
        v = pr.check_strong_monotonicity("adjusted_rand", 20)
        _assert_violated(v)
        assert pr.check_strong_monotonicity("correlation_coefficient", 20).verdict == pr.HOLDS


class TestBaselines:
    def test_exact_means(self):
        for n in (3, 4, 5):
            N = n * (n - 1) // 2
            spec = ClusterSizeSpec((2,) + (1,) * (n - 2))
            a = Partition(tuple(spec.block_labels().tolist()))
            assert pr.exact_class_mean("jaccard", a, spec) == pytest.approx(1 / N, abs=1e-9)
            assert pr.exact_class_mean("rand", a, spec) == pytest.approx(1 - 2 / N + 2 / N**2, abs=1e-9)

    def test_exact_mean_oracle(self):
        a = P({0, 1, 2}, {3, 4})
        spec = ClusterSizeSpec((2, 2, 1))
        vals = [ix.evaluate("nmi", a, b).value for b in enumerate_with_sizes(spec)]
        assert pr.exact_class_mean("nmi", a, spec) == pytest.approx(np.mean(vals), abs=1e-12)

    @pytest.mark.parametrize("i,c", [("adjusted_rand", 0.0), ("sokal_sneath_1", 0.5), ("correlation_coefficient", 0.0)])
    def test_constant(self, i, c):
        v = pr.check_constant_baseline_exact(i, 5)
        assert v.verdict == pr.HOLDS and v.value == pytest.approx(c, abs=1e-9)

    @pytest.mark.parametrize("i", ["jaccard", "rand", "correlation_distance"])
    def test_not_constant(self, i):
        _assert_violated(pr.check_constant_baseline_exact(i, 4))

    def test_asymptotic(self):
        v = pr.check_asymptotic_baseline("correlation_distance")
        assert v.verdict == pr.HOLDS and v.value == pytest.approx(0.5, abs=1e-9)
        assert pr.check_asymptotic_baseline("adjusted_rand").value == pytest.approx(0, abs=1e-9)
        _assert_violated(pr.check_asymptotic_baseline("rand"))


class TestBias:
    @pytest.mark.parametrize("i,label", [("rand", "both"), ("jaccard", "PairDec"), ("wallace_1", "PairDec"),
                                         ("dice", "PairDec"), ("adjusted_rand", "none"),
                                         ("correlation_coefficient", "none"), ("sokal_sneath_1", "none"),
                                         ("correlation_distance", "none")])
    def test_labels(self, i, label):
        assert pr.classify_bias(i).label == label

    def test_rand_flips_at_half(self):
        N = 1e4
        mb = np.array([0.5 * N])
        below = pr.substituted_derivative("rand", np.array([0.3 * N]), mb, N)
        above = pr.substituted_derivative("rand", np.array([0.7 * N]), mb, N)
        assert below[0] < 0 < above[0]

    def test_derivative_matches_closed_form(self):
        N = 100.0
        ma, mb = np.array([30.0]), np.array([40.0])
        # d/dm_B of 1 - (m_A+m_B)/N + 2 m_A m_B / N^2
        assert pr.substituted_derivative("rand", ma, mb, N)[0] == pytest.approx(-1 / N + 2 * 30 / N**2, rel=1e-6)


class TestPartitionSpace:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_neighbors_match_direct_construction(self, n):
        sp = pr.partition_space(n)
        for ai, a in enumerate(sp.partitions):
            merges, splits = sp.neighbors(ai)
            got_m = {(sp.partitions[b], sp.partitions[b2]) for b, b2 in zip(merges[0], merges[1])}
            got_s = {(sp.partitions[b], sp.partitions[b2]) for b, b2 in zip(splits[0], splits[1])}
            want_m = {(b, b2) for b in sp.partitions for b2 in perfect_merges(b, a)}
            want_s = {(b, b2) for b in sp.partitions for b2 in perfect_splits(b, a)}
            assert got_m == want_m and got_s == want_s

    def test_consistent_improvements(self):
        sp = pr.partition_space(4)
        for ai, bi in itertools.product(range(len(sp)), repeat=2):
            got = set(sp.consistent_improvements(ai, bi).tolist())
            a, b = sp.partitions[ai], sp.partitions[bi]
            want = {j for j, b2 in enumerate(sp.partitions) if is_consistent_improvement(a, b, b2)}
            assert got == want

    def test_matrix_matches_evaluate(self):
        sp = pr.partition_space(4)
        rng = np.random.default_rng(0)
        for i in ("rand", "nmi", "ami", "bcubed"):
            m = sp.index_matrix(i)
            for x, y in rng.integers(0, len(sp), (20, 2)):
                want = ix.evaluate(i, sp.partitions[x], sp.partitions[y], pr.EXACT).value
                assert m[x, y] == pytest.approx(want, abs=1e-12, nan_ok=True)

    def test_space_limit(self):
        with pytest.raises(ValueError):
            pr.PartitionSpace(9)


def reachable(a: Partition, b: Partition) -> set:
    seen, todo = {b}, deque([b])
    while todo:
        x = todo.popleft()
        for y in perfect_splits(x, a) + perfect_merges(x, a):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    seen.discard(b)
    return seen


@pytest.mark.parametrize("n", [2, 3, 4])
def test_improvement_equals_split_merge_closure(n):
    parts = list(enumerate_partitions(n))
    for a, b in itertools.product(parts, parts):
        closure = reachable(a, b)
        assert closure == {b2 for b2 in parts if is_consistent_improvement(a, b, b2)}


SMALL = pr.PropertyBudget(n_max=5, min_agreement_bound=40, strong_grid_bound=12)


class TestMatrixAndWitnesses:
    def test_cd_row(self):
        rows = {r.property: r for r in pr.property_matrix(["correlation_distance"], SMALL)}
        marks = {p: rows[p].mark for p in pr.TABLE2_PROPERTIES}
        assert marks == {"max_agreement": "✓", "min_agreement": "✓", "symmetry": "✓", "distance": "✓",
                         "linear_complexity": "✓", "monotonicity": "✓", "strong_monotonicity": "✓",
                         "constant_baseline_exact": "✗", "constant_baseline_asymptotic": "✓"}
        assert rows["bias"].mark == "none"

    def test_cc_and_ss_all_but_distance(self):
        for i in ("correlation_coefficient", "sokal_sneath_1"):
            for r in pr.property_matrix([i], SMALL):
                if r.property == "bias":
                    assert r.mark == "none"
                elif r.property == "distance":
                    assert r.mark == "✗"
                else:
                    assert r.mark == "✓", (i, r.property)

    def test_ami_row(self):
        rows = {r.property: r.mark for r in pr.property_matrix(["ami"])}
        assert rows == {"max_agreement": "✓", "symmetry": "✓", "distance": "✗", "linear_complexity": "✗",
                        "monotonicity": "✓", "constant_baseline_exact": "✓"}

    def test_errors_do_not_abort(self, monkeypatch):
        def boom(*a, **k):
            raise RuntimeError("synthetic failure")
        monkeypatch.setattr(pr, "linear_complexity", boom)
        rows = pr.property_matrix(["rand"], SMALL)
        errs = [r for r in rows if r.verdict == pr.ERROR]
        assert len(errs) == 1 and errs[0].property == "linear_complexity"
        assert len(rows) == len(pr.properties_for("rand"))

    def test_tampered_witness_is_rejected(self):
        v = pr.check_symmetry("fnmi", 4)
        fake = pr.PropertyVerdict(v.index_id, v.property, v.verdict, dict(v.witness, b=v.witness["a"]))
        assert not pr.recheck_witness(fake)
        v = pr.check_strong_monotonicity("jaccard", 10)
        fake = pr.PropertyVerdict("rand", v.property, v.verdict, v.witness)
        assert not pr.recheck_witness(fake)
