import numpy as np
import pytest
from scipy import stats as sps

from clustersim.partitions import ClusterSizeSpec, Partition, enumerate_with_sizes, size_specs
from clustersim.sampling import (
    SeededGenerator,
    balanced_sizes,
    coupled_labels,
    sample_labels,
    sample_uniform_with_sizes,
)


def pair_keys(labels: np.ndarray) -> np.ndarray:
    """One integer per label row that identifies the partition (its co-membership bitmask)."""
    n = labels.shape[1]
    iu, ju = np.triu_indices(n, k=1)
    bits = (labels[:, iu] == labels[:, ju]).astype(np.int64)
    return bits @ (1 << np.arange(len(iu), dtype=np.int64))


def test_balanced_sizes():
    assert balanced_sizes(10, 3).sizes == (4, 3, 3)
    assert balanced_sizes(8, 4).sizes == (2, 2, 2, 2)
    assert balanced_sizes(5, 5).sizes == (1,) * 5
    with pytest.raises(ValueError):
        balanced_sizes(3, 4)


def test_degenerate_specs_are_deterministic():
    g = SeededGenerator(3)
    assert sample_uniform_with_sizes(ClusterSizeSpec((5,)), g) == Partition.one_cluster(5)
    assert sample_uniform_with_sizes(ClusterSizeSpec((1,) * 5), g) == Partition.singletons(5)


def test_three_way_frequencies():
    spec = ClusterSizeSpec((2, 1))
    keys = pair_keys(sample_labels(spec, SeededGenerator(0).rng(), 30000))
    _, counts = np.unique(keys, return_counts=True)
    assert len(counts) == 3
    assert np.all(np.abs(counts / 30000 - 1 / 3) < 0.01)


@pytest.mark.parametrize("n", range(2, 7))
def test_uniform_over_size_class(n):
    for i, spec in enumerate(size_specs(n)):
        exact = np.array([pair_keys(np.array([p.labels]))[0] for p in enumerate_with_sizes(spec)])
        draws = pair_keys(sample_labels(spec, SeededGenerator(n, (i,)).rng(), 100_000))
        assert set(np.unique(draws)) <= set(exact)
        if len(exact) == 1:
            continue
        counts = np.array([(draws == k).sum() for k in exact])
        assert sps.chisquare(counts).pvalue > 0.001, spec


def test_element_symmetry():
    # two fixed partitions of the same sizes are equally likely
    spec = ClusterSizeSpec((3, 2))
    keys = pair_keys(sample_labels(spec, SeededGenerator(1).rng(), 60000))
    b1 = pair_keys(np.array([Partition((0, 0, 0, 1, 1)).labels]))[0]
    b2 = pair_keys(np.array([Partition((0, 1, 1, 0, 1)).labels]))[0]
    c1, c2 = (keys == b1).sum(), (keys == b2).sum()
    assert sps.binomtest(int(c1), int(c1 + c2)).pvalue > 0.001


def test_coupled_marginals_uniform():
    specs = [ClusterSizeSpec((2, 2)), ClusterSizeSpec((3, 1))]
    draws = coupled_labels(specs, SeededGenerator(5).rng(), 60000)
    for spec, lab in zip(specs, draws):
        assert all(Partition(tuple(row)).sizes == spec.sizes for row in lab[:50])
        _, counts = np.unique(pair_keys(lab), return_counts=True)
        assert len(counts) == spec.count()
        assert sps.chisquare(counts).pvalue > 0.001


def test_streams_are_reproducible_and_distinct():
    g = SeededGenerator(7)
    a = g.spawn(1, 2).rng().integers(0, 2**32, 5)
    b = SeededGenerator(7).spawn(1, 2).rng().integers(0, 2**32, 5)
    c = g.spawn(1, 3).rng().integers(0, 2**32, 5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
