import numpy as np
import pytest

from clustersim import experiments as ex
from clustersim.partitions import Partition
from clustersim.sampling import balanced_sizes


@pytest.fixture(scope="module")
def ref():
    return ex.load_reference_fixture()


def test_fixture_shape(ref):
    assert ref.n == 924 and ref.k == 431
    assert sum(1 for s in ref.sizes if s == 1) == 305


def test_fixture_regenerates(ref):
    assert ex.make_reference_fixture() == ref


def test_fixture_rejects_infeasible_shape():
    with pytest.raises(ValueError):
        ex.make_reference_fixture(n=100, clusters=90, singletons=10)


def test_s_scan_spec():
    spec = ex.s_scan_spec(924, 1)
    assert spec.sizes == (924 - 31,) + (1,) * 31
    with pytest.raises(ValueError):
        ex.s_scan_spec(924, 30)


def test_k_scan_points(ref):
    curves = ex.k_scan(ref, (2, 924), ids=("ar", "jaccard"), samples=30, seed=1)
    assert [c.index_id for c in curves] == ["adjusted_rand", "jaccard"]
    for c in curves:
        assert c.points == [2, 924] and c.samples == 30
        assert np.all(c.q05 <= c.mean + 1e-15) and np.all(c.mean <= c.q95 + 1e-15)
        # k = n has a single possible candidate
        assert c.q05[1] == c.q95[1] and c.stderr[1] == 0
        rows = list(c.rows())
        assert set(rows[0]) == {"index", "sweep", "value", "mean", "q05", "q95", "stderr", "samples", "seed"}


def test_k_out_of_range(ref):
    with pytest.raises(ValueError):
        ex.k_scan(ref, (1000,))


def test_scan_is_seeded(ref):
    c1 = ex.k_scan(ref, (4, 16), ids=("rand",), samples=20, seed=3)[0]
    c2 = ex.k_scan(ref, (4, 16), ids=("rand",), samples=20, seed=3)[0]
    assert np.array_equal(c1.mean, c2.mean)


def test_small_reference_trends():
    ref = Partition(tuple(balanced_sizes(120, 12).block_labels().tolist()))
    curves = {c.index_id: c for c in ex.k_scan(ref, (2, 4, 8, 16, 32, 64), ids=("ar", "jaccard"), samples=100)}
    assert curves["jaccard"].trend() < -0.9
    assert curves["adjusted_rand"].is_flat()


def test_trend_orientation():
    c = ex.ExperimentCurve("vi", "k", [1, 2, 3], np.array([3.0, 2.0, 1.0]), np.zeros(3), np.zeros(3),
                           np.zeros(3), 1, 0)
    assert c.trend() == pytest.approx(-1)
    assert c.trend(oriented=True) == pytest.approx(1)
