import numpy as np
import pytest
from hypothesis import strategies as st

from clustersim.partitions import Partition


def P(*clusters) -> Partition:
    """Partition from explicit clusters, e.g. ``P({0, 1}, {2})``."""
    return Partition.from_clusters(clusters)


def labels(n_min=1, n_max=12, k_max=None):
    """Hypothesis strategy for label vectors."""
    @st.composite
    def build(draw):
        n = draw(st.integers(n_min, n_max))
        k = draw(st.integers(1, k_max or n))
        return draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    return build()


@st.composite
def partition_pairs(draw, n_min=2, n_max=10):
    n = draw(st.integers(n_min, n_max))
    a = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    b = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return Partition(tuple(a)), Partition(tuple(b))


def brute_pair_counts(a: Partition, b: Partition):
    n11 = n10 = n01 = n00 = 0
    for i in range(a.n):
        for j in range(i + 1, a.n):
            sa = a.labels[i] == a.labels[j]
            sb = b.labels[i] == b.labels[j]
            n11 += sa and sb
            n10 += sa and not sb
            n01 += sb and not sa
            n00 += not sa and not sb
    return n11, n10, n01, n00


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
