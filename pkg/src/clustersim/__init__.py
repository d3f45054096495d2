"""Cluster similarity indices and mechanical checks of their properties."""

from .indices import IndexScore, SamplingConfig, evaluate, index_registry, lookup, resolve_id, score_pair
from .partitions import Partition, contingency, enumerate_partitions, pair_counts, read_partition

__version__ = "0.1.0"

__all__ = [
    "IndexScore", "Partition", "SamplingConfig", "contingency", "enumerate_partitions", "evaluate",
    "index_registry", "lookup", "pair_counts", "read_partition", "resolve_id", "score_pair",
]
