"""Bias scans of expected scores against a fixed reference.

A scan sweeps a family of cluster-size specifications (``k`` balanced
clusters, or 31 clusters of size ``s`` plus one large cluster), draws random
candidates from each, and records the mean score with an empirical 90% band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import stats as sps

from . import indices as ix
from .partitions import ClusterSizeSpec, Partition, parse_partition_text
from .sampling import SeededGenerator, balanced_sizes, coupled_labels

FIXTURE_SEED = 924
FIXTURE_N = 924
FIXTURE_CLUSTERS = 431
FIXTURE_SINGLETONS = 305
SMALL_CLUSTERS = 31

SCAN_IDS = ("adjusted_rand", "correlation_coefficient", "sokal_sneath_1", "correlation_distance",
            "rand", "jaccard", "nmi", "vi")
K_VALUES = tuple(2 ** i for i in range(1, 10))
S_VALUES = tuple(range(1, 29))


def make_reference_fixture(seed: int = FIXTURE_SEED, n: int = FIXTURE_N, clusters: int = FIXTURE_CLUSTERS,
                           singletons: int = FIXTURE_SINGLETONS) -> Partition:
    """Synthetic reference: ``singletons`` one-element clusters plus clusters of size >= 2 filling up to ``n``."""
    big = clusters - singletons
    extra = n - singletons - 2 * big
    if big < 1 or extra < 0:
        raise ValueError("infeasible fixture shape")
    rng = SeededGenerator(seed).rng()
    sizes = 2 + rng.multinomial(extra, rng.dirichlet(np.ones(big)))
    spec = ClusterSizeSpec(tuple(int(s) for s in sizes) + (1,) * singletons)
    labels = rng.permutation(spec.block_labels())
    return Partition(tuple(labels.tolist()))


def load_reference_fixture() -> Partition:
    text = resources.files("clustersim").joinpath("data/reference_924.txt").read_text(encoding="utf-8")
    return parse_partition_text(text)


@dataclass
class ExperimentCurve:
    index_id: str
    sweep: str
    points: list
    mean: np.ndarray
    q05: np.ndarray
    q95: np.ndarray
    stderr: np.ndarray
    samples: int
    seed: int

    def rows(self):
        for i, x in enumerate(self.points):
            yield {
                "index": self.index_id, "sweep": self.sweep, "value": x,
                "mean": float(self.mean[i]), "q05": float(self.q05[i]), "q95": float(self.q95[i]),
                "stderr": float(self.stderr[i]), "samples": self.samples, "seed": self.seed,
            }

    def spread(self) -> float:
        return float(np.nanmax(self.mean) - np.nanmin(self.mean))

    def is_flat(self, n_stderr: float = 3.0) -> bool:
        """Means vary by less than ``n_stderr`` times the largest per-point standard error."""
        return self.spread() < n_stderr * float(np.nanmax(self.stderr))

    def trend(self, oriented: bool = False) -> float:
        """Spearman correlation between the sweep value and the mean score (raw, or oriented so larger is more similar)."""
        y = ix.oriented(self.index_id, self.mean) if oriented else self.mean
        return float(sps.spearmanr(self.points, y).statistic)


def scan(ref: Partition, specs: list[ClusterSizeSpec], points: list, sweep: str, ids=SCAN_IDS,
         samples: int = 200, seed: int = 0, moment_samples: int = 2000) -> list[ExperimentCurve]:
    """Score ``samples`` candidates per spec against ``ref``.

    All specs share one element permutation per sample (common random numbers),
    so differences between sweep points are not masked by independent noise.
    """
    ids = [ix.resolve_id(i) for i in ids]
    if any(s.n != ref.n for s in specs):
        raise ValueError("size specifications must match the reference size")
    g = SeededGenerator(seed)
    cfg = None
    if any(ix.lookup(i).needs_sampling for i in ids):
        cfg = ix.SamplingConfig(samples=moment_samples, seed=seed, mode="monte-carlo")
    draws = coupled_labels(specs, g.spawn(0).rng(), samples)
    values = {i: np.empty((len(specs), samples)) for i in ids}
    for p, labels in enumerate(draws):
        scores = ix.score_batch(ids, ref.array, labels, cfg)
        for i in ids:
            values[i][p] = scores[i]
    curves = []
    for i in ids:
        v = values[i]
        curves.append(ExperimentCurve(
            i, sweep, list(points), np.nanmean(v, axis=1),
            np.nanquantile(v, 0.05, axis=1), np.nanquantile(v, 0.95, axis=1),
            np.nanstd(v, axis=1, ddof=1) / math.sqrt(samples), samples, seed))
    return curves


def k_scan(ref: Partition, k_values=K_VALUES, ids=SCAN_IDS, samples: int = 200, seed: int = 0, **kw):
    for k in k_values:
        if not 1 <= k <= ref.n:
            raise ValueError(f"k={k} outside 1..{ref.n}")
    specs = [balanced_sizes(ref.n, k) for k in k_values]
    return scan(ref, specs, list(k_values), "k", ids, samples, seed, **kw)


def s_scan_spec(n: int, s: int, small: int = SMALL_CLUSTERS) -> ClusterSizeSpec:
    """``small`` clusters of size ``s`` plus one cluster holding the rest."""
    if s < 1 or small * s >= n:
        raise ValueError(f"s={s} infeasible: need 1 <= s and {small}*s < {n}")
    return ClusterSizeSpec((s,) * small + (n - small * s,))


def s_scan(ref: Partition, s_values=S_VALUES, ids=SCAN_IDS, samples: int = 200, seed: int = 0, **kw):
    specs = [s_scan_spec(ref.n, s) for s in s_values]
    return scan(ref, specs, list(s_values), "s", ids, samples, seed, **kw)
