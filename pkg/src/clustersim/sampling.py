"""Seeded generation of element-symmetric random clusterings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partitions import ClusterSizeSpec, Partition


@dataclass(frozen=True)
class SeededGenerator:
    """Reproducible random stream identified by ``(seed, stream_id)``.

    Substreams are derived with :class:`numpy.random.SeedSequence` spawn keys,
    so ``spawn(i)`` is independent of how many draws the parent has made.
    """

    seed: int = 0
    stream_id: tuple[int, ...] = ()

    def spawn(self, *ids: int) -> "SeededGenerator":
        return SeededGenerator(self.seed, self.stream_id + tuple(int(i) for i in ids))

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=self.stream_id)
        return np.random.Generator(np.random.PCG64(seq))


def balanced_sizes(n: int, k: int) -> ClusterSizeSpec:
    """``k`` clusters whose sizes differ by at most one."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    small, big_count = divmod(n, k)
    return ClusterSizeSpec((small + 1,) * big_count + (small,) * (k - big_count))


def sample_labels(spec: ClusterSizeSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` label vectors, each a uniform permutation of the block labels of ``spec``."""
    base = spec.block_labels()
    return rng.permuted(np.broadcast_to(base, (size, spec.n)), axis=1)


def sample_uniform_with_sizes(spec: ClusterSizeSpec, g: SeededGenerator | np.random.Generator) -> Partition:
    """One draw from the uniform distribution over partitions with sizes ``spec``.

    Permuting a fixed label vector is uniform over set partitions because every
    partition with these sizes is hit by the same number of permutations.
    """
    rng = g.rng() if isinstance(g, SeededGenerator) else g
    return Partition(tuple(rng.permutation(spec.block_labels()).tolist()))


def coupled_labels(specs: list[ClusterSizeSpec], rng: np.random.Generator, size: int) -> list[np.ndarray]:
    """Draw ``size`` samples for each spec, sharing one element permutation per sample.

    Each marginal is uniform over its spec; sharing permutations across specs
    (common random numbers) makes differences between specs less noisy.
    """
    n = specs[0].n
    if any(s.n != n for s in specs):
        raise ValueError("all specs must share n")
    perms = np.argsort(rng.random((size, n)), axis=1)
    out = []
    for spec in specs:
        base = spec.block_labels()
        labels = np.empty((size, n), dtype=np.int64)
        np.put_along_axis(labels, perms, np.broadcast_to(base, (size, n)), axis=1)
        out.append(labels)
    return out
