"""Partitions of ``{0, ..., n-1}`` and the set-level machinery built on them.

A :class:`Partition` is stored as a canonical label vector: clusters are
numbered by order of first occurrence, so two label sequences describing the
same set partition compare (and hash) equal.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np

ENUMERATION_GUARD = 12


def _canonical(labels: Iterable[Hashable]) -> tuple[int, ...]:
    seen: dict = {}
    out = []
    for lab in labels:
        if lab not in seen:
            seen[lab] = len(seen)
        out.append(seen[lab])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    """Set partition given by one cluster label per element."""

    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("empty partition")
        object.__setattr__(self, "labels", _canonical(self.labels))

    @classmethod
    def from_clusters(cls, clusters: Iterable[Iterable[int]]) -> "Partition":
        """Build from explicit clusters, e.g. ``[[0, 1], [2], [3]]``."""
        assignment: dict[int, int] = {}
        for c, members in enumerate(clusters):
            for v in members:
                if v in assignment:
                    raise ValueError(f"element {v} appears in two clusters")
                assignment[v] = c
        n = len(assignment)
        if sorted(assignment) != list(range(n)):
            raise ValueError("clusters must cover 0..n-1 exactly")
        return cls(tuple(assignment[v] for v in range(n)))

    @classmethod
    def one_cluster(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def k(self) -> int:
        return max(self.labels) + 1

    @cached_property
    def cluster_sizes(self) -> tuple[int, ...]:
        """Sizes indexed by canonical cluster id."""
        counts = [0] * self.k
        for lab in self.labels:
            counts[lab] += 1
        return tuple(counts)

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        """Size multiset, sorted in decreasing order."""
        return tuple(sorted(self.cluster_sizes, reverse=True))

    @cached_property
    def clusters(self) -> tuple[tuple[int, ...], ...]:
        members: list[list[int]] = [[] for _ in range(self.k)]
        for v, lab in enumerate(self.labels):
            members[lab].append(v)
        return tuple(tuple(m) for m in members)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.asarray(self.labels, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @property
    def is_trivial(self) -> bool:
        """True for the one-cluster and the all-singletons partition."""
        return self.k == 1 or self.k == self.n

    @cached_property
    def intra_pairs(self) -> int:
        return sum(s * (s - 1) // 2 for s in self.cluster_sizes)

    def pair_vector(self) -> np.ndarray:
        """Binary intra-cluster indicator over pairs ``(i, j), i < j``, in lexicographic order."""
        iu, ju = np.triu_indices(self.n, k=1)
        return self.array[iu] == self.array[ju]

    def to_text(self) -> str:
        return ",".join(str(x) for x in self.labels)

    def __repr__(self) -> str:
        body = ",".join("{" + ",".join(map(str, c)) + "}" for c in self.clusters)
        return f"Partition({body})"


def partition_from_labels(labels: Sequence[Hashable]) -> Partition:
    return Partition(tuple(labels))


@dataclass(frozen=True)
class ClusterSizeSpec:
    """Multiset of cluster sizes, kept sorted in decreasing order."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.sizes) == 0:
            raise ValueError("empty size specification")
        if any(int(s) != s or s < 1 for s in self.sizes):
            raise ValueError(f"cluster sizes must be positive integers: {self.sizes}")
        object.__setattr__(self, "sizes", tuple(sorted((int(s) for s in self.sizes), reverse=True)))

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def intra_pairs(self) -> int:
        return sum(s * (s - 1) // 2 for s in self.sizes)

    def block_labels(self) -> np.ndarray:
        """Label vector assigning consecutive blocks of elements to each cluster."""
        return np.repeat(np.arange(self.k), self.sizes)

    def count(self) -> int:
        """Number of distinct partitions with exactly these sizes."""
        total = math.factorial(self.n)
        for s in self.sizes:
            total //= math.factorial(s)
        for mult in Counter(self.sizes).values():
            total //= math.factorial(mult)
        return total

    @classmethod
    def of(cls, p: Partition) -> "ClusterSizeSpec":
        return cls(p.sizes)


def _check_same_n(a: Partition, b: Partition) -> None:
    if a.n != b.n:
        raise ValueError(f"partitions differ in size: {a.n} != {b.n}")


@dataclass(frozen=True)
class ContingencyTable:
    """Sparse overlap counts ``n_ij = |A_i & B_j|`` with marginals."""

    counts: dict
    row_sums: tuple[int, ...]
    col_sums: tuple[int, ...]
    n: int = field(default=0)

    def dense(self) -> np.ndarray:
        table = np.zeros((len(self.row_sums), len(self.col_sums)), dtype=np.int64)
        for (i, j), c in self.counts.items():
            table[i, j] = c
        return table


def contingency(a: Partition, b: Partition) -> ContingencyTable:
    _check_same_n(a, b)
    counts = Counter(zip(a.labels, b.labels))
    return ContingencyTable(dict(counts), a.cluster_sizes, b.cluster_sizes, a.n)


def dense_contingency(a: Partition, b: Partition) -> np.ndarray:
    _check_same_n(a, b)
    flat = np.bincount(a.array * b.k + b.array, minlength=a.k * b.k)
    return flat.reshape(a.k, b.k)


def _choose2(x: int) -> int:
    return x * (x - 1) // 2


@dataclass(frozen=True)
class PairCounts:
    """Pair tallies ``(N11, N10, N01, N00)``; fields may be real for expected counts."""

    n11: float
    n10: float
    n01: float
    n00: float

    def __post_init__(self):
        if min(self.n11, self.n10, self.n01, self.n00) < 0:
            raise ValueError(f"negative pair count in {self.as_tuple()}")

    def as_tuple(self) -> tuple:
        return (self.n11, self.n10, self.n01, self.n00)

    @property
    def N(self):
        return self.n11 + self.n10 + self.n01 + self.n00

    @property
    def m_a(self):
        return self.n11 + self.n10

    @property
    def m_b(self):
        return self.n11 + self.n01

    @property
    def p_a(self) -> float:
        return self.m_a / self.N

    @property
    def p_b(self) -> float:
        return self.m_b / self.N

    @property
    def p_ab(self) -> float:
        return self.n11 / self.N


def pair_counts(a: Partition, b: Partition) -> PairCounts:
    """Pair counts from the contingency table in O(n)."""
    _check_same_n(a, b)
    if a.n < 2:
        raise ValueError("no pairs")
    table = contingency(a, b)
    n11 = sum(_choose2(c) for c in table.counts.values() if c > 1)
    m_a = sum(_choose2(s) for s in table.row_sums)
    m_b = sum(_choose2(s) for s in table.col_sums)
    total = _choose2(a.n)
    return PairCounts(n11, m_a - n11, m_b - n11, total - m_a - m_b + n11)


def _xlogx_entropy(counts: Iterable[int], n: int) -> float:
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / n
            h -= p * math.log(p)
    return h


def entropy(p: Partition) -> float:
    """Shannon entropy (nats) of the cluster-label distribution."""
    return _xlogx_entropy(p.cluster_sizes, p.n)


def joint_entropy(a: Partition, b: Partition) -> float:
    _check_same_n(a, b)
    return _xlogx_entropy(contingency(a, b).counts.values(), a.n)


def mutual_information(a: Partition, b: Partition) -> float:
    return entropy(a) + entropy(b) - joint_entropy(a, b)


def meet(a: Partition, b: Partition) -> Partition:
    """Coarsest common refinement."""
    _check_same_n(a, b)
    return Partition(tuple(zip(a.labels, b.labels)))


def _with_labels(b: Partition, changes: dict[int, int]) -> Partition:
    labels = list(b.labels)
    for v, lab in changes.items():
        labels[v] = lab
    return Partition(tuple(labels))


def perfect_splits(b: Partition, a: Partition) -> list[Partition]:
    """Splits of one cluster of ``b`` into two parts that never separate an ``a``-cluster."""
    _check_same_n(a, b)
    out: list[Partition] = []
    fresh = b.k
    for members in b.clusters:
        atoms: dict[int, list[int]] = {}
        for v in members:
            atoms.setdefault(a.labels[v], []).append(v)
        groups = list(atoms.values())
        t = len(groups)
        if t < 2:
            continue
        # fix atom 0 on the staying side so each bipartition appears once
        for mask in range(1, 2 ** (t - 1)):
            moved = {}
            for g in range(1, t):
                if mask >> (g - 1) & 1:
                    for v in groups[g]:
                        moved[v] = fresh
            out.append(_with_labels(b, moved))
    return out


def perfect_merges(b: Partition, a: Partition) -> list[Partition]:
    """Merges of two clusters of ``b`` that lie inside the same cluster of ``a``."""
    _check_same_n(a, b)
    # a cluster of b lies inside one a-cluster iff all its members share an a-label
    by_host: dict[int, list[int]] = {}
    for j, members in enumerate(b.clusters):
        host = a.labels[members[0]]
        if all(a.labels[v] == host for v in members):
            by_host.setdefault(host, []).append(j)
    out = []
    for js in by_host.values():
        for j1, j2 in combinations(js, 2):
            out.append(_with_labels(b, {v: j1 for v in b.clusters[j2]}))
    return out


def is_consistent_improvement(a: Partition, b: Partition, b2: Partition) -> bool:
    """True iff ``b2 != b`` and every pair on which ``a`` and ``b`` agree also agrees in ``a``, ``b2``."""
    _check_same_n(a, b)
    _check_same_n(a, b2)
    if b == b2:
        return False
    va, vb, vb2 = a.pair_vector(), b.pair_vector(), b2.pair_vector()
    agree = va == vb
    return bool(np.all(va[agree] == vb2[agree]))


def _check_guard(n: int) -> None:
    if not 1 <= n <= ENUMERATION_GUARD:
        raise ValueError(f"enumeration requires 1 <= n <= {ENUMERATION_GUARD}, got {n}")


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """All set partitions of ``n`` elements as restricted growth strings."""
    _check_guard(n)
    labels = [0] * n

    def rec(i: int, k: int) -> Iterator[Partition]:
        if i == n:
            yield Partition(tuple(labels))
            return
        for lab in range(k + 1):
            labels[i] = lab
            yield from rec(i + 1, max(k, lab + 1))

    labels[0] = 0
    yield from rec(1, 1)


def enumerate_with_sizes(spec: ClusterSizeSpec | Sequence[int]) -> Iterator[Partition]:
    """All partitions whose size multiset equals ``spec``, each exactly once."""
    if not isinstance(spec, ClusterSizeSpec):
        spec = ClusterSizeSpec(tuple(spec))
    n = spec.n
    _check_guard(n)
    remaining = Counter(spec.sizes)
    labels = [0] * n
    capacity: list[int] = []  # free slots per opened cluster

    def rec(i: int) -> Iterator[Partition]:
        if i == n:
            yield Partition(tuple(labels))
            return
        for c, free in enumerate(capacity):
            if free:
                capacity[c] -= 1
                labels[i] = c
                yield from rec(i + 1)
                capacity[c] += 1
        # open a new cluster; choose among distinct remaining sizes
        for size in sorted(s for s, m in remaining.items() if m):
            remaining[size] -= 1
            capacity.append(size - 1)
            labels[i] = len(capacity) - 1
            yield from rec(i + 1)
            capacity.pop()
            remaining[size] += 1

    yield from rec(0)


def size_specs(n: int) -> Iterator[ClusterSizeSpec]:
    """All integer partitions of ``n`` as size specifications."""

    def rec(rest: int, cap: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for s in range(min(rest, cap), 0, -1):
            for tail in rec(rest - s, s):
                yield (s,) + tail

    for sizes in rec(n, n):
        yield ClusterSizeSpec(sizes)


# -- text format -----------------------------------------------------------

def parse_partition_text(text: str) -> Partition:
    """Parse one label per line (``#`` comments and blank lines skipped) or one comma-separated line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) == 1 and "," in lines[0]:
        labels = [tok.strip() for tok in lines[0].split(",")]
    else:
        labels = lines
    if not labels or any(lab == "" for lab in labels):
        raise ValueError("empty partition")
    return Partition(tuple(labels))


def read_partition(path) -> Partition:
    with open(path, encoding="utf-8") as fh:
        return parse_partition_text(fh.read())


def format_partition(p: Partition) -> str:
    return "\n".join(str(x) for x in p.labels) + "\n"


def write_partition(p: Partition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_partition(p))
