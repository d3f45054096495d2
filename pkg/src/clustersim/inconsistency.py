"""Inconsistency of index pairs on triplets ``(A, B1, B2)``.

Two indices are inconsistent on a triplet when both strictly prefer a
candidate and the preferred candidates differ.  A *cover* is a small set of
triplets on which every separable index pair is inconsistent at least once.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from . import indices as ix
from .partitions import Partition, read_partition
from .properties import PartitionSpace, partition_space
from .sampling import SeededGenerator

log = logging.getLogger(__name__)

TIE_TOL = 1e-12


def preference(index_id: str, v1: float, v2: float, tol: float = TIE_TOL) -> int | None:
    """+1 if the index prefers the first candidate, -1 the second, 0 on a tie, None if undefined."""
    if np.isnan(v1) or np.isnan(v2):
        return None
    d = float(ix.oriented(index_id, v1 - v2))
    if abs(d) <= tol:
        return 0
    return 1 if d > 0 else -1


def pair_verdict(p: int | None, q: int | None) -> str:
    if p is None or q is None:
        return "undefined"
    if p == 0 or q == 0:
        return "tie"
    return "consistent" if p == q else "inconsistent"


@dataclass
class TripletRecord:
    a: Partition
    b1: Partition
    b2: Partition
    scores: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def inconsistent_pairs(self) -> set[tuple[str, str]]:
        return {pair for pair, v in self.verdicts.items() if v == "inconsistent"}


def analyze_triplet(a: Partition, b1: Partition, b2: Partition, ids, cfg: ix.SamplingConfig | None = None) -> TripletRecord:
    ids = [ix.resolve_id(i) for i in ids]
    cfg = cfg or ix.SamplingConfig(mode="exact" if a.n <= 12 else "monte-carlo")
    s1, s2 = ix.score_pair(ids, a, b1, cfg), ix.score_pair(ids, a, b2, cfg)
    rec = TripletRecord(a, b1, b2)
    prefs = {}
    for i in ids:
        rec.scores[i] = (s1[i].value, s2[i].value)
        prefs[i] = preference(i, s1[i].value, s2[i].value)
    for i, j in combinations(ids, 2):
        rec.verdicts[(i, j)] = pair_verdict(prefs[i], prefs[j])
    return rec


@dataclass
class PairTally:
    inconsistent: int = 0
    consistent: int = 0
    ties: int = 0
    undefined: int = 0

    @property
    def percent(self) -> float | None:
        """Share of inconsistent triplets among those both indices strictly order."""
        total = self.inconsistent + self.consistent
        return None if total == 0 else 100.0 * self.inconsistent / total


def inconsistency_matrix(records, ids) -> dict[tuple[str, str], PairTally]:
    """Tallies for every ordered pair of distinct indices; ``(i, j)`` and ``(j, i)`` share counts."""
    ids = [ix.resolve_id(i) for i in ids]
    out = {}
    for i, j in combinations(ids, 2):
        t = PairTally()
        for rec in records:
            v = rec.verdicts.get((i, j)) or rec.verdicts.get((j, i))
            if v == "inconsistent":
                t.inconsistent += 1
            elif v == "consistent":
                t.consistent += 1
            elif v == "tie":
                t.ties += 1
            else:
                t.undefined += 1
        out[(i, j)] = out[(j, i)] = t
    return out


def read_manifest(path) -> list[tuple[Partition, Partition, Partition]]:
    """One triplet per line: three whitespace-separated partition files, reference first."""
    path = Path(path)
    triplets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected three partition paths, got {len(parts)}")
            ps = [read_partition(p if Path(p).is_absolute() else path.parent / p) for p in parts]
            if len({p.n for p in ps}) != 1:
                raise ValueError(f"{path}:{lineno}: partitions differ in size")
            triplets.append(tuple(ps))
    return triplets


# -- cover search ---------------------------------------------------------------------

@dataclass
class CoverResult:
    ids: list
    triplets: list
    covered: set
    uncovered: list
    unorderable: list
    complete: bool
    sampled: int
    distinct_patterns: int
    seconds: float


class _Pool:
    """Distinct inconsistency patterns seen so far, each with one example triplet."""

    def __init__(self, ids):
        self.ids = ids
        self.pairs = list(combinations(range(len(ids)), 2))
        self.p = np.array([p for p, _ in self.pairs])
        self.q = np.array([q for _, q in self.pairs])
        self.examples: dict[int, tuple] = {}
        self.sampled = 0

    def add(self, signs: np.ndarray, triplets) -> None:
        """``signs``: (batch, len(ids)) preferences in {-1, 0, 1}."""
        inc = (signs[:, self.p] * signs[:, self.q]) < 0
        packed = np.packbits(inc, axis=1)
        _, first = np.unique(packed, axis=0, return_index=True)
        for t in first:
            key = int.from_bytes(packed[t].tobytes(), "big")
            if key and key not in self.examples:
                self.examples[key] = triplets(int(t))
        self.sampled += len(signs)

    def mask_to_pairs(self, mask: int) -> set[tuple[str, str]]:
        nbits = len(self.pairs)
        width = (nbits + 7) // 8 * 8
        out = set()
        for b, (p, q) in enumerate(self.pairs):
            if mask >> (width - 1 - b) & 1:
                out.add((self.ids[p], self.ids[q]))
        return out


def _beam_cover(masks: list[int], target: int, max_size: int, width: int = 64):
    states = [(0, ())]
    for _ in range(max_size):
        nxt: dict[int, tuple] = {}
        for cov, picks in states:
            for m in masks:
                new = cov | m
                if new != cov and new not in nxt:
                    nxt[new] = picks + (m,)
        if not nxt:
            break
        ranked = sorted(nxt.items(), key=lambda kv: -kv[0].bit_count())
        for cov, picks in ranked:
            if cov == target:
                return list(picks)
        states = ranked[:width]
    return None


def _space_signs(sp: PartitionSpace, ids, mats, rng, batch: int):
    P = len(sp)
    a, b1, b2 = (rng.integers(0, P, batch) for _ in range(3))
    keep = b1 != b2
    a, b1, b2 = a[keep], b1[keep], b2[keep]
    signs = np.zeros((len(a), len(ids)), dtype=np.int8)
    for c, i in enumerate(ids):
        d = ix.oriented(i, mats[i][a, b1] - mats[i][a, b2])
        s = np.where(np.abs(d) > TIE_TOL, np.sign(d), 0.0)
        signs[:, c] = np.nan_to_num(s, nan=0.0)
    return signs, lambda t: (sp.partitions[a[t]], sp.partitions[b1[t]], sp.partitions[b2[t]])


MATRIX_LIMIT = 7


def _sampled_signs(n: int, ids, rng, batch: int):
    """Random triplets on ``n`` elements scored directly (no pairwise matrices)."""
    k = rng.integers(1, n + 1, size=(3, batch, 1))
    labels = [np.array([Partition(tuple(row)).labels for row in rng.integers(0, 2**31, (batch, n)) % kk])
              for kk in k]
    a, b1, b2 = labels
    keep = np.any(b1 != b2, axis=1)
    a, b1, b2 = a[keep], b1[keep], b2[keep]
    cfg = ix.SamplingConfig(mode="exact")
    s1 = ix.score_pairs(ids, a, b1, cfg)
    s2 = ix.score_pairs(ids, a, b2, cfg)
    signs = np.zeros((len(a), len(ids)), dtype=np.int8)
    for c, i in enumerate(ids):
        d = ix.oriented(i, s1[i] - s2[i])
        signs[:, c] = np.nan_to_num(np.where(np.abs(d) > TIE_TOL, np.sign(d), 0.0), nan=0.0)
    return signs, lambda t: (Partition(tuple(a[t])), Partition(tuple(b1[t])), Partition(tuple(b2[t])))


def find_inconsistency_cover(ids=ix.COVER_IDS, n_max: int = 8, budget_seconds: float = 600.0,
                             max_size: int = 4, seed: int = 0, batch: int = 200_000,
                             n_min: int = 3) -> CoverResult:
    """Sample triplets on ``n_min..n_max`` elements and search for a cover of at most ``max_size`` triplets.

    Sizes up to 7 sample from exhaustive pairwise score matrices; larger sizes
    score random triplets directly.  After each size a beam search looks for a
    cover of every pair seen inconsistent so far.  The search stops at a cover
    of all pairs, or when the budget runs out (then the best partial cover and
    the pairs never seen inconsistent are reported).  Pairs of equivalent
    indices are reported as unorderable without being searched for.
    """
    ids = [ix.resolve_id(i) for i in ids]
    start = time.monotonic()
    rng = SeededGenerator(seed).spawn(17).rng()
    pool = _Pool(ids)
    width = (len(pool.pairs) + 7) // 8 * 8
    # pairs in one equivalence class induce the same order and can never be separated
    rep = {i: ix.lookup(i).equivalence_rep for i in ids}
    full = 0
    for b, (p, q) in enumerate(pool.pairs):
        if rep[ids[p]] != rep[ids[q]]:
            full |= 1 << (width - 1 - b)
    sizes = list(range(max(3, n_min), n_max + 1))
    best, best_cov = [], 0
    while time.monotonic() - start < budget_seconds:
        for n in sizes:
            if n <= MATRIX_LIMIT:
                sp = partition_space(n)
                mats = {i: sp.index_matrix(i) for i in ids}
                signs, trip = _space_signs(sp, ids, mats, rng, min(batch, len(sp) ** 2))
            else:
                signs, trip = _sampled_signs(n, ids, rng, max(1, batch // 10))
            pool.add(signs, trip)
            union = 0
            for m in pool.examples:
                union |= m
            cover = _beam_cover(list(pool.examples), union, max_size)
            if cover is None:
                cover = _greedy_partial(list(pool.examples), max_size)
            cov = 0
            for m in cover:
                cov |= m
            if cov.bit_count() > best_cov.bit_count():
                best, best_cov = cover, cov
            if best_cov & full == full or time.monotonic() - start > budget_seconds:
                break
        if best_cov & full == full:
            break
    union = 0
    for m in pool.examples:
        union |= m
    all_pairs = {(ids[p], ids[q]) for p, q in pool.pairs}
    target = pool.mask_to_pairs(full)
    covered = pool.mask_to_pairs(best_cov)
    unorderable = sorted((all_pairs - target) | (all_pairs - pool.mask_to_pairs(union)))
    uncovered = sorted(target - covered)
    return CoverResult(
        ids=ids, triplets=[pool.examples[m] for m in best], covered=covered,
        uncovered=uncovered, unorderable=unorderable, complete=not uncovered,
        sampled=pool.sampled, distinct_patterns=len(pool.examples),
        seconds=time.monotonic() - start)


def _greedy_partial(masks: list[int], max_size: int) -> list[int]:
    picks, cov = [], 0
    for _ in range(max_size):
        m = max(masks, key=lambda x: (cov | x).bit_count(), default=None)
        if m is None or (cov | m) == cov:
            break
        picks.append(m)
        cov |= m
    return picks


def verify_cover(result: CoverResult, cfg: ix.SamplingConfig | None = None) -> bool:
    """Re-score every emitted triplet; True iff the claimed pairs are all reproduced."""
    seen = set()
    for a, b1, b2 in result.triplets:
        seen |= analyze_triplet(a, b1, b2, result.ids, cfg).inconsistent_pairs()
    return result.covered <= seen
