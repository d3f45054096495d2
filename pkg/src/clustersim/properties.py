"""Exhaustive and grid-based checks of index properties.

Small-n checks run over a :class:`PartitionSpace`, which enumerates every
partition of ``n`` elements once and evaluates an index on all ordered pairs
as one ``(P, P)`` matrix.  Pair-count grid checks (minimal agreement, strong
monotonicity, baselines, bias) run on quadruples or on ``(m_A, m_B)`` grids.

Every violation carries a witness that :func:`recheck_witness` can confirm by
re-evaluating the index from scratch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import indices as ix
from .partitions import (
    ClusterSizeSpec,
    PairCounts,
    Partition,
    enumerate_partitions,
    perfect_merges,
    perfect_splits,
    size_specs,
)

log = logging.getLogger(__name__)

HOLDS = "holds-up-to-n"
VIOLATED = "violated"
BIAS = "bias-classification"
BY_CONSTRUCTION = "by-construction"
NOT_APPLICABLE = "not-applicable"
ERROR = "error"

EQ_TOL = 1e-9
STRICT_TOL = 1e-12
SIGN_TOL = 1e-8
SPACE_LIMIT = 8

PROPERTIES = (
    "max_agreement", "min_agreement", "symmetry", "distance", "linear_complexity",
    "monotonicity", "strong_monotonicity", "constant_baseline_exact",
    "constant_baseline_asymptotic", "bias",
)
TABLE1_PROPERTIES = ("max_agreement", "symmetry", "distance", "linear_complexity",
                     "monotonicity", "constant_baseline_exact")
TABLE2_PROPERTIES = ("max_agreement", "min_agreement", "symmetry", "distance", "linear_complexity",
                     "monotonicity", "strong_monotonicity", "constant_baseline_exact",
                     "constant_baseline_asymptotic")


@dataclass
class PropertyVerdict:
    index_id: str
    property: str
    verdict: str
    witness: dict | None = None
    search_bound: str | None = None
    value: float | None = None
    note: str = ""

    @property
    def holds(self) -> bool | None:
        if self.verdict in (HOLDS, BY_CONSTRUCTION):
            return True
        if self.verdict == VIOLATED:
            return False
        return None

    @property
    def mark(self) -> str:
        if self.verdict == BIAS:
            return self.note
        return {True: "✓", False: "✗"}.get(self.holds, "?")


@dataclass
class BiasClassification:
    index_id: str
    pair_dec: bool
    pair_inc: bool
    witnesses: list = field(default_factory=list)

    @property
    def label(self) -> str:
        if self.pair_dec and self.pair_inc:
            return "both"
        if self.pair_dec:
            return "PairDec"
        if self.pair_inc:
            return "PairInc"
        return "none"


@dataclass(frozen=True)
class PropertyBudget:
    n_max: int = 6
    n_max_sampled: int = 4
    min_agreement_bound: int = 200
    strong_grid_bound: int = 20

    def n_for(self, index_id: str) -> int:
        return self.n_max_sampled if ix.lookup(index_id).needs_sampling else self.n_max


EXACT = ix.SamplingConfig(mode="exact")


# -- partition spaces ----------------------------------------------------------

class PartitionSpace:
    """All partitions of ``n`` elements with cached pairwise index matrices."""

    def __init__(self, n: int):
        if not 2 <= n <= SPACE_LIMIT:
            raise ValueError(f"partition spaces support 2 <= n <= {SPACE_LIMIT}, got {n}")
        self.n = n
        self.partitions = list(enumerate_partitions(n))
        self.labels = np.array([p.labels for p in self.partitions], dtype=np.int64)
        self.k = self.labels.max(axis=1) + 1
        iu, ju = np.triu_indices(n, k=1)
        vec = self.labels[:, iu] == self.labels[:, ju]
        self.N = len(iu)
        self.masks = (vec.astype(np.uint64) << np.arange(self.N, dtype=np.uint64)).sum(axis=1, dtype=np.uint64)
        self.intra = vec.sum(axis=1)
        self.specs = list(size_specs(n))
        spec_pos = {s.sizes: i for i, s in enumerate(self.specs)}
        self.spec_index = np.array([spec_pos[p.sizes] for p in self.partitions])
        self.position = {p: i for i, p in enumerate(self.partitions)}
        self._matrices: dict = {}
        self._n11 = None
        self._merges = None

    def __len__(self) -> int:
        return len(self.partitions)

    @property
    def nontrivial(self) -> np.ndarray:
        return (self.k > 1) & (self.k < self.n)

    def n11(self) -> np.ndarray:
        if self._n11 is None:
            self._n11 = np.bitwise_count(self.masks[:, None] & self.masks[None, :]).astype(np.int64)
        return self._n11

    def index_matrix(self, index_id: str, cfg: ix.SamplingConfig | None = None) -> np.ndarray:
        """``M[i, j] = V(P_i, P_j)``; ``nan`` where undefined."""
        index_id = ix.resolve_id(index_id)
        desc = ix.lookup(index_id)
        if desc.needs_sampling:
            cfg = cfg or EXACT
        key = (index_id, cfg if desc.needs_sampling else None)
        if key not in self._matrices:
            self._matrices[key] = self._compute(index_id, cfg)
        return self._matrices[key]

    def _compute(self, index_id: str, cfg) -> np.ndarray:
        if index_id in ix.PAIR_FORMULAS:
            n11 = self.n11()
            ma, mb = self.intra[:, None], self.intra[None, :]
            return ix.pair_index_values(index_id, n11, ma - n11, mb - n11, self.N - ma - mb + n11)
        mean = std = None
        if index_id in ix.SAMPLED_FORMULAS:
            s = len(self.specs)
            emat, smat = np.empty((s, s)), np.empty((s, s))
            for i, sa in enumerate(self.specs):
                for j, sb in enumerate(self.specs):
                    mom = ix.mi_null_moments(sa.sizes, sb.sizes, cfg)
                    emat[i, j], smat[i, j] = mom.mean, mom.std
            mean = emat[self.spec_index[:, None], self.spec_index[None, :]]
            std = smat[self.spec_index[:, None], self.spec_index[None, :]]
        P, n = self.labels.shape
        out = np.empty((P, P))
        step = max(1, 4_000_000 // (P * n * n))
        for lo in range(0, P, step):
            rows = self.labels[lo:lo + step]
            r = len(rows)
            codes = rows[:, None, :] * n + self.labels[None, :, :] + (np.arange(r * P) * n * n).reshape(r, P, 1)
            tables = np.bincount(codes.ravel(), minlength=r * P * n * n).reshape(r, P, n, n)
            stats = ix.TableStats.of(tables)
            out[lo:lo + r] = ix.general_index_values(
                index_id, stats,
                None if mean is None else mean[lo:lo + r],
                None if std is None else std[lo:lo + r])
        return out

    def merge_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Pairs ``(b, b2)`` where ``b2`` merges two clusters of ``b``."""
        if self._merges is not None:
            return self._merges
        coarser = (self.masks[:, None] & ~self.masks[None, :]) == 0  # b's pairs inside b2
        step = self.k[:, None] == self.k[None, :] + 1
        self._merges = np.nonzero(coarser & step)
        return self._merges

    def neighbors(self, a: int) -> list[tuple[np.ndarray, np.ndarray, str]]:
        """Perfect merges and perfect splits w.r.t. reference ``a`` as ``(b, b2, op)`` index arrays."""
        b, b2 = self.merge_pairs()
        added = self.masks[b2] & ~self.masks[b]
        perfect = (added & ~self.masks[a]) == 0
        merges = (b[perfect], b2[perfect], "merge")
        # a split undoes a merge; it is perfect iff no removed pair is intra-cluster in a
        perfect_split = (added & self.masks[a]) == 0
        splits = (b2[perfect_split], b[perfect_split], "split")
        return [merges, splits]

    def consistent_improvements(self, a: int, b: int) -> np.ndarray:
        """Indices of all ``a``-consistent improvements of ``b``, from the pair-agreement definition."""
        dis = self.masks[a] ^ self.masks
        ok = (dis & ~dis[b]) == 0
        ok[b] = False
        return np.nonzero(ok)[0]

    def text(self, i: int) -> str:
        return self.partitions[i].to_text()


@lru_cache(maxsize=SPACE_LIMIT)
def partition_space(n: int) -> PartitionSpace:
    return PartitionSpace(n)


def _pc(q) -> list:
    return [float(x) for x in q]


# -- checks over partition spaces ------------------------------------------------

def check_max_agreement(index_id: str, n_max: int = 6, cfg: ix.SamplingConfig | None = None) -> PropertyVerdict:
    index_id = ix.resolve_id(index_id)
    first = None
    for n in range(2, n_max + 1):
        sp = partition_space(n)
        M = ix.oriented(index_id, sp.index_matrix(index_id, cfg))
        diag = np.diag(M)
        defined = np.nonzero(~np.isnan(diag))[0]
        if len(defined) == 0:
            continue
        if first is None:
            first = (n, int(defined[0]), float(diag[defined[0]]))
        c = first[2]
        off = np.nonzero(np.abs(diag[defined] - c) > EQ_TOL)[0]
        if len(off):
            i = int(defined[off[0]])
            n0, i0, _ = first
            return PropertyVerdict(index_id, "max_agreement", VIOLATED, {
                "kind": "self_score_not_constant",
                "a1": partition_space(n0).text(i0), "a2": sp.text(i),
                "v1": _raw(index_id, c), "v2": _raw(index_id, diag[i]),
            }, search_bound=f"n<={n_max}")
        gap = M - c
        np.fill_diagonal(gap, -np.inf)
        bad = np.argwhere(gap >= -STRICT_TOL)
        if len(bad):
            i, j = (int(x) for x in bad[0])
            return PropertyVerdict(index_id, "max_agreement", VIOLATED, {
                "kind": "not_strict_maximum", "a": sp.text(i), "b": sp.text(j),
                "v_ab": _raw(index_id, M[i, j]), "v_max": _raw(index_id, c),
            }, search_bound=f"n<={n_max}")
    value = None if first is None else _raw(index_id, first[2])
    return PropertyVerdict(index_id, "max_agreement", HOLDS, search_bound=f"n<={n_max}", value=value)


def _raw(index_id: str, oriented_value) -> float:
    return float(ix.oriented(index_id, oriented_value))


def check_symmetry(index_id: str, n_max: int = 6, cfg: ix.SamplingConfig | None = None) -> PropertyVerdict:
    index_id = ix.resolve_id(index_id)
    for n in range(2, n_max + 1):
        sp = partition_space(n)
        M = sp.index_matrix(index_id, cfg)
        bad = np.argwhere(np.abs(M - M.T) > EQ_TOL)
        if len(bad):
            i, j = (int(x) for x in bad[0])
            return PropertyVerdict(index_id, "symmetry", VIOLATED, {
                "kind": "asymmetric", "a": sp.text(i), "b": sp.text(j),
                "v_ab": float(M[i, j]), "v_ba": float(M[j, i]),
            }, search_bound=f"n<={n_max}")
    return PropertyVerdict(index_id, "symmetry", HOLDS, search_bound=f"n<={n_max}")


def check_distance(index_id: str, n_max: int = 6, cfg: ix.SamplingConfig | None = None) -> PropertyVerdict:
    """Triangle inequality for ``d = c_max - V`` (the index itself for distance-like indices)."""
    index_id = ix.resolve_id(index_id)
    for pre in (check_max_agreement(index_id, n_max, cfg), check_symmetry(index_id, n_max, cfg)):
        if pre.verdict == VIOLATED:
            return PropertyVerdict(index_id, "distance", VIOLATED,
                                   {"kind": "inherited", "property": pre.property, "witness": pre.witness},
                                   search_bound=pre.search_bound, note=f"fails {pre.property}")
    c = pre_c = check_max_agreement(index_id, n_max, cfg).value
    c = ix.oriented(index_id, pre_c)
    for n in range(2, n_max + 1):
        sp = partition_space(n)
        D = c - ix.oriented(index_id, sp.index_matrix(index_id, cfg))
        for b in range(len(sp)):
            viol = D > D[:, b, None] + D[None, b, :] + EQ_TOL
            if viol.any():
                a, cc = (int(x) for x in np.argwhere(viol)[0])
                return PropertyVerdict(index_id, "distance", VIOLATED, {
                    "kind": "triangle", "a": sp.text(a), "b": sp.text(b), "c": sp.text(cc), "c_max": pre_c,
                    "d_ab": float(D[a, b]), "d_bc": float(D[b, cc]), "d_ac": float(D[a, cc]),
                }, search_bound=f"n<={n_max}")
    return PropertyVerdict(index_id, "distance", HOLDS, search_bound=f"n<={n_max}")


def check_monotonicity(index_id: str, n_max: int = 6, cfg: ix.SamplingConfig | None = None) -> PropertyVerdict:
    """Strict improvement under every perfect split and merge, in both argument orders.

    References with one cluster or all singletons are skipped.  Single steps
    suffice: every consistent improvement is a chain of such steps.
    """
    index_id = ix.resolve_id(index_id)
    skipped = 0
    for n in range(3, n_max + 1):
        sp = partition_space(n)
        M = ix.oriented(index_id, sp.index_matrix(index_id, cfg))
        for a in np.nonzero(sp.nontrivial)[0]:
            for b, b2, op in sp.neighbors(a):
                for order, before, after in (("A,B", M[a, b], M[a, b2]), ("B,A", M[b, a], M[b2, a])):
                    gain = after - before
                    defined = ~np.isnan(gain)
                    skipped += int((~defined).sum())
                    bad = np.nonzero(defined & (gain <= STRICT_TOL))[0]
                    if len(bad):
                        t = int(bad[0])
                        return PropertyVerdict(index_id, "monotonicity", VIOLATED, {
                            "kind": "not_monotone", "op": op, "order": order,
                            "a": sp.text(int(a)), "b": sp.text(int(b[t])), "b2": sp.text(int(b2[t])),
                            "v_before": _raw(index_id, before[t]), "v_after": _raw(index_id, after[t]),
                        }, search_bound=f"n<={n_max}")
    if skipped:
        log.info("%s monotonicity: skipped %d undefined comparisons", index_id, skipped)
    return PropertyVerdict(index_id, "monotonicity", HOLDS, search_bound=f"n<={n_max}",
                           note=f"{skipped} undefined comparisons skipped" if skipped else "")


def check_constant_baseline_exact(index_id: str, n_max: int = 5, cfg: ix.SamplingConfig | None = None) -> PropertyVerdict:
    """Exact means of ``V(A, B)`` over every size class of ``B``, for all nontrivial ``A``."""
    index_id = ix.resolve_id(index_id)
    if cfg is not None and cfg.mode != "exact":
        raise ValueError("exact baseline check needs an exact-enumeration SamplingConfig")
    ref = None
    for n in range(3, n_max + 1):
        sp = partition_space(n)
        M = sp.index_matrix(index_id, cfg)
        defined = ~np.isnan(M)
        onehot = (sp.spec_index[:, None] == np.arange(len(sp.specs))[None, :]).astype(float)
        sums = np.where(defined, M, 0.0) @ onehot
        counts = defined.astype(float) @ onehot
        with np.errstate(invalid="ignore", divide="ignore"):
            means = sums / counts
        for a in np.nonzero(sp.nontrivial)[0]:
            for s in range(len(sp.specs)):
                if counts[a, s] == 0:
                    continue
                if counts[a, s] < onehot[:, s].sum():
                    log.info("%s baseline: partially undefined class %s", index_id, sp.specs[s].sizes)
                cur = (sp.text(int(a)), list(sp.specs[s].sizes), float(means[a, s]))
                if ref is None:
                    ref = cur
                elif abs(cur[2] - ref[2]) > EQ_TOL:
                    return PropertyVerdict(index_id, "constant_baseline_exact", VIOLATED, {
                        "kind": "baseline_differs", "a1": ref[0], "s1": ref[1], "mean1": ref[2],
                        "a2": cur[0], "s2": cur[1], "mean2": cur[2],
                    }, search_bound=f"n<={n_max}")
    return PropertyVerdict(index_id, "constant_baseline_exact", HOLDS, search_bound=f"n<={n_max}",
                           value=None if ref is None else ref[2])


def exact_class_mean(index_id: str, a: Partition, spec: ClusterSizeSpec, cfg: ix.SamplingConfig | None = None) -> float:
    """Mean of ``V(a, B)`` over all ``B`` with sizes ``spec`` (undefined values skipped)."""
    sp = partition_space(a.n)
    M = sp.index_matrix(index_id, cfg)
    row = M[sp.position[a], sp.spec_index == sp.specs.index(ClusterSizeSpec(spec.sizes))]
    return float(np.nanmean(row))


# -- pair-count grid checks ---------------------------------------------------------

def _require_pair(index_id: str) -> str:
    index_id = ix.resolve_id(index_id)
    if index_id not in ix.PAIR_FORMULAS:
        raise ValueError(f"{index_id} is not a pair-counting index")
    return index_id


@lru_cache(maxsize=4)
def _triples_by_sum(bound: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``(a, b, c) >= 0`` with ``a + b + c <= bound``, sorted by sum, plus prefix ends."""
    r = np.arange(bound + 1)
    a, b, c = np.meshgrid(r, r, r, indexing="ij")
    keep = a + b + c <= bound
    t = np.stack([a[keep], b[keep], c[keep]], axis=1)
    s = t.sum(axis=1)
    t = t[np.argsort(s, kind="stable")]
    ends = np.searchsorted(np.sort(s), np.arange(bound + 1), side="right")
    return t, ends


def _quads(total: int, bound: int) -> np.ndarray:
    t, ends = _triples_by_sum(bound)
    head = t[:ends[total]]
    return np.column_stack([head, total - head.sum(axis=1)])


def check_min_agreement(index_id: str, bound: int = 200) -> PropertyVerdict:
    """``V(0, N10, N01, 0)`` constant and strictly worse than every quadruple with ``N11 + N00 > 0``."""
    index_id = _require_pair(index_id)
    c = None
    c_at = None
    for total in range(1, bound + 1):
        b = np.arange(total + 1)
        v = ix.oriented(index_id, ix.pair_index_values(index_id, 0, b, total - b, 0))
        ok = ~np.isnan(v)
        if not ok.any():
            continue
        if c is None:
            i = int(np.argmax(ok))
            c, c_at = float(v[i]), (0, int(b[i]), int(total - b[i]), 0)
        off = np.nonzero(ok & (np.abs(v - c) > EQ_TOL))[0]
        if len(off):
            i = int(off[0])
            return PropertyVerdict(index_id, "min_agreement", VIOLATED, {
                "kind": "min_not_constant", "pc1": _pc(c_at), "pc2": _pc((0, b[i], total - b[i], 0)),
                "v1": _raw(index_id, c), "v2": _raw(index_id, v[i]),
            }, search_bound=f"N<={bound}")
    if c is None:
        return PropertyVerdict(index_id, "min_agreement", VIOLATED, note="undefined on every N11=N00=0 quadruple",
                               witness={"kind": "min_undefined"}, search_bound=f"N<={bound}")
    for total in range(1, bound + 1):
        q = _quads(total, bound)
        q = q[(q[:, 0] + q[:, 3]) > 0]
        v = ix.oriented(index_id, ix.pair_index_values(index_id, *q.T))
        bad = np.nonzero(v <= c + STRICT_TOL)[0]
        if len(bad):
            i = int(bad[0])
            return PropertyVerdict(index_id, "min_agreement", VIOLATED, {
                "kind": "min_not_strict", "pc1": _pc(c_at), "pc2": _pc(q[i]),
                "v1": _raw(index_id, c), "v2": _raw(index_id, v[i]),
            }, search_bound=f"N<={bound}")
    return PropertyVerdict(index_id, "min_agreement", HOLDS, search_bound=f"N<={bound}", value=_raw(index_id, c))


def check_strong_monotonicity(index_id: str, grid_bound: int = 20) -> PropertyVerdict:
    """Unit increments of N11/N00 must raise the score when N10+N01 > 0; of N10/N01 must lower it when N11+N00 > 0."""
    index_id = _require_pair(index_id)
    t, ends = _triples_by_sum(grid_bound)
    base = np.concatenate([_quads(total, grid_bound) for total in range(0, grid_bound)])
    v0 = ix.oriented(index_id, ix.pair_index_values(index_id, *base.T))
    for comp, name, sign in ((0, "N11", 1), (3, "N00", 1), (1, "N10", -1), (2, "N01", -1)):
        step = base.copy()
        step[:, comp] += 1
        v1 = ix.oriented(index_id, ix.pair_index_values(index_id, *step.T))
        if sign > 0:
            cond = (base[:, 1] + base[:, 2]) > 0
        else:
            cond = (base[:, 0] + base[:, 3]) > 0
        gain = sign * (v1 - v0)
        bad = np.nonzero(cond & ~np.isnan(gain) & (gain <= STRICT_TOL))[0]
        if len(bad):
            i = int(bad[0])
            return PropertyVerdict(index_id, "strong_monotonicity", VIOLATED, {
                "kind": "strong_not_monotone", "component": name,
                "pc1": _pc(base[i]), "pc2": _pc(step[i]),
                "v1": _raw(index_id, v0[i]), "v2": _raw(index_id, v1[i]),
            }, search_bound=f"N<={grid_bound}")
    return PropertyVerdict(index_id, "strong_monotonicity", HOLDS, search_bound=f"N<={grid_bound}")


GRID_FRACTIONS = np.arange(1, 100) / 100
GRID_SIZES = (100.0, 1e4)


def check_asymptotic_baseline(index_id: str) -> PropertyVerdict:
    index_id = _require_pair(index_id)
    ref = None
    for N in GRID_SIZES:
        ma, mb = np.meshgrid(GRID_FRACTIONS * N, GRID_FRACTIONS * N, indexing="ij")
        v = ix.substituted_values(index_id, ma, mb, N)
        ok = ~np.isnan(v)
        if not ok.all():
            log.info("%s: substituted index undefined at %d grid points", index_id, int((~ok).sum()))
        if ref is None and ok.any():
            i = np.argwhere(ok)[0]
            ref = (float(ma[tuple(i)]), float(mb[tuple(i)]), N, float(v[tuple(i)]))
        bad = np.argwhere(ok & (np.abs(v - ref[3]) > EQ_TOL))
        if len(bad):
            i = tuple(bad[0])
            return PropertyVerdict(index_id, "constant_baseline_asymptotic", VIOLATED, {
                "kind": "substituted_not_constant", "point1": list(ref[:3]), "v1": ref[3],
                "point2": [float(ma[i]), float(mb[i]), N], "v2": float(v[i]),
            }, search_bound="m in {0.01N..0.99N}, N in {100, 1e4}")
    return PropertyVerdict(index_id, "constant_baseline_asymptotic", HOLDS,
                           search_bound="m in {0.01N..0.99N}, N in {100, 1e4}", value=ref[3])


def substituted_derivative(index_id: str, m_a, m_b, N, rel_step: float = 1e-4) -> np.ndarray:
    """Central difference of the oriented substituted index in ``m_B``."""
    h = rel_step * N
    up = ix.oriented(index_id, ix.substituted_values(index_id, m_a, np.asarray(m_b) + h, N))
    down = ix.oriented(index_id, ix.substituted_values(index_id, m_a, np.asarray(m_b) - h, N))
    return (up - down) / (2 * h)


def classify_bias(index_id: str, max_witnesses: int = 3) -> BiasClassification:
    """PairDec if the expected-count score ever increases with ``m_B``; PairInc if it ever decreases."""
    index_id = _require_pair(index_id)
    out = BiasClassification(index_id, False, False)
    for N in GRID_SIZES:
        ma, mb = np.meshgrid(GRID_FRACTIONS * N, GRID_FRACTIONS * N, indexing="ij")
        d = substituted_derivative(index_id, ma, mb, N)
        for flag, mask in (("pair_dec", d > SIGN_TOL), ("pair_inc", d < -SIGN_TOL)):
            hits = np.argwhere(mask)
            if len(hits):
                setattr(out, flag, True)
                for i in hits[:max_witnesses]:
                    i = tuple(i)
                    out.witnesses.append((float(ma[i]), float(mb[i]), N, float(np.sign(d[i]))))
    return out


def bias_verdict(index_id: str) -> PropertyVerdict:
    bc = classify_bias(index_id)
    return PropertyVerdict(index_id, "bias", BIAS, {"kind": "bias_gradients", "samples": bc.witnesses},
                           search_bound="m in {0.01N..0.99N}, N in {100, 1e4}", note=bc.label)


def linear_complexity(index_id: str) -> PropertyVerdict:
    desc = ix.lookup(index_id)
    if desc.linear_complexity:
        return PropertyVerdict(desc.id, "linear_complexity", BY_CONSTRUCTION,
                               note="computed from the contingency table in O(n)")
    return PropertyVerdict(desc.id, "linear_complexity", VIOLATED,
                           note="needs moments of M over a random-permutation model", witness=None)


# -- matrix -----------------------------------------------------------------------------

def check_property(index_id: str, prop: str, budget: PropertyBudget = PropertyBudget(),
                   cfg: ix.SamplingConfig | None = None) -> PropertyVerdict:
    index_id = ix.resolve_id(index_id)
    n = budget.n_for(index_id)
    pair = index_id in ix.PAIR_FORMULAS
    if prop == "max_agreement":
        return check_max_agreement(index_id, n, cfg)
    if prop == "symmetry":
        return check_symmetry(index_id, n, cfg)
    if prop == "distance":
        return check_distance(index_id, n, cfg)
    if prop == "linear_complexity":
        return linear_complexity(index_id)
    if prop == "monotonicity":
        return check_monotonicity(index_id, n, cfg)
    if prop == "constant_baseline_exact":
        return check_constant_baseline_exact(index_id, n, cfg)
    if not pair:
        return PropertyVerdict(index_id, prop, NOT_APPLICABLE, note="defined for pair-counting indices only")
    if prop == "min_agreement":
        return check_min_agreement(index_id, budget.min_agreement_bound)
    if prop == "strong_monotonicity":
        return check_strong_monotonicity(index_id, budget.strong_grid_bound)
    if prop == "constant_baseline_asymptotic":
        return check_asymptotic_baseline(index_id)
    if prop == "bias":
        return bias_verdict(index_id)
    raise ValueError(f"unknown property {prop!r}")


def properties_for(index_id: str) -> tuple[str, ...]:
    return TABLE2_PROPERTIES + ("bias",) if index_id in ix.PAIR_FORMULAS else TABLE1_PROPERTIES


def property_matrix(ids, budget: PropertyBudget = PropertyBudget(),
                    cfg: ix.SamplingConfig | None = None) -> list[PropertyVerdict]:
    """One verdict per (index, applicable property); a failing check becomes an error row."""
    rows = []
    for raw in ids:
        index_id = ix.resolve_id(raw)
        for prop in properties_for(index_id):
            try:
                rows.append(check_property(index_id, prop, budget, cfg))
            except Exception as exc:  # recorded, the matrix keeps going
                log.exception("check %s/%s failed", index_id, prop)
                rows.append(PropertyVerdict(index_id, prop, ERROR, note=str(exc)))
    return rows


# -- witness re-checking ---------------------------------------------------------------

def _P(text: str) -> Partition:
    return Partition(tuple(int(x) for x in text.split(",")))


def _score(index_id, a, b, cfg):
    s = ix.evaluate(index_id, _P(a), _P(b), cfg or EXACT)
    return ix.oriented(index_id, s.value) if s.defined else np.nan


def _pair_score(index_id, q):
    s = ix.eval_pair_index(index_id, PairCounts(*q))
    return ix.oriented(index_id, s.value) if s.defined else np.nan


def recheck_witness(v: PropertyVerdict, cfg: ix.SamplingConfig | None = None) -> bool:
    """Re-evaluate a violation witness from scratch; True iff it is a genuine violation."""
    if v.verdict != VIOLATED or not v.witness:
        return False
    w, i = v.witness, v.index_id
    kind = w["kind"]
    if kind == "inherited":
        inner = PropertyVerdict(i, w["property"], VIOLATED, w["witness"])
        return recheck_witness(inner, cfg)
    if kind == "self_score_not_constant":
        return abs(_score(i, w["a1"], w["a1"], cfg) - _score(i, w["a2"], w["a2"], cfg)) > EQ_TOL
    if kind == "not_strict_maximum":
        return w["a"] != w["b"] and _score(i, w["a"], w["b"], cfg) >= _score(i, w["a"], w["a"], cfg) - STRICT_TOL
    if kind == "asymmetric":
        return abs(_score(i, w["a"], w["b"], cfg) - _score(i, w["b"], w["a"], cfg)) > EQ_TOL
    if kind == "triangle":
        c = ix.oriented(i, w["c_max"])
        d = {k: c - _score(i, w[k[0]], w[k[1]], cfg) for k in (("a", "b"), ("b", "c"), ("a", "c"))}
        return d[("a", "c")] > d[("a", "b")] + d[("b", "c")] + EQ_TOL
    if kind == "not_monotone":
        a, b, b2 = _P(w["a"]), _P(w["b"]), _P(w["b2"])
        nbrs = perfect_merges(b, a) if w["op"] == "merge" else perfect_splits(b, a)
        if b2 not in nbrs or not (1 < a.k < a.n):
            return False
        if w["order"] == "A,B":
            gain = _score(i, w["a"], w["b2"], cfg) - _score(i, w["a"], w["b"], cfg)
        else:
            gain = _score(i, w["b2"], w["a"], cfg) - _score(i, w["b"], w["a"], cfg)
        return bool(gain <= STRICT_TOL)
    if kind in ("min_not_constant",):
        q1, q2 = w["pc1"], w["pc2"]
        return q1[0] == q1[3] == q2[0] == q2[3] == 0 and abs(_pair_score(i, q1) - _pair_score(i, q2)) > EQ_TOL
    if kind == "min_not_strict":
        q1, q2 = w["pc1"], w["pc2"]
        return q1[0] == q1[3] == 0 and q2[0] + q2[3] > 0 and _pair_score(i, q2) <= _pair_score(i, q1) + STRICT_TOL
    if kind == "strong_not_monotone":
        q1, q2 = w["pc1"], w["pc2"]
        pos = {"N11": 0, "N10": 1, "N01": 2, "N00": 3}[w["component"]]
        diff = [y - x for x, y in zip(q1, q2)]
        if diff != [1.0 if j == pos else 0.0 for j in range(4)]:
            return False
        sign = 1 if pos in (0, 3) else -1
        cond = (q1[1] + q1[2] > 0) if sign > 0 else (q1[0] + q1[3] > 0)
        return bool(cond and sign * (_pair_score(i, q2) - _pair_score(i, q1)) <= STRICT_TOL)
    if kind == "baseline_differs":
        m1 = exact_class_mean(i, _P(w["a1"]), ClusterSizeSpec(tuple(w["s1"])), cfg)
        m2 = exact_class_mean(i, _P(w["a2"]), ClusterSizeSpec(tuple(w["s2"])), cfg)
        return abs(m1 - m2) > EQ_TOL
    if kind == "substituted_not_constant":
        v1 = ix.substituted_index(i, *w["point1"])
        v2 = ix.substituted_index(i, *w["point2"])
        return abs(v1 - v2) > EQ_TOL
    return False
