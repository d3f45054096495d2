"""Cluster similarity indices.

Pair-counting indices are numpy-vectorized functions of ``(N11, N10, N01, N00)``;
general indices are vectorized functions of dense contingency tables with
arbitrary leading batch dimensions.  Undefined values (vanishing denominators)
come out as ``nan`` in the array API and as an explicit undefined marker in
:class:`IndexScore`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .partitions import (
    ENUMERATION_GUARD,
    ClusterSizeSpec,
    PairCounts,
    Partition,
    dense_contingency,
    enumerate_with_sizes,
    pair_counts,
)
from .sampling import SeededGenerator, sample_labels

PAIR = "pair-counting"
INFO = "information-theoretic"
SETM = "set-matching"

_ZERO = 1e-15


def _div(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.full(np.broadcast(num, den).shape, np.nan)
    np.divide(num, den, out=out, where=den != 0)
    return out


def _cc(n11, n10, n01, n00):
    m_a, m_b = n11 + n10, n11 + n01
    cc = _div(n11 * n00 - n10 * n01, np.sqrt(m_a * m_b * (n00 + n10) * (n00 + n01)))
    # identical partitions: correlation of a vector with itself
    same = (n10 == 0) & (n01 == 0) & (n11 + n00 > 0)
    return np.where(same, 1.0, cc)


def _cd(n11, n10, n01, n00):
    return np.arccos(np.clip(_cc(n11, n10, n01, n00), -1.0, 1.0)) / np.pi


def _ar(n11, n10, n01, n00):
    total = n11 + n10 + n01 + n00
    m_a, m_b = n11 + n10, n11 + n01
    expected = _div(m_a * m_b, total)
    return _div(n11 - expected, (m_a + m_b) / 2 - expected)


def _ss1(n11, n10, n01, n00):
    return 0.25 * (_div(n11, n11 + n10) + _div(n11, n11 + n01) + _div(n00, n00 + n10) + _div(n00, n00 + n01))


PAIR_FORMULAS: dict[str, Callable] = {
    "rand": lambda a, b, c, d: _div(a + d, a + b + c + d),
    "adjusted_rand": _ar,
    "jaccard": lambda a, b, c, d: _div(a, a + b + c),
    "jaccard_distance": lambda a, b, c, d: _div(b + c, a + b + c),
    "wallace_1": lambda a, b, c, d: _div(a, a + b),
    "wallace_2": lambda a, b, c, d: _div(a, a + c),
    "dice": lambda a, b, c, d: _div(2 * a, 2 * a + b + c),
    "correlation_coefficient": _cc,
    "correlation_distance": _cd,
    "sokal_sneath_1": _ss1,
    "minkowski": lambda a, b, c, d: np.sqrt(_div(b + c, a + b)),
    "hubert": lambda a, b, c, d: _div(a + d - b - c, a + b + c + d),
    "fowlkes_mallows": lambda a, b, c, d: _div(a, np.sqrt((a + b) * (a + c))),
    "sokal_sneath_2": lambda a, b, c, d: _div(0.5 * a, 0.5 * a + b + c),
    "normalized_mirkin": lambda a, b, c, d: _div(b + c, a + b + c + d),
    "kulczynski": lambda a, b, c, d: 0.5 * (_div(a, a + b) + _div(a, a + c)),
    "mcconnaughey": lambda a, b, c, d: _div(a * a - b * c, (a + b) * (a + c)),
    "yule": lambda a, b, c, d: _div(a * d - b * c, a * b + c * d),
    "baulieu_1": lambda a, b, c, d: _div((a + b + c + d) * (a + d) + (b - c) ** 2, (a + b + c + d) ** 2),
    "russell_rao": lambda a, b, c, d: _div(a, a + b + c + d),
    "fager_mcgowan": lambda a, b, c, d: _div(a, np.sqrt((a + b) * (a + c))) - _div(1.0, 2 * np.sqrt(a + b)),
    "peirce": lambda a, b, c, d: _div(a * d - b * c, (a + c) * (d + b)),
    "baulieu_2": lambda a, b, c, d: _div(a * d - b * c, (a + b + c + d) ** 2),
    "sokal_sneath_3": lambda a, b, c, d: _div(a * d, np.sqrt((a + b) * (a + c) * (d + b) * (d + c))),
    "gower_legendre": lambda a, b, c, d: _div(a + d, a + 0.5 * (b + c) + d),
    "rogers_tanimoto": lambda a, b, c, d: _div(a + d, a + 2 * (b + c) + d),
    "goodman_kruskal": lambda a, b, c, d: _div(a * d - b * c, a * d + b * c),
}


def pair_index_values(index_id: str, n11, n10, n01, n00) -> np.ndarray:
    """Vectorized pair-counting index; ``nan`` where undefined."""
    try:
        fn = PAIR_FORMULAS[index_id]
    except KeyError:
        raise KeyError(f"unknown pair-counting index {index_id!r}") from None
    args = [np.asarray(x, dtype=float) for x in (n11, n10, n01, n00)]
    with np.errstate(all="ignore"):
        return np.asarray(fn(*args), dtype=float)


# -- general indices on dense contingency tables ------------------------------

@dataclass
class TableStats:
    """Entropies and marginals of a batch of contingency tables ``(..., kA, kB)``."""

    table: np.ndarray
    n: np.ndarray
    row: np.ndarray
    col: np.ndarray
    h_a: np.ndarray
    h_b: np.ndarray
    h_ab: np.ndarray
    k_a: np.ndarray
    k_b: np.ndarray

    @property
    def mi(self) -> np.ndarray:
        return self.h_a + self.h_b - self.h_ab

    @classmethod
    def of(cls, table) -> "TableStats":
        t = np.asarray(table, dtype=float)
        n = t.sum(axis=(-2, -1))
        row, col = t.sum(axis=-1), t.sum(axis=-2)
        nn = n[..., None]
        flat = t.reshape(t.shape[:-2] + (-1,))
        return cls(
            table=t,
            n=n,
            row=row,
            col=col,
            h_a=_entropy_last(row, nn),
            h_b=_entropy_last(col, nn),
            h_ab=_entropy_last(flat, nn),
            k_a=np.count_nonzero(row, axis=-1),
            k_b=np.count_nonzero(col, axis=-1),
        )

    def pair_counts(self) -> tuple[np.ndarray, ...]:
        t = self.table
        n11 = (t * (t - 1) / 2).sum(axis=(-2, -1))
        m_a = (self.row * (self.row - 1) / 2).sum(axis=-1)
        m_b = (self.col * (self.col - 1) / 2).sum(axis=-1)
        total = self.n * (self.n - 1) / 2
        return n11, m_a - n11, m_b - n11, total - m_a - m_b + n11


def _entropy_last(counts, n):
    p = counts / n
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def _nmi(s: TableStats):
    return _div(2 * s.mi, np.where(s.h_a + s.h_b > _ZERO, s.h_a + s.h_b, 0.0))


def _nmi_max(s: TableStats):
    den = np.maximum(s.h_a, s.h_b)
    return _div(s.mi, np.where(den > _ZERO, den, 0.0))


def _fnmi(s: TableStats):
    return np.exp(-np.abs(s.k_a - s.k_b) / s.k_a) * _nmi(s)


def _vi(s: TableStats):
    return 2 * s.h_ab - s.h_a - s.h_b


def _fmeasure(s: TableStats):
    t = s.table
    recall = t.max(axis=-1).sum(axis=-1) / s.n
    precision = t.max(axis=-2).sum(axis=-1) / s.n
    return _div(2 * recall * precision, recall + precision)


def _bcubed(s: TableStats):
    sq = s.table ** 2
    recall = _div(sq.sum(axis=-1), s.row)
    recall = np.where(s.row > 0, recall, 0.0).sum(axis=-1) / s.n
    precision = _div(sq.sum(axis=-2), s.col)
    precision = np.where(s.col > 0, precision, 0.0).sum(axis=-1) / s.n
    return _div(2 * recall * precision, recall + precision)


def _ami(s: TableStats, mean, std):
    den = np.sqrt(s.h_a * s.h_b) - mean
    return _div(s.mi - mean, np.where(np.abs(den) > 1e-12, den, 0.0))


def _smi(s: TableStats, mean, std):
    std = np.asarray(std, dtype=float)
    return _div(s.mi - mean, np.where(std > 1e-12, std, 0.0))


GENERAL_FORMULAS: dict[str, Callable] = {
    "nmi": _nmi,
    "nmi_max": _nmi_max,
    "fnmi": _fnmi,
    "vi": _vi,
    "fmeasure": _fmeasure,
    "bcubed": _bcubed,
}
SAMPLED_FORMULAS: dict[str, Callable] = {"ami": _ami, "smi": _smi}


def general_index_values(index_id: str, stats: TableStats, mean=None, std=None) -> np.ndarray:
    """Vectorized general index over a batch of tables; AMI/SMI need null moments of M."""
    with np.errstate(all="ignore"):
        if index_id in GENERAL_FORMULAS:
            return np.asarray(GENERAL_FORMULAS[index_id](stats), dtype=float)
        if index_id in SAMPLED_FORMULAS:
            if mean is None:
                raise ValueError(f"{index_id} needs the null mean/std of mutual information")
            return np.asarray(SAMPLED_FORMULAS[index_id](stats, mean, std), dtype=float)
    raise KeyError(f"unknown general index {index_id!r}")


# -- registry ------------------------------------------------------------------

@dataclass(frozen=True)
class IndexDescriptor:
    id: str
    name: str
    family: str
    higher_is_better: bool = True
    c_max: float | None = None
    c_min: float | None = None
    c_base: float | None = None
    equivalence_rep: str | None = None
    needs_sampling: bool = False
    linear_complexity: bool = True

    def __post_init__(self):
        if self.equivalence_rep is None:
            object.__setattr__(self, "equivalence_rep", self.id)

    @property
    def is_pair_counting(self) -> bool:
        return self.family == PAIR


def _p(id, name, **kw):
    return IndexDescriptor(id, name, PAIR, **kw)


_REGISTRY: tuple[IndexDescriptor, ...] = (
    _p("rand", "Rand", c_max=1.0, c_min=0.0),
    _p("adjusted_rand", "Adjusted Rand", c_max=1.0, c_base=0.0),
    _p("jaccard", "Jaccard", c_max=1.0),
    _p("jaccard_distance", "Jaccard Distance", higher_is_better=False, c_max=0.0, equivalence_rep="jaccard"),
    _p("wallace_1", "Wallace1"),
    _p("wallace_2", "Wallace2", equivalence_rep="wallace_1"),
    _p("dice", "Dice", c_max=1.0),
    _p("correlation_coefficient", "Correlation Coefficient", c_max=1.0, c_min=-1.0, c_base=0.0),
    _p("correlation_distance", "Correlation Distance", higher_is_better=False, c_max=0.0, c_min=1.0, c_base=0.5),
    _p("sokal_sneath_1", "Sokal&Sneath-I", c_max=1.0, c_min=0.0, c_base=0.5),
    _p("minkowski", "Minkowski", higher_is_better=False, c_max=0.0),
    _p("hubert", "Hubert", c_max=1.0, c_min=-1.0, equivalence_rep="rand"),
    _p("fowlkes_mallows", "Fowlkes&Mallow", c_max=1.0),
    _p("sokal_sneath_2", "Sokal&Sneath-II", c_max=1.0),
    _p("normalized_mirkin", "Normalized Mirkin", higher_is_better=False, c_max=0.0, c_min=1.0, equivalence_rep="rand"),
    _p("kulczynski", "Kulczynski", c_max=1.0),
    _p("mcconnaughey", "McConnaughey", c_max=1.0, equivalence_rep="kulczynski"),
    _p("yule", "Yule"),
    _p("baulieu_1", "Baulieu-I"),
    _p("russell_rao", "Russell&Rao"),
    _p("fager_mcgowan", "Fager&McGowan"),
    _p("peirce", "Peirce"),
    _p("baulieu_2", "Baulieu-II"),
    _p("sokal_sneath_3", "Sokal&Sneath-III"),
    _p("gower_legendre", "Gower&Legendre", c_max=1.0),
    _p("rogers_tanimoto", "Rogers&Tanimoto", c_max=1.0),
    _p("goodman_kruskal", "Goodman&Kruskal"),
    IndexDescriptor("nmi", "NMI", INFO, c_max=1.0),
    IndexDescriptor("nmi_max", "NMI_max", INFO, c_max=1.0),
    IndexDescriptor("fnmi", "FNMI", INFO, c_max=1.0),
    IndexDescriptor("vi", "Variation of Information", INFO, higher_is_better=False, c_max=0.0),
    IndexDescriptor("ami", "AMI", INFO, c_max=1.0, c_base=0.0, needs_sampling=True, linear_complexity=False),
    IndexDescriptor("smi", "SMI", INFO, c_base=0.0, needs_sampling=True, linear_complexity=False),
    IndexDescriptor("fmeasure", "FMeasure", SETM, c_max=1.0),
    IndexDescriptor("bcubed", "BCubed", SETM, c_max=1.0),
)
_BY_ID = {d.id: d for d in _REGISTRY}

ALIASES = {
    "r": "rand", "ar": "adjusted_rand", "ari": "adjusted_rand", "j": "jaccard", "jd": "jaccard_distance",
    "w": "wallace_1", "w1": "wallace_1", "w2": "wallace_2", "d": "dice", "cc": "correlation_coefficient",
    "cd": "correlation_distance", "ss": "sokal_sneath_1", "s&s": "sokal_sneath_1", "h": "hubert",
    "fm": "fmeasure", "bc": "bcubed",
}

TABLE1_IDS = ("nmi", "nmi_max", "fnmi", "vi", "smi", "fmeasure", "bcubed", "ami")
TABLE2_IDS = ("rand", "adjusted_rand", "jaccard", "wallace_1", "dice",
              "correlation_coefficient", "sokal_sneath_1", "correlation_distance")
COVER_IDS = ("nmi", "nmi_max", "vi", "fnmi", "ami", "rand", "adjusted_rand", "jaccard",
             "wallace_1", "sokal_sneath_1", "correlation_coefficient", "fmeasure", "bcubed")


def index_registry() -> list[IndexDescriptor]:
    return list(_REGISTRY)


def resolve_id(name: str) -> str:
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in _BY_ID:
        raise KeyError(f"unknown index {name!r}; available: {', '.join(_BY_ID)}")
    return key


def lookup(index_id: str) -> IndexDescriptor:
    return _BY_ID[resolve_id(index_id)]


def oriented(index_id: str, values):
    """Flip distance-like indices so that larger always means more similar."""
    return values if _BY_ID[index_id].higher_is_better else -np.asarray(values)


# -- scores --------------------------------------------------------------------

@dataclass(frozen=True)
class IndexScore:
    index_id: str
    value: float
    undefined: str | None = None
    stderr: float | None = None
    samples: int | None = None

    @property
    def defined(self) -> bool:
        return self.undefined is None


@dataclass(frozen=True)
class SamplingConfig:
    """How null moments of mutual information are obtained for AMI and SMI."""

    samples: int = 1000
    seed: int = 0
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in ("exact", "monte-carlo"):
            raise ValueError(f"mode must be 'exact' or 'monte-carlo', not {self.mode!r}")
        if self.samples < 1:
            raise ValueError("samples must be positive")


def eval_pair_index(index_id: str, pc: PairCounts) -> IndexScore:
    index_id = resolve_id(index_id)
    if index_id not in PAIR_FORMULAS:
        raise ValueError(f"{index_id} is not a pair-counting index")
    value = float(pair_index_values(index_id, *pc.as_tuple()))
    if math.isnan(value):
        return IndexScore(index_id, value, undefined=f"vanishing denominator at pair counts {pc.as_tuple()}")
    return IndexScore(index_id, value)


@dataclass(frozen=True)
class MIMoments:
    mean: float
    std: float
    stderr: float
    samples: int


def _mi_batch(la: np.ndarray, lb: np.ndarray) -> np.ndarray:
    """Mutual information between ``la`` (n,) and each row of ``lb`` (S, n)."""
    lb = np.atleast_2d(lb)
    s_count, n = lb.shape
    ka, kb = int(la.max()) + 1, int(lb.max()) + 1
    codes = la[None, :] * kb + lb + (np.arange(s_count) * ka * kb)[:, None]
    joint = np.bincount(codes.ravel(), minlength=s_count * ka * kb).reshape(s_count, ka * kb)
    rows = np.bincount(la, minlength=ka)
    cols = np.bincount((lb + (np.arange(s_count) * kb)[:, None]).ravel(), minlength=s_count * kb).reshape(s_count, kb)
    h_ab = _entropy_last(joint, n)
    h_a = _entropy_last(rows, n)
    h_b = _entropy_last(cols, n)
    return h_a + h_b - h_ab


@lru_cache(maxsize=None)
def _exact_moments(sizes_a: tuple[int, ...], sizes_b: tuple[int, ...]) -> MIMoments:
    spec_a, spec_b = ClusterSizeSpec(sizes_a), ClusterSizeSpec(sizes_b)
    # E over random B with A fixed equals E over random A with B fixed; enumerate the smaller side
    if spec_a.count() < spec_b.count():
        spec_a, spec_b = spec_b, spec_a
    fixed = spec_a.block_labels()
    rows = np.array([p.labels for p in enumerate_with_sizes(spec_b)], dtype=np.int64)
    values = np.concatenate([_mi_batch(fixed, rows[i:i + 4096]) for i in range(0, len(rows), 4096)])
    return MIMoments(float(values.mean()), float(values.std()), 0.0, len(values))


_MC_CACHE: dict = {}


def mi_null_moments(sizes_a: Sequence[int], sizes_b: Sequence[int], cfg: SamplingConfig) -> MIMoments:
    """Mean and standard deviation of M(A, B') for B' uniform over partitions with sizes ``sizes_b``."""
    sa = ClusterSizeSpec(tuple(sizes_a)).sizes
    sb = ClusterSizeSpec(tuple(sizes_b)).sizes
    if sum(sa) != sum(sb):
        raise ValueError("size specifications must have equal n")
    if cfg.mode == "exact":
        if sum(sa) > ENUMERATION_GUARD:
            raise ValueError(f"exact enumeration requires n <= {ENUMERATION_GUARD}")
        return _exact_moments(sa, sb)
    key = (sa, sb, cfg.samples, cfg.seed)
    if key not in _MC_CACHE:
        rng = SeededGenerator(cfg.seed).spawn(_spec_key(sa), _spec_key(sb)).rng()
        fixed = ClusterSizeSpec(sa).block_labels()
        values = []
        left = cfg.samples
        chunk = max(1, min(2_000_000 // len(fixed), 4_000_000 // (len(sa) * len(sb))))
        while left > 0:
            m = min(chunk, left)
            values.append(_mi_batch(fixed, sample_labels(ClusterSizeSpec(sb), rng, m)))
            left -= m
        v = np.concatenate(values)
        std = float(v.std(ddof=1)) if len(v) > 1 else 0.0
        if len(_MC_CACHE) > 4096:
            _MC_CACHE.clear()
        _MC_CACHE[key] = MIMoments(float(v.mean()), std, std / math.sqrt(len(v)), len(v))
    return _MC_CACHE[key]


def _spec_key(sizes: tuple[int, ...]) -> int:
    h = 0
    for s in sizes:
        h = (h * 1_000_003 + s) % (2**63)
    return h


def expected_mutual_information(a: Partition, spec: ClusterSizeSpec | Sequence[int], cfg: SamplingConfig) -> float:
    sizes = spec.sizes if isinstance(spec, ClusterSizeSpec) else tuple(spec)
    if sum(sizes) != a.n:
        raise ValueError("size specification does not match partition size")
    return mi_null_moments(a.sizes, sizes, cfg).mean


def _general_score(index_id: str, stats: TableStats, a: Partition, b: Partition, cfg) -> IndexScore:
    if index_id in SAMPLED_FORMULAS:
        if cfg is None:
            raise ValueError(f"{index_id} requires a SamplingConfig")
        mom = mi_null_moments(a.sizes, b.sizes, cfg)
        value = float(general_index_values(index_id, stats, mom.mean, mom.std))
        stderr = None
        if cfg.mode == "monte-carlo" and not math.isnan(value):
            if index_id == "ami":
                den = math.sqrt(float(stats.h_a * stats.h_b)) - mom.mean
                stderr = abs(float(stats.mi) - math.sqrt(float(stats.h_a * stats.h_b))) / den**2 * mom.stderr
            else:
                stderr = mom.stderr / mom.std if mom.std > 0 else None
        samples = mom.samples
    else:
        value = float(general_index_values(index_id, stats))
        stderr = samples = None
    if math.isnan(value):
        return IndexScore(index_id, value, undefined="zero normalization (degenerate entropy or null spread)")
    return IndexScore(index_id, value, stderr=stderr, samples=samples)


def eval_general_index(index_id: str, a: Partition, b: Partition, cfg: SamplingConfig | None = None) -> IndexScore:
    index_id = resolve_id(index_id)
    if index_id in PAIR_FORMULAS:
        raise ValueError(f"{index_id} is a pair-counting index; use eval_pair_index")
    stats = TableStats.of(dense_contingency(a, b))
    return _general_score(index_id, stats, a, b, cfg)


def evaluate(index_id: str, a: Partition, b: Partition, cfg: SamplingConfig | None = None) -> IndexScore:
    """Evaluate any registered index on a pair of partitions."""
    index_id = resolve_id(index_id)
    if index_id in PAIR_FORMULAS:
        return eval_pair_index(index_id, pair_counts(a, b))
    return eval_general_index(index_id, a, b, cfg)


def score_pair(ids: Iterable[str], a: Partition, b: Partition, cfg: SamplingConfig | None = None) -> dict[str, IndexScore]:
    """Evaluate several indices, sharing the contingency table."""
    ids = [resolve_id(i) for i in ids]
    stats = TableStats.of(dense_contingency(a, b))
    out = {}
    pcs = None
    for i in ids:
        if i in PAIR_FORMULAS:
            if pcs is None:
                pcs = PairCounts(*(int(round(float(x))) for x in stats.pair_counts()))
            out[i] = eval_pair_index(i, pcs)
        else:
            out[i] = _general_score(i, stats, a, b, cfg)
    return out


def batch_tables(ref: np.ndarray, cands: np.ndarray) -> np.ndarray:
    """Dense contingency tables of ``ref`` (n,) or (S, n) against each row of ``cands`` (S, n)."""
    cands = np.atleast_2d(cands)
    ref = np.broadcast_to(ref, cands.shape)
    s_count = cands.shape[0]
    ka, kb = int(ref.max()) + 1, int(cands.max()) + 1
    codes = ref * kb + cands + (np.arange(s_count) * ka * kb)[:, None]
    return np.bincount(codes.ravel(), minlength=s_count * ka * kb).reshape(s_count, ka, kb)


def _row_sizes(labels: np.ndarray) -> tuple[int, ...]:
    return tuple(int(x) for x in np.bincount(labels) if x)


def score_pairs(ids: Iterable[str], left: np.ndarray, right: np.ndarray, cfg: SamplingConfig | None = None,
                max_cells: int = 4_000_000) -> dict[str, np.ndarray]:
    """Scores ``V(left[i], right[i])`` for label rows; ``left`` may be a single row shared by all.

    Rows are processed in chunks so that no dense table batch exceeds ``max_cells``.
    Labels must be non-negative integers; ``nan`` marks undefined values.
    """
    ids = [resolve_id(i) for i in ids]
    right = np.atleast_2d(np.asarray(right, dtype=np.int64))
    left = np.asarray(left, dtype=np.int64)
    shared = left.ndim == 1
    s_count = right.shape[0]
    ka, kb = int(left.max()) + 1, int(right.max()) + 1
    step = max(1, max_cells // (ka * kb))
    out = {i: np.empty(s_count) for i in ids}
    sampled = any(i in SAMPLED_FORMULAS for i in ids)
    if sampled and cfg is None:
        raise ValueError("AMI/SMI require a SamplingConfig")
    shared_sizes = _row_sizes(left) if shared else None
    for lo in range(0, s_count, step):
        chunk = right[lo:lo + step]
        lchunk = left if shared else left[lo:lo + step]
        stats = TableStats.of(batch_tables(lchunk, chunk))
        pcs = stats.pair_counts() if any(i in PAIR_FORMULAS for i in ids) else None
        mean = std = None
        if sampled:
            mean, std = np.empty(len(chunk)), np.empty(len(chunk))
            for r, row in enumerate(chunk):
                sizes_a = shared_sizes or _row_sizes(lchunk[r])
                mom = mi_null_moments(sizes_a, _row_sizes(row), cfg)
                mean[r], std[r] = mom.mean, mom.std
        for i in ids:
            if i in PAIR_FORMULAS:
                out[i][lo:lo + step] = pair_index_values(i, *pcs)
            else:
                out[i][lo:lo + step] = general_index_values(i, stats, mean, std)
    return out


def score_batch(ids: Iterable[str], ref: np.ndarray, cands: np.ndarray, cfg: SamplingConfig | None = None,
                max_cells: int = 4_000_000) -> dict[str, np.ndarray]:
    """Scores of ``ref`` against every candidate label row."""
    return score_pairs(ids, np.asarray(ref).ravel(), cands, cfg, max_cells)


# -- expected pair counts and substitution -------------------------------------

def expected_pair_counts(m_a: float, m_b: float, N: float) -> PairCounts:
    """Pair counts of a random pair of clusterings with ``m_a``, ``m_b`` intra-cluster pairs."""
    if not N > 0:
        raise ValueError("N must be positive")
    if not (0 <= m_a <= N and 0 <= m_b <= N):
        raise ValueError(f"need 0 <= m_a, m_b <= N, got m_a={m_a}, m_b={m_b}, N={N}")
    n11 = m_a * m_b / N
    # clamp rounding noise; every component is nonnegative in exact arithmetic
    return PairCounts(n11, max(m_a - n11, 0.0), max(m_b - n11, 0.0), max(N - m_a - m_b + n11, 0.0))


def substituted_values(index_id: str, m_a, m_b, N) -> np.ndarray:
    """Vectorized ``V(expected pair counts)`` over arrays of ``m_a``, ``m_b``."""
    m_a, m_b, N = (np.asarray(x, dtype=float) for x in (m_a, m_b, N))
    n11 = m_a * m_b / N
    return pair_index_values(index_id, n11, m_a - n11, m_b - n11, N - m_a - m_b + n11)


def substituted_index(index_id: str, m_a: float, m_b: float, N: float) -> float:
    index_id = resolve_id(index_id)
    if index_id not in PAIR_FORMULAS:
        raise ValueError(f"{index_id} is not a pair-counting index")
    if not (0 < m_a < N and 0 < m_b < N):
        raise ValueError("m_a and m_b must lie strictly between 0 and N")
    return eval_pair_index(index_id, expected_pair_counts(m_a, m_b, N)).value


def cc_embedding(a: Partition) -> np.ndarray:
    """Unit vector whose inner products reproduce the correlation coefficient."""
    if a.n < 2:
        raise ValueError("no pairs")
    N = a.n * (a.n - 1) // 2
    if a.k == 1:
        return np.full(N, 1 / math.sqrt(N))
    if a.k == a.n:
        return np.full(N, -1 / math.sqrt(N))
    v = a.pair_vector().astype(float)
    v -= a.intra_pairs / N
    return v / np.linalg.norm(v)
