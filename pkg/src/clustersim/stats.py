"""Statistical baseline tests on random clusterings.

Candidates are drawn uniformly from fixed cluster-size classes and scored
against a reference.  One-way ANOVA asks whether the expected score differs
between size classes; the selection test asks whether one class wins a pool
of candidates more often than the others.  Per-``n`` p-values are combined
with Fisher's method.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import indices as ix
from .partitions import ClusterSizeSpec, Partition, enumerate_with_sizes, ENUMERATION_GUARD
from .sampling import SeededGenerator, balanced_sizes, coupled_labels, sample_labels

log = logging.getLogger(__name__)

ALPHA = 0.05
MIN_GROUP = 30


class DegenerateTest(ValueError):
    """Raised when a test statistic is undefined for the drawn data."""


@dataclass
class TestReport:
    test: str
    index_id: str
    p_value: float
    statistic: float
    n: int | None = None
    specs: list = field(default_factory=list)
    r: int | None = None
    seed: int | None = None
    group_means: list = field(default_factory=list)
    wins: list = field(default_factory=list)
    ties: int = 0
    combines: str = ""

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value out of range: {self.p_value}")

    @property
    def decision(self) -> bool:
        """True when the null hypothesis is rejected at the 5% level."""
        return self.p_value < ALPHA

    def row(self) -> dict:
        return {
            "test": self.test, "index": self.index_id, "n": self.n,
            "specs": ";".join("/".join(map(str, s)) if len(s) <= 8 else f"BS(k={len(s)})" for s in self.specs),
            "combines": self.combines, "r": self.r, "seed": self.seed, "statistic": self.statistic,
            "p": self.p_value, "reject": self.decision,
        }


def chi2_sf(x: float, df: int) -> float:
    return float(special.chdtrc(df, x))


def f_sf(x: float, dfn: int, dfd: int) -> float:
    return float(special.fdtrc(dfn, dfd, x))


def fisher_combine(p_values) -> float:
    return fisher_statistic(p_values)[1]


def fisher_statistic(p_values) -> tuple[float, float]:
    """Fisher's method: ``-2 sum(ln p)`` against chi-squared with ``2m`` degrees of freedom."""
    p = np.asarray(list(p_values), dtype=float)
    if len(p) == 0:
        raise ValueError("no p-values to combine")
    if np.any(p <= 0) or np.any(p > 1):
        raise ValueError("p-values must lie in (0, 1]")
    stat = float(-2 * np.log(p).sum())
    return stat, chi2_sf(stat, 2 * len(p))


def one_way_anova(groups) -> tuple[float, float]:
    """F statistic and p-value for equal means across ``groups``."""
    groups = [np.asarray(g, dtype=float) for g in groups]
    k = len(groups)
    total = sum(len(g) for g in groups)
    if k < 2 or total <= k:
        raise DegenerateTest("need at least two groups and more observations than groups")
    grand = np.concatenate(groups).mean()
    ssb = sum(len(g) * (g.mean() - grand) ** 2 for g in groups)
    ssw = sum(((g - g.mean()) ** 2).sum() for g in groups)
    if ssw <= 0:
        raise DegenerateTest("zero within-group variance; F statistic undefined")
    F = (ssb / (k - 1)) / (ssw / (total - k))
    return float(F), f_sf(F, k - 1, total - k)


def _check_reference(a: Partition, specs) -> None:
    if not 1 < a.k < a.n:
        raise ValueError("reference must have 1 < k < n clusters")
    if any(s.n != a.n for s in specs):
        raise ValueError("all size specs must match the reference size")


def _moment_config(g: SeededGenerator, samples: int) -> ix.SamplingConfig:
    # independent stream for the null moments of AMI/SMI
    seed = int(g.spawn(7919).rng().integers(0, 2**63))
    return ix.SamplingConfig(samples=samples, seed=seed, mode="monte-carlo")


def draw_scores(ids, a: Partition, specs, r: int, g: SeededGenerator,
                moment_samples: int = 20000) -> dict[str, np.ndarray]:
    """Scores of ``a`` against ``r`` uniform draws from each spec, shape ``(len(specs), r)`` per index."""
    ids = [ix.resolve_id(i) for i in ids]
    cfg = _moment_config(g, moment_samples) if any(ix.lookup(i).needs_sampling for i in ids) else None
    out = {i: np.empty((len(specs), r)) for i in ids}
    for pos, spec in enumerate(specs):
        labels = sample_labels(spec, g.spawn(pos).rng(), r)
        scores = ix.score_batch(ids, a.array, labels, cfg)
        for i in ids:
            out[i][pos] = scores[i]
    return out


def anova_baseline_test(index_id: str, a: Partition, specs, r: int, g: SeededGenerator,
                        scores: np.ndarray | None = None) -> TestReport:
    """One-way ANOVA of ``V(a, B)`` across size classes, ``B`` uniform within each class."""
    index_id = ix.resolve_id(index_id)
    specs = list(specs)
    _check_reference(a, specs)
    if r < 2:
        raise ValueError("need r >= 2 draws per spec")
    if r < MIN_GROUP:
        log.warning("ANOVA with r=%d < %d draws per group; normal approximation is rough", r, MIN_GROUP)
    if scores is None:
        scores = draw_scores([index_id], a, specs, r, g.spawn(0))[index_id]
    if np.isnan(scores).any():
        raise DegenerateTest(f"{index_id} undefined on some draws")
    F, p = one_way_anova(list(scores))
    return TestReport("anova-baseline", index_id, p, F, a.n, [s.sizes for s in specs], r, g.seed,
                      group_means=[float(x) for x in scores.mean(axis=1)])


def chisq_selection_bias_test(index_id: str, a: Partition, specs, r: int, g: SeededGenerator,
                              scores: np.ndarray | None = None) -> TestReport:
    """Chi-squared test that each size class wins a pool of one draw per class equally often."""
    index_id = ix.resolve_id(index_id)
    specs = list(specs)
    _check_reference(a, specs)
    if len(specs) < 2:
        raise ValueError("need at least two specs")
    if scores is None:
        scores = draw_scores([index_id], a, specs, r, g.spawn(1))[index_id]
    oriented = ix.oriented(index_id, scores).T  # (r, S)
    if np.isnan(oriented).any():
        raise DegenerateTest(f"{index_id} undefined on some draws")
    best = oriented.max(axis=1, keepdims=True)
    at_best = np.abs(oriented - best) <= 1e-12
    ties = int((at_best.sum(axis=1) > 1).sum())
    if ties:
        log.info("%s selection test: %d pools with tied winners (lowest position wins)", index_id, ties)
    winners = np.argmax(at_best, axis=1)
    wins = np.bincount(winners, minlength=len(specs))
    expected = r / len(specs)
    stat = float(((wins - expected) ** 2 / expected).sum())
    p = chi2_sf(stat, len(specs) - 1)
    return TestReport("chisq-selection", index_id, p, stat, a.n, [s.sizes for s in specs], r, g.seed,
                      wins=[int(w) for w in wins], ties=ties)


def suite_specs(n: int) -> tuple[ClusterSizeSpec, list[ClusterSizeSpec]]:
    """Reference sizes BS(n, floor(sqrt n)) and candidate sizes for k = floor(n^0.25), floor(n^0.5), floor(n^0.75)."""
    ref = balanced_sizes(n, math.isqrt(n))
    ks = [max(1, int(math.floor(n ** e + 1e-9))) for e in (0.25, 0.5, 0.75)]
    return ref, [balanced_sizes(n, k) for k in ks]


def baseline_suite(ids, n_values=(50, 100, 150, 200), r: int = 100, seed: int = 0,
                   selection: bool = True, moment_samples: int = 20000) -> list[TestReport]:
    """Per-``n`` ANOVA (and selection) tests for every index, then a Fisher-combined row per index and test."""
    ids = [ix.resolve_id(i) for i in ids]
    master = SeededGenerator(seed)
    reports: list[TestReport] = []
    per_test: dict[tuple[str, str], list[float]] = {}
    for n in n_values:
        ref_spec, specs = suite_specs(n)
        a = Partition(tuple(ref_spec.block_labels().tolist()))
        g = master.spawn(n)
        anova_scores = draw_scores(ids, a, specs, r, g.spawn(0), moment_samples)
        sel_scores = draw_scores(ids, a, specs, r, g.spawn(1), moment_samples) if selection else None
        for i in ids:
            tests = [("anova-baseline", anova_baseline_test, anova_scores)]
            if selection:
                tests.append(("chisq-selection", chisq_selection_bias_test, sel_scores))
            for name, fn, scores in tests:
                try:
                    rep = fn(i, a, specs, r, g, scores=scores[i])
                except DegenerateTest as exc:
                    log.warning("%s %s at n=%d: %s", name, i, n, exc)
                    continue
                rep.seed = seed
                reports.append(rep)
                per_test.setdefault((i, name), []).append(max(rep.p_value, 1e-300))
    for (i, name), ps in per_test.items():
        stat, p = fisher_statistic(ps)
        reports.append(TestReport("fisher-combined", i, p, stat, None, [], r, seed, combines=name))
    return reports


# -- correlation distance deviation --------------------------------------------

def _cd_draws(a: Partition, spec: ClusterSizeSpec, cfg: ix.SamplingConfig) -> np.ndarray:
    if not 1 < a.k < a.n:
        raise ValueError("reference must have 1 < k < n clusters")
    if spec.n != a.n:
        raise ValueError("size specification does not match reference")
    if spec.k in (1, spec.n):
        raise ValueError("correlation coefficient undefined against a trivial candidate")
    if cfg.mode == "exact":
        if a.n > ENUMERATION_GUARD:
            raise ValueError(f"exact enumeration requires n <= {ENUMERATION_GUARD}")
        labels = np.array([p.labels for p in enumerate_with_sizes(spec)], dtype=np.int64)
    else:
        labels = sample_labels(spec, SeededGenerator(cfg.seed).spawn(31).rng(), cfg.samples)
    return ix.score_batch(["correlation_coefficient"], a.array, labels)["correlation_coefficient"]


def estimate_cd_deviation(a: Partition, spec: ClusterSizeSpec, cfg: ix.SamplingConfig) -> float:
    """``E[CD(a, B)] - 1/2`` for ``B`` uniform with sizes ``spec``."""
    cc = _cd_draws(a, spec, cfg)
    return float(np.mean(np.arccos(np.clip(cc, -1, 1)) / np.pi) - 0.5)


def cd_deviation_series(a: Partition, spec: ClusterSizeSpec, cfg: ix.SamplingConfig, terms: int = 5) -> float:
    """Same deviation from odd moments of CC via the arcsine series, truncated after ``terms``."""
    cc = _cd_draws(a, spec, cfg)
    total = 0.0
    for k in range(terms + 1):
        coef = math.comb(2 * k, k) / 4**k / (2 * k + 1)
        total += coef * float(np.mean(cc ** (2 * k + 1)))
    return -total / math.pi


# -- expected-score comparison between two size classes ----------------------

@dataclass
class ScoreComparison:
    index_id: str
    mean_1: float
    mean_2: float
    diff: float
    stderr: float
    samples: int

    @property
    def z(self) -> float:
        return self.diff / self.stderr if self.stderr > 0 else math.copysign(math.inf, self.diff)


def compare_expected_scores(index_id: str, a: Partition, spec_1: ClusterSizeSpec, spec_2: ClusterSizeSpec,
                            samples: int = 100_000, seed: int = 0) -> ScoreComparison:
    """Estimate ``E[V(a, B2)] - E[V(a, B1)]`` with ``B1 ~ spec_1``, ``B2 ~ spec_2`` on shared permutations."""
    index_id = ix.resolve_id(index_id)
    if spec_1.n != a.n or spec_2.n != a.n:
        raise ValueError("size specifications must match the reference size")
    l1, l2 = coupled_labels([spec_1, spec_2], SeededGenerator(seed).rng(), samples)
    v1 = ix.score_batch([index_id], a.array, l1)[index_id]
    v2 = ix.score_batch([index_id], a.array, l2)[index_id]
    d = v2 - v1
    return ScoreComparison(index_id, float(v1.mean()), float(v2.mean()), float(d.mean()),
                           float(d.std(ddof=1) / math.sqrt(samples)), samples)
