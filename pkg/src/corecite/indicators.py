"""Within, between, topicality and bridging indicators for core sources.

Raw statistics count a source's coupled pairs inside and across communities
of a fixed partition. The same statistics are summed over configuration-model
samples of the citation network, and each final indicator is the raw ratio
minus its null ratio.

Because every citer pair of a source is coupled by that source, all pair
statistics follow from how many citers fall in each community: a community
holding ``n_l`` citers contributes ``C(n_l, 2)`` within pairs and two
communities contribute ``n_l1 * n_l2`` between pairs.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .citenet import CitationNetwork, CoreSet
from .community import Partition, PartitionEnsemble
from .coupling import CouplingNetwork, SourceContribution, pair_weight, source_contribution
from .errors import ConfigurationError, ContractViolation, EmptySummaryError
from .nullmodel import permuted_targets, sample_seed

INDICATORS = ("within", "between", "topicality", "bridging")
BRIDGING_DOMAINS = ("pair", "community")
FORMULAS = ("ratio", "literal")
_NEAR_ZERO = 1e-9


def _pair_stats(counts: np.ndarray, weighting: str, bridging_domain: str) -> np.ndarray:
    """(alpha, beta, gamma, delta) for each row of a sources x communities citer-count matrix."""
    counts = counts.astype(np.int64, copy=False)
    n = counts.sum(axis=1)
    within_l = counts * (counts - 1) // 2
    alpha = within_l.sum(axis=1)
    beta = n * (n - 1) // 2 - alpha
    gamma = within_l.max(axis=1, initial=0)
    if bridging_domain == "pair":
        if counts.shape[1] >= 2:
            top2 = np.partition(counts, counts.shape[1] - 2, axis=1)[:, -2:]
            delta = top2[:, 0] * top2[:, 1]
        else:
            delta = np.zeros_like(n)
    elif bridging_domain == "community":
        delta = (counts * (n[:, None] - counts)).max(axis=1, initial=0)
    else:
        raise ConfigurationError(f"unknown bridging domain {bridging_domain!r}")
    out = np.stack([alpha, beta, gamma, delta], axis=1).astype(np.float64)
    if weighting == "fractional":
        pw = np.where(n > 1, 1.0 / np.maximum(n - 1, 1), 0.0)
        out *= pw[:, None]
    elif weighting != "raw":
        raise ConfigurationError(f"unknown weighting {weighting!r}")
    return out


@dataclass(frozen=True)
class RawIndicatorSet:
    source: str
    partition_key: int
    alpha: float
    beta: float
    gamma: float
    delta: float
    within_by_community: dict[int, float] = field(default_factory=dict)
    between_by_pair: dict[tuple[int, int], float] = field(default_factory=dict)
    n_citers: int = 0

    @property
    def total(self) -> float:
        return self.alpha + self.beta


@dataclass(frozen=True)
class NullIndicatorSet:
    source: str
    partition_key: int
    chi: float
    phi: float
    psi: float
    omega: float
    n_samples: int


@dataclass(frozen=True)
class PartitionIndicators:
    """Final indicators of one source under one partition; None marks undefined."""

    source: str
    within: float | None
    between: float | None
    topicality: float | None
    bridging: float | None
    a_star: float | None = None

    @property
    def defined(self) -> dict[str, bool]:
        return {k: getattr(self, k) is not None for k in (*INDICATORS, "a_star")}


def _partition_labels_for(partition: Partition, ids: Iterable[str]) -> np.ndarray:
    idx = partition.index
    try:
        return partition.labels[[idx[i] for i in ids]]
    except KeyError as exc:
        raise ConfigurationError(f"partition does not cover citing document {exc.args[0]!r}") from None


def raw_indicators(
    contribution: SourceContribution,
    partition: Partition,
    bridging_domain: str = "pair",
) -> RawIndicatorSet:
    """Raw within/between weights of one source and their largest single-community parts."""
    labels = _partition_labels_for(partition, contribution.citers).astype(np.int64)
    n_comm = max(partition.n_communities, 1)
    counts = np.bincount(labels, minlength=n_comm)
    alpha, beta, gamma, delta = _pair_stats(counts[None, :], contribution.weighting, bridging_domain)[0]
    pw = contribution.pair_weight
    present = np.flatnonzero(counts).tolist()
    within = {l: pw * (counts[l] * (counts[l] - 1) // 2) for l in present if counts[l] > 1}
    between = {
        (l1, l2): pw * counts[l1] * counts[l2]
        for x, l1 in enumerate(present) for l2 in present[x + 1:]
    }
    return RawIndicatorSet(
        contribution.source, partition.fingerprint,
        float(alpha), float(beta), float(gamma), float(delta),
        within, between, contribution.n_citers,
    )


def null_indicator_table(
    network: CitationNetwork,
    sources: Sequence[str],
    partition: Partition,
    sample_count: int = 100,
    master_seed: int = 0,
    partition_index: int = 0,
    weighting: str = "raw",
    bridging_domain: str = "pair",
) -> dict[str, NullIndicatorSet]:
    """Null statistics for several sources from one shared stream of samples.

    For each sample only the permuted edges landing on the requested sources
    are simplified and counted; the full sampled coupling network is never built.
    Results per source do not depend on which other sources are requested.
    """
    if sample_count < 1:
        raise ConfigurationError("sample count must be at least 1")
    cidx = network.cited_index
    core = np.array([cidx[s] if s in cidx else -1 for s in sources], dtype=np.int64)
    if (core < 0).any():
        missing = [s for s, k in zip(sources, core) if k < 0]
        raise ConfigurationError(f"unknown sources {missing[:5]}")
    pos = np.full(len(network.cited), -1, dtype=np.int64)
    pos[core] = np.arange(core.size)
    labels = _partition_labels_for(partition, network.citing).astype(np.int64)
    n_comm = max(partition.n_communities, 1)
    n_citing = len(network.citing)
    loops = network.self_loop_candidates
    src, _ = network.edge_arrays
    acc = np.zeros((core.size, 4))
    for n in range(sample_count):
        perm = permuted_targets(network, sample_seed(master_seed, partition_index, n))
        p = pos[perm]
        hit = p >= 0
        s, d, cp = src[hit], perm[hit], p[hit]
        keep = loops[d] != s
        keys = np.unique(cp[keep] * n_citing + s[keep])
        cpos, cit = np.divmod(keys, n_citing)
        counts = np.bincount(cpos * n_comm + labels[cit], minlength=core.size * n_comm)
        stats = _pair_stats(counts.reshape(core.size, n_comm), weighting, bridging_domain)
        # psi/omega sum per-sample maxima, so maxima are taken before accumulating
        acc += stats
    key = partition.fingerprint
    return {
        s: NullIndicatorSet(s, key, *map(float, acc[k]), sample_count)
        for k, s in enumerate(sources)
    }


def null_indicators(
    network: CitationNetwork,
    source: str,
    partition: Partition,
    sample_count: int = 100,
    master_seed: int = 0,
    partition_index: int = 0,
    weighting: str = "raw",
    bridging_domain: str = "pair",
) -> NullIndicatorSet:
    return null_indicator_table(
        network, [source], partition, sample_count, master_seed, partition_index, weighting, bridging_domain
    )[source]


def _ratio(num: float, den: float) -> float | None:
    return num / den if den > 0 else None


def final_indicators(raw: RawIndicatorSet, null: NullIndicatorSet, formula: str = "ratio") -> PartitionIndicators:
    """Degree-corrected indicators from matching raw and null statistics.

    ``formula="literal"`` divides gamma and delta by the final within/between
    values instead of by alpha/beta; near-zero denominators are left undefined.
    """
    if raw.source != null.source or raw.partition_key != null.partition_key:
        raise ContractViolation(
            f"raw statistics ({raw.source!r}) and null statistics ({null.source!r}) "
            "were not computed for the same source and partition"
        )
    if formula not in FORMULAS:
        raise ConfigurationError(f"unknown formula {formula!r}")
    raw_within = _ratio(raw.alpha, raw.alpha + raw.beta)
    null_within = _ratio(null.chi, null.chi + null.phi)
    within = raw_within - null_within if raw_within is not None and null_within is not None else None
    between = -within if within is not None else None

    null_top = _ratio(null.psi, null.chi)
    null_bridge = _ratio(null.omega, null.phi)
    if formula == "ratio":
        raw_top = _ratio(raw.gamma, raw.alpha)
        raw_bridge = _ratio(raw.delta, raw.beta)
    else:
        raw_top = raw.gamma / within if within is not None and abs(within) > _NEAR_ZERO else None
        raw_bridge = raw.delta / between if between is not None and abs(between) > _NEAR_ZERO else None
    topicality = raw_top - null_top if raw_top is not None and null_top is not None else None
    bridging = raw_bridge - null_bridge if raw_bridge is not None and null_bridge is not None else None
    return PartitionIndicators(raw.source, within, between, topicality, bridging)


def modularity_within_indicator(
    contribution: SourceContribution,
    coupling: CouplingNetwork,
    partition: Partition,
) -> float | None:
    """Modularity of `partition` restricted to the pairs coupled by one source.

    Degrees and total weight come from the full coupling network; the sum is
    normalised by the source's own contributed weight. Returns None when the
    source contributes no weight; exactly 0.0 when none of its pairs is within
    a community.
    """
    wc = contribution.total_weight
    if wc <= 0:
        return None
    two_w = 2.0 * coupling.total_weight
    cidx = coupling.index
    verts = np.array([cidx[c] for c in contribution.citers], dtype=np.int64)
    k = coupling.strength[verts]
    labels = _partition_labels_for(partition, contribution.citers)
    total = 0.0
    for lab in np.unique(labels):
        kl = k[labels == lab]
        m = kl.size
        if m < 2:
            continue
        total += contribution.pair_weight * m * (m - 1) - (kl.sum() ** 2 - np.dot(kl, kl)) / two_w
    return float(total / (2.0 * wc))


# -- ensemble aggregation -----------------------------------------------------


@dataclass(frozen=True)
class IndicatorRecord:
    source: str
    in_degree: int
    per_partition: tuple[PartitionIndicators, ...]
    within: float | None
    between: float | None
    topicality: float | None
    bridging: float | None
    a_star: float | None
    defined: dict[str, int]
    label: str = ""
    year: int | None = None

    @property
    def n_partitions(self) -> int:
        return len(self.per_partition)

    @property
    def excluded(self) -> dict[str, int]:
        return {k: self.n_partitions - v for k, v in self.defined.items()}

    @property
    def fully_undefined(self) -> bool:
        return all(getattr(self, k) is None for k in INDICATORS)

    def value(self, indicator: str) -> float | None:
        if indicator not in (*INDICATORS, "a_star", "in_degree"):
            raise ConfigurationError(f"unknown indicator {indicator!r}")
        return getattr(self, indicator)


def _mean_defined(values: Iterable[float | None]) -> tuple[float | None, int]:
    vals = [v for v in values if v is not None]
    return (float(np.mean(vals)) if vals else None), len(vals)


def _partition_cell(args) -> list[PartitionIndicators]:
    network, coupling, sources, partition, p_index, sample_count, master_seed, weighting, domain, formula = args
    nulls = null_indicator_table(network, sources, partition, sample_count, master_seed, p_index, weighting, domain)
    out = []
    for s in sources:
        contrib = source_contribution(network, s, weighting)
        raw = raw_indicators(contrib, partition, domain)
        fin = final_indicators(raw, nulls[s], formula)
        a_star = modularity_within_indicator(contrib, coupling, partition) if coupling.total_weight > 0 else None
        out.append(PartitionIndicators(s, fin.within, fin.between, fin.topicality, fin.bridging, a_star))
    return out


def ensemble_indicators(
    network: CitationNetwork,
    coupling: CouplingNetwork,
    core: CoreSet,
    ensemble: PartitionEnsemble,
    sample_count: int = 100,
    master_seed: int = 0,
    shared_null: bool = False,
    bridging_domain: str = "pair",
    formula: str = "ratio",
    workers: int = 1,
) -> list[IndicatorRecord]:
    """Per-partition indicators for every core source, averaged over the ensemble.

    Null samples are drawn afresh for each partition unless `shared_null` is
    set. Partitions where an indicator is undefined are left out of its mean.
    """
    sources = list(core.ids)
    if not sources:
        return []
    weighting = coupling.weighting
    jobs = [
        (network, coupling, sources, part, 0 if shared_null else p, sample_count, master_seed,
         weighting, bridging_domain, formula)
        for p, part in enumerate(ensemble.partitions)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_partition_cell, jobs))
    else:
        cells = [_partition_cell(j) for j in jobs]

    records = []
    for k, (s, indeg) in enumerate(core.members):
        per = tuple(cell[k] for cell in cells)
        means, defined = {}, {}
        for name in (*INDICATORS, "a_star"):
            means[name], defined[name] = _mean_defined(getattr(pi, name) for pi in per)
        doc = network.documents.get(s)
        records.append(
            IndicatorRecord(
                source=s, in_degree=indeg, per_partition=per, defined=defined,
                label=doc.label if doc else "", year=doc.year if doc else None, **means,
            )
        )
    return records


# -- reporting helpers --------------------------------------------------------


def indicator_summary(records: Sequence[IndicatorRecord], modularity_mean: float | None = None) -> dict:
    """Mean and median of each indicator over records where it is defined."""
    usable = [r for r in records if not r.fully_undefined]
    if not usable:
        raise EmptySummaryError("no record has a defined indicator")
    out: dict = {}
    for name in INDICATORS:
        vals = [getattr(r, name) for r in usable if getattr(r, name) is not None]
        out[name] = {
            "mean": float(np.mean(vals)) if vals else None,
            "median": float(statistics.median(vals)) if vals else None,
            "n": len(vals),
        }
    return {"indicators": out, "modularity_mean": modularity_mean}


CORRELATION_COLUMNS = ("within", "topicality", "bridging", "in_degree")


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    dx, dy = x - x.mean(), y - y.mean()
    den = np.sqrt(np.dot(dx, dx) * np.dot(dy, dy))
    if den == 0 or not np.isfinite(den):
        return None
    return float(np.clip(np.dot(dx, dy) / den, -1.0, 1.0))


@dataclass(frozen=True)
class CorrelationMatrix:
    columns: tuple[str, ...]
    pearson: tuple[tuple[float | None, ...], ...]
    spearman: tuple[tuple[float | None, ...], ...]
    n: tuple[tuple[int, ...], ...]

    def get(self, a: str, b: str, method: str = "pearson") -> float | None:
        i, j = self.columns.index(a), self.columns.index(b)
        return (self.pearson if method == "pearson" else self.spearman)[i][j]

    def combined(self) -> list[list[float | None]]:
        """Square layout: Pearson above the diagonal, Spearman below, 1 on it."""
        m = len(self.columns)
        return [
            [1.0 if i == j else (self.pearson[i][j] if j > i else self.spearman[i][j]) for j in range(m)]
            for i in range(m)
        ]


def indicator_correlations(records: Sequence[IndicatorRecord], columns: Sequence[str] = CORRELATION_COLUMNS) -> CorrelationMatrix:
    """Pairwise-complete Pearson and Spearman (average-rank) correlations."""
    usable = [r for r in records if not r.fully_undefined]
    if len(usable) < 3:
        raise EmptySummaryError("correlations need at least three defined records")
    cols = tuple(columns)
    data = np.array(
        [[np.nan if r.value(c) is None else float(r.value(c)) for c in cols] for r in usable]
    )
    m = len(cols)
    pear = [[None] * m for _ in range(m)]
    spear = [[None] * m for _ in range(m)]
    counts = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            ok = ~np.isnan(data[:, i]) & ~np.isnan(data[:, j])
            counts[i][j] = int(ok.sum())
            if ok.sum() < 3:
                continue
            x, y = data[ok, i], data[ok, j]
            pear[i][j] = _pearson(x, y)
            spear[i][j] = _pearson(rankdata(x), rankdata(y))
    return CorrelationMatrix(cols, tuple(map(tuple, pear)), tuple(map(tuple, spear)), tuple(map(tuple, counts)))


def top_k(records: Sequence[IndicatorRecord], indicator: str, k: int = 5) -> list[IndicatorRecord]:
    """Highest values first, undefined last; ties by in-degree (desc) then id."""
    if k < 1:
        raise ConfigurationError("k must be at least 1")

    def key(r: IndicatorRecord):
        v = r.value(indicator)
        return (v is None, -(v if v is not None else 0.0), -r.in_degree, r.source)

    return sorted(records, key=key)[:k]
