"""Bibliographic coupling projection with per-source edge attribution."""

from __future__ import annotations

import csv
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .citenet import CitationNetwork
from .errors import ConfigurationError, EmptyNetworkError

log = logging.getLogger(__name__)

WEIGHTINGS = ("raw", "fractional")
COUPLING_HEADER = ("source_i", "source_j", "weight")
DEFAULT_PAIR_BUDGET = 10**8
_CHUNK_PAIRS = 4_000_000


def pair_weight(n_citers: int, weighting: str) -> float:
    """Weight one source adds to each coupled pair when it has `n_citers` citers."""
    if weighting == "raw":
        return 1.0
    if weighting == "fractional":
        return 1.0 / (n_citers - 1) if n_citers > 1 else 0.0
    raise ConfigurationError(f"unknown weighting {weighting!r}")


@dataclass(frozen=True, eq=False)
class CouplingNetwork:
    """Undirected weighted graph over citing publications.

    Each unordered pair is stored once, as ``rows[k] < cols[k]`` indices into
    `vertices`, sorted by (row, col).
    """

    vertices: tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    weighting: str = "raw"

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str, float]],
        weighting: str = "raw",
    ) -> CouplingNetwork:
        """Build from ``(a, b, weight)`` triples; repeated pairs add up, self-pairs are rejected."""
        verts = tuple(sorted(set(vertices)))
        idx = {v: i for i, v in enumerate(verts)}
        acc: dict[tuple[int, int], float] = {}
        for a, b, w in edges:
            i, j = sorted((idx[a], idx[b]))
            if i == j:
                raise ConfigurationError(f"self-pair {a!r} in coupling edges")
            if w <= 0:
                raise ConfigurationError("coupling weights must be positive")
            acc[(i, j)] = acc.get((i, j), 0.0) + float(w)
        keys = sorted(acc)
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        weights = np.array([acc[k] for k in keys], dtype=np.float64)
        return cls(verts, rows, cols, weights, weighting)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return int(self.rows.size)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def strength(self) -> np.ndarray:
        """Weighted degree of every vertex."""
        n = self.n_vertices
        return np.bincount(self.rows, self.weights, n) + np.bincount(self.cols, self.weights, n)

    def weight(self, a: str, b: str) -> float:
        i, j = sorted((self.index[a], self.index[b]))
        if i == j:
            return 0.0
        lo = np.searchsorted(self.rows, i, "left")
        hi = np.searchsorted(self.rows, i, "right")
        k = lo + np.searchsorted(self.cols[lo:hi], j)
        if k < hi and self.cols[k] == j:
            return float(self.weights[k])
        return 0.0

    def edge_dict(self) -> dict[tuple[str, str], float]:
        v = self.vertices
        return {(v[i], v[j]): float(w) for i, j, w in zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist())}

    def to_sparse(self) -> sparse.csr_matrix:
        n = self.n_vertices
        m = sparse.coo_matrix((self.weights, (self.rows, self.cols)), shape=(n, n))
        return (m + m.T).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def component_stats(self) -> dict[str, float | int]:
        """Vertex/edge counts, connected components, giant fraction and density."""
        n = self.n_vertices
        if n == 0:
            return {"vertices": 0, "edges": 0, "components": 0, "giant_fraction": 0.0, "density": 0.0}
        n_comp, labels = csgraph.connected_components(self.to_sparse(), directed=False)
        giant = int(np.bincount(labels).max())
        return {
            "vertices": n,
            "edges": self.n_edges,
            "components": int(n_comp),
            "giant_fraction": giant / n,
            "density": self.n_edges / (n * (n - 1) / 2) if n > 1 else 0.0,
        }

    def write_csv(self, path: str | Path, min_weight: float = 0.0) -> None:
        """Write ``source_i,source_j,weight`` rows (i < j lexicographically)."""
        v = self.vertices
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COUPLING_HEADER)
            for i, j, wt in zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()):
                if wt >= min_weight:
                    w.writerow((v[i], v[j], _fmt_weight(wt, self.weighting)))


def _fmt_weight(w: float, weighting: str) -> str:
    return str(int(w)) if weighting == "raw" else repr(w)


@dataclass(frozen=True)
class SourceContribution:
    """The coupled pairs a single cited source is responsible for."""

    source: str
    citers: tuple[str, ...]
    pair_weight: float
    weighting: str = "raw"

    @property
    def n_citers(self) -> int:
        return len(self.citers)

    @property
    def pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset(itertools.combinations(self.citers, 2))

    @property
    def n_pairs(self) -> int:
        n = len(self.citers)
        return n * (n - 1) // 2

    @property
    def total_weight(self) -> float:
        return self.n_pairs * self.pair_weight


def source_contribution(network: CitationNetwork, source: str, weighting: str = "raw") -> SourceContribution:
    citers = network.citers_of(source)
    return SourceContribution(source, citers, pair_weight(len(citers), weighting), weighting)


def citers_by_source(network: CitationNetwork) -> list[np.ndarray]:
    """Citing indices of every cited source, in cited-index order."""
    src, dst = network.edge_arrays
    order = np.argsort(dst, kind="stable")
    bounds = np.searchsorted(dst[order], np.arange(len(network.cited) + 1))
    s = src[order]
    return [s[bounds[k]:bounds[k + 1]] for k in range(len(network.cited))]


def _accumulate(keys: list[np.ndarray], wts: list[np.ndarray], acc_k: np.ndarray, acc_w: np.ndarray):
    k = np.concatenate([acc_k, *keys])
    w = np.concatenate([acc_w, *wts])
    uniq, inv = np.unique(k, return_inverse=True)
    return uniq, np.bincount(inv, w, uniq.size)


def project_coupling(
    network: CitationNetwork,
    weighting: str = "raw",
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> CouplingNetwork:
    """Project the citation network onto citing publications.

    Raw weighting counts shared cited sources. Fractional weighting lets a
    source with n citers add 1/(n-1) to each of its pairs. Citing documents
    without shared references stay in the result as isolated vertices.
    """
    if weighting not in WEIGHTINGS:
        raise ConfigurationError(f"unknown weighting {weighting!r}")
    if not network.edges:
        raise EmptyNetworkError("cannot project an empty network")
    n = len(network.citing)
    acc_k = np.empty(0, dtype=np.int64)
    acc_w = np.empty(0, dtype=np.float64)
    keys: list[np.ndarray] = []
    wts: list[np.ndarray] = []
    pending = 0
    for k, citers in enumerate(citers_by_source(network)):
        m = citers.size
        if m < 2:
            continue
        npairs = m * (m - 1) // 2
        if npairs > pair_budget:
            log.warning("source %s emits %d coupled pairs (budget %d)", network.cited[k], npairs, pair_budget)
        iu, ju = np.triu_indices(m, 1)
        keys.append(citers[iu] * n + citers[ju])
        wts.append(np.full(npairs, pair_weight(m, weighting)))
        pending += npairs
        if pending >= _CHUNK_PAIRS:
            acc_k, acc_w = _accumulate(keys, wts, acc_k, acc_w)
            keys, wts, pending = [], [], 0
    if keys:
        acc_k, acc_w = _accumulate(keys, wts, acc_k, acc_w)
    rows, cols = np.divmod(acc_k, n)
    if weighting == "raw":
        acc_w = np.rint(acc_w)
    return CouplingNetwork(network.citing, rows, cols, acc_w, weighting)
