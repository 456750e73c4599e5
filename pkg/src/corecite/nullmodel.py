"""Configuration-model resampling of the directed citation network."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator

import numpy as np

from .citenet import CitationNetwork, write_edges
from .errors import ConfigurationError, EmptyNetworkError
from .seeds import NULL_STREAM, derive_seed


def sample_seed(master_seed: int, partition_index: int, sample_index: int) -> int:
    return derive_seed(master_seed, NULL_STREAM, partition_index, sample_index)


def permuted_targets(network: CitationNetwork, seed: int) -> np.ndarray:
    """Cited-endpoint index array shuffled (Fisher-Yates) against the fixed citing array."""
    _, dst = network.edge_arrays
    return np.random.default_rng(seed).permutation(dst)


def simplify(network: CitationNetwork, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop self-loops and repeated pairs; returns (citing, cited) index arrays sorted by pair."""
    keep = network.self_loop_candidates[dst] != src
    n_cited = len(network.cited)
    keys = np.unique(src[keep] * n_cited + dst[keep])
    return np.divmod(keys, n_cited)


@dataclass(frozen=True, eq=False)
class ConfigurationSample:
    """One degree-preserving random rewiring of a citation network.

    `raw_citing` / `raw_cited` hold the endpoint arrays before simplification
    (as indices into the source network's citing and cited lists).
    """

    index: int
    seed: int
    network: CitationNetwork
    raw_citing: np.ndarray
    raw_cited: np.ndarray
    citing_idx: np.ndarray
    cited_idx: np.ndarray

    @property
    def dropped(self) -> int:
        return int(self.raw_citing.size - self.citing_idx.size)

    @cached_property
    def edges(self) -> tuple[tuple[str, str], ...]:
        citing, cited = self.network.citing, self.network.cited
        return tuple((citing[a], cited[b]) for a, b in zip(self.citing_idx.tolist(), self.cited_idx.tolist()))

    def edge_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.edges)

    def to_network(self) -> CitationNetwork:
        return CitationNetwork.from_edges(self.edges, self.network.documents)

    def dump_csv(self, path: str | Path) -> None:
        write_edges(self.edges, path)


def configuration_sample(network: CitationNetwork, seed: int, index: int = 0) -> ConfigurationSample:
    if not network.edges:
        raise EmptyNetworkError("configuration model needs at least one edge")
    src, _ = network.edge_arrays
    dst = permuted_targets(network, seed)
    a, b = simplify(network, src, dst)
    return ConfigurationSample(index, seed, network, src, dst, a, b)


def null_ensemble(
    network: CitationNetwork,
    count: int = 100,
    master_seed: int = 0,
    partition_index: int = 0,
) -> Iterator[ConfigurationSample]:
    """Yield `count` samples seeded from (master_seed, partition_index, n)."""
    if count < 1:
        raise ConfigurationError("sample count must be at least 1")
    for n in range(count):
        yield configuration_sample(network, sample_seed(master_seed, partition_index, n), index=n)
