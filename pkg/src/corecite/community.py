"""Weighted modularity and Louvain community detection on coupling networks."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .coupling import CouplingNetwork
from .errors import ConfigurationError, UndefinedModularityError
from .seeds import PARTITION_STREAM, derive_seed

PARTITION_HEADER = ("vertex_id", "partition_index", "community_label")
_MIN_GAIN = 1e-10


def _label_array(coupling: CouplingNetwork, assignment) -> np.ndarray:
    if isinstance(assignment, Mapping):
        try:
            return np.array([assignment[v] for v in coupling.vertices], dtype=np.int64)
        except KeyError as exc:
            raise ConfigurationError(f"assignment does not cover vertex {exc.args[0]!r}") from None
    labels = np.asarray(assignment, dtype=np.int64)
    if labels.shape != (coupling.n_vertices,):
        raise ConfigurationError("assignment length does not match the vertex count")
    return labels


def modularity(coupling: CouplingNetwork, assignment, resolution: float = 1.0) -> float:
    """Weighted Newman-Girvan modularity of `assignment` on `coupling`.

    `assignment` is a mapping vertex -> label or a label sequence aligned with
    ``coupling.vertices``.
    """
    w = coupling.total_weight
    if w <= 0:
        raise UndefinedModularityError("modularity is undefined when the total edge weight is zero")
    labels = _label_array(coupling, assignment)
    same = labels[coupling.rows] == labels[coupling.cols]
    within = float(coupling.weights[same].sum())
    _, dense = np.unique(labels, return_inverse=True)
    tot = np.bincount(dense, coupling.strength)
    return within / w - resolution * float(np.dot(tot, tot)) / (4.0 * w * w)


def dense_labels(labels: Sequence[int]) -> np.ndarray:
    """Relabel to 0..K-1 in order of first appearance."""
    mapping: dict[int, int] = {}
    return np.array([mapping.setdefault(int(x), len(mapping)) for x in labels], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Partition:
    vertices: tuple[str, ...]
    labels: np.ndarray
    modularity: float
    resolution: float = 1.0
    seed: int | None = None

    @classmethod
    def from_labels(cls, coupling: CouplingNetwork, assignment, resolution: float = 1.0, seed: int | None = None):
        labels = dense_labels(_label_array(coupling, assignment))
        try:
            q = modularity(coupling, labels, resolution)
        except UndefinedModularityError:
            q = float("nan")
        return cls(coupling.vertices, labels, q, resolution, seed)

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @cached_property
    def assignment(self) -> dict[str, int]:
        return dict(zip(self.vertices, self.labels.tolist()))

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def fingerprint(self) -> int:
        return hash((self.vertices, self.labels.tobytes()))

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_communities)

    def same_as(self, other: Partition) -> bool:
        return self.vertices == other.vertices and np.array_equal(self.labels, other.labels)


# -- Louvain ----------------------------------------------------------------


class _Level:
    """One aggregation level: symmetric adjacency dicts plus self-loop weights."""

    __slots__ = ("nbrs", "loops", "strength")

    def __init__(self, nbrs: list[dict[int, float]], loops: list[float], strength: list[float]):
        self.nbrs = nbrs
        self.loops = loops
        self.strength = strength

    @classmethod
    def from_coupling(cls, coupling: CouplingNetwork) -> _Level:
        n = coupling.n_vertices
        nbrs: list[dict[int, float]] = [{} for _ in range(n)]
        for i, j, w in zip(coupling.rows.tolist(), coupling.cols.tolist(), coupling.weights.tolist()):
            nbrs[i][j] = w
            nbrs[j][i] = w
        return cls(nbrs, [0.0] * n, coupling.strength.tolist())

    def aggregate(self, comm: list[int], n_comm: int) -> _Level:
        nbrs: list[dict[int, float]] = [{} for _ in range(n_comm)]
        loops = [0.0] * n_comm
        strength = [0.0] * n_comm
        for i, adj in enumerate(self.nbrs):
            ci = comm[i]
            loops[ci] += self.loops[i]
            strength[ci] += self.strength[i]
            row = nbrs[ci]
            for j, w in adj.items():
                cj = comm[j]
                if cj == ci:
                    loops[ci] += w / 2.0
                else:
                    row[cj] = row.get(cj, 0.0) + w
        return _Level(nbrs, loops, strength)


def _move_phase(level: _Level, order: Sequence[int], two_m: float, resolution: float) -> tuple[list[int], bool]:
    n = len(level.nbrs)
    comm = list(range(n))
    tot = list(level.strength)
    strength = level.strength
    scale = resolution / two_m
    any_move = False
    moved = True
    while moved:
        moved = False
        for i in order:
            ki = strength[i]
            adj = level.nbrs[i]
            if not adj:
                continue
            ci = comm[i]
            wc: dict[int, float] = {}
            for j, w in adj.items():
                c = comm[j]
                wc[c] = wc.get(c, 0.0) + w
            tot[ci] -= ki
            best_c = ci
            best_gain = wc.get(ci, 0.0) - ki * tot[ci] * scale
            for c in sorted(wc):
                if c == ci:
                    continue
                gain = wc[c] - ki * tot[c] * scale
                if gain > best_gain + _MIN_GAIN:
                    best_c, best_gain = c, gain
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moved = any_move = True
    return comm, any_move


def louvain(coupling: CouplingNetwork, resolution: float = 1.0, seed: int = 0) -> Partition:
    """Louvain modularity maximisation (local moves, then aggregation, repeated).

    The node visiting order of each level is shuffled with `seed`. Among
    targets with equal best gain the lowest community label wins, and a node
    only moves for a strictly positive gain over staying put.
    """
    if resolution <= 0:
        raise ConfigurationError("resolution must be positive")
    n = coupling.n_vertices
    if n == 0:
        raise ConfigurationError("cannot partition a network without vertices")
    two_m = 2.0 * coupling.total_weight
    membership = np.arange(n, dtype=np.int64)
    if two_m > 0:
        rng = np.random.default_rng(seed)
        level = _Level.from_coupling(coupling)
        while True:
            order = rng.permutation(len(level.nbrs)).tolist()
            comm, moved = _move_phase(level, order, two_m, resolution)
            if not moved:
                break
            dense = dense_labels(comm)
            membership = dense[membership]
            level = level.aggregate(dense.tolist(), int(dense.max()) + 1)
    return Partition.from_labels(coupling, membership, resolution, seed)


@dataclass(frozen=True, eq=False)
class PartitionEnsemble:
    partitions: tuple[Partition, ...]
    resolution: float
    master_seed: int

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    def __getitem__(self, k: int) -> Partition:
        return self.partitions[k]

    @property
    def modularities(self) -> list[float]:
        return [p.modularity for p in self.partitions]

    @property
    def mean_modularity(self) -> float:
        return float(np.mean(self.modularities))

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(PARTITION_HEADER)
            for k, part in enumerate(self.partitions):
                for v, lab in zip(part.vertices, part.labels.tolist()):
                    w.writerow((v, k, lab))


def partition_seed(master_seed: int, k: int) -> int:
    return derive_seed(master_seed, PARTITION_STREAM, k)


def partition_ensemble(
    coupling: CouplingNetwork,
    count: int = 10,
    resolution: float = 1.0,
    master_seed: int = 0,
    workers: int = 1,
) -> PartitionEnsemble:
    """Run Louvain `count` times with seeds derived from `master_seed`."""
    if count < 1:
        raise ConfigurationError("partition count must be at least 1")
    seeds = [partition_seed(master_seed, k) for k in range(count)]
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(louvain, [coupling] * count, [resolution] * count, seeds))
    else:
        parts = [louvain(coupling, resolution, s) for s in seeds]
    return PartitionEnsemble(tuple(parts), resolution, master_seed)
