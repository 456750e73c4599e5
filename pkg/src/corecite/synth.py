"""Synthetic citation networks with planted communities and planted core sources."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .citenet import CitationNetwork, DocumentRecord, write_edges
from .errors import ConfigurationError
from .seeds import SYNTH_STREAM, rng_for

TRUTH_HEADER = ("id", "role", "community")
ROLES = ("local", "global", "pair-bridge")


@dataclass(frozen=True)
class PlantedCore:
    role: str
    citers: int = 20
    communities: tuple[int, ...] = ()

    @classmethod
    def local(cls, k: int, citers: int = 20) -> PlantedCore:
        return cls("local", citers, (k,))

    @classmethod
    def global_(cls, citers: int = 20) -> PlantedCore:
        return cls("global", citers)

    @classmethod
    def pair_bridge(cls, k1: int, k2: int, citers: int = 20) -> PlantedCore:
        return cls("pair-bridge", citers, (k1, k2))


def default_planted(n_communities: int = 4) -> tuple[PlantedCore, ...]:
    cores = [PlantedCore.local(k) for k in range(min(2, n_communities))]
    if n_communities >= 2:
        cores.append(PlantedCore.global_())
        cores.append(PlantedCore.pair_bridge(0, 1))
    if n_communities >= 4:
        cores.append(PlantedCore.pair_bridge(2, 3))
    return tuple(cores)


@dataclass(frozen=True)
class SynthSpec:
    community_sizes: tuple[int, ...] = (100, 100, 100, 100)
    pool_size: int = 200
    refs_per_doc: float = 10.0
    noise: float = 0.05
    planted: tuple[PlantedCore, ...] = field(default_factory=default_planted)
    seed: int = 0

    @property
    def n_communities(self) -> int:
        return len(self.community_sizes)


@dataclass(frozen=True)
class SynthResult:
    network: CitationNetwork
    labels: dict[str, int]          # citing id -> planted community
    roles: dict[str, PlantedCore]   # planted core id -> role
    background: dict[str, int]      # background source -> owning community

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        """Write ``edges.csv`` and ``truth.csv`` (``id,role,community``)."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        edges_path, truth_path = out / "edges.csv", out / "truth.csv"
        write_edges(self.network.edges, edges_path)
        with truth_path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRUTH_HEADER)
            for doc, k in sorted(self.labels.items()):
                w.writerow((doc, "citing", k))
            for doc, core in sorted(self.roles.items()):
                w.writerow((doc, core.role, ";".join(map(str, core.communities))))
            for doc, k in sorted(self.background.items()):
                w.writerow((doc, "background", k))
        return edges_path, truth_path


def _validate(spec: SynthSpec) -> None:
    sizes = spec.community_sizes
    if not sizes or any(s <= 0 for s in sizes):
        raise ConfigurationError("community sizes must be positive")
    if spec.pool_size <= 0 or spec.refs_per_doc < 1:
        raise ConfigurationError("pool size must be positive and refs_per_doc at least 1")
    if not 0.0 <= spec.noise < 1.0:
        raise ConfigurationError("noise fraction must lie in [0, 1)")
    K = len(sizes)
    for core in spec.planted:
        if core.role not in ROLES:
            raise ConfigurationError(f"unknown planted role {core.role!r}")
        if core.citers < 2:
            raise ConfigurationError("planted cores need at least two citers")
        if any(not 0 <= k < K for k in core.communities):
            raise ConfigurationError(f"planted core refers to a community outside 0..{K - 1}")
        if core.role == "local":
            if len(core.communities) != 1 or core.citers > sizes[core.communities[0]]:
                raise ConfigurationError(f"local core needs {core.citers} citers in one community")
        elif core.role == "pair-bridge":
            k1, k2 = core.communities
            if k1 == k2 or -(-core.citers // 2) > min(sizes[k1], sizes[k2]):
                raise ConfigurationError(f"pair-bridge core cannot place {core.citers} citers in communities {k1},{k2}")
        else:
            share = -(-core.citers // K)
            if share > min(sizes):
                raise ConfigurationError(f"global core cannot spread {core.citers} citers over {K} communities")


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]


def generate(spec: SynthSpec) -> SynthResult:
    """Draw a citation network following `spec`.

    Each citing document cites ``1 + Poisson(refs_per_doc - 1)`` background
    sources; a reference goes to a random other community's pool with
    probability `noise`, and to the document's own pool otherwise.
    """
    _validate(spec)
    rng = rng_for(spec.seed, SYNTH_STREAM)
    K = spec.n_communities
    width = len(str(max(spec.community_sizes)))
    members = [[f"d{k:02d}-{i:0{width}d}" for i in range(n)] for k, n in enumerate(spec.community_sizes)]
    pwidth = len(str(spec.pool_size))
    pools = [[f"s{k:02d}-{j:0{pwidth}d}" for j in range(spec.pool_size)] for k in range(K)]

    edges: set[tuple[str, str]] = set()
    for k, docs in enumerate(members):
        for doc in docs:
            n_refs = min(1 + int(rng.poisson(spec.refs_per_doc - 1)), spec.pool_size)
            noisy = rng.random(n_refs) < spec.noise if K > 1 else np.zeros(n_refs, dtype=bool)
            for is_noise in noisy:
                target = k
                if is_noise:
                    target = int(rng.integers(K - 1))
                    target += target >= k
                for _ in range(64):
                    ref = pools[target][int(rng.integers(spec.pool_size))]
                    if (doc, ref) not in edges:
                        edges.add((doc, ref))
                        break

    roles: dict[str, PlantedCore] = {}
    for idx, core in enumerate(spec.planted):
        suffix = "-".join(map(str, core.communities)) if core.communities else "all"
        core_id = f"core-{core.role}-{suffix}-{idx}"
        if core.role == "local":
            quota = {core.communities[0]: core.citers}
        elif core.role == "pair-bridge":
            quota = dict(zip(core.communities, _split(core.citers, 2)))
        else:
            quota = dict(zip(range(K), _split(core.citers, K)))
        for k, q in quota.items():
            for i in rng.choice(len(members[k]), size=q, replace=False):
                edges.add((members[k][int(i)], core_id))
        roles[core_id] = core

    labels = {doc: k for k, docs in enumerate(members) for doc in docs}
    cited = {b for _, b in edges}
    background = {s: k for k, pool in enumerate(pools) for s in pool if s in cited}
    docs = {d: DocumentRecord(d, is_citing=True) for d in labels}
    docs.update({c: DocumentRecord(c, label=f"planted {roles[c].role}") for c in roles})
    return SynthResult(CitationNetwork.from_edges(edges, docs), labels, roles, background)
