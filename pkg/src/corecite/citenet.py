"""Directed citation networks: ingestion, reference deduplication, core selection."""

from __future__ import annotations

import csv
import enum
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigurationError, EmptyNetworkError, ParseError, UnknownSourceError
from .strings import jaro_winkler, normalize_reference

log = logging.getLogger(__name__)

EDGE_HEADER = ("citing_id", "cited_id")
METADATA_HEADER = ("id", "label", "year", "typology", "raw_reference")
MERGE_REPORT_HEADER = ("group_id", "canonical_id", "member_id", "similarity")


class Typology(str, enum.Enum):
    MONOGRAPH = "monograph"
    ARTICLE = "article"
    REFERENCE_WORK = "reference-work"
    PRIMARY_SOURCE = "primary-source"
    OTHER = "other"


@dataclass(frozen=True)
class DocumentRecord:
    id: str
    label: str = ""
    year: int | None = None
    typology: Typology | None = None
    is_citing: bool = False
    raw_reference: str | None = None

    def __post_init__(self):
        if not self.id.strip():
            raise ConfigurationError("document id must be non-empty")
        if self.year is not None and not (1 <= self.year <= 9999):
            raise ConfigurationError(f"year {self.year!r} of {self.id!r} is not a 1-4 digit positive integer")


def _check_id(raw: str, line: int, path: str) -> str:
    token = raw.strip()
    if not token:
        raise ParseError("empty document id", line=line, path=path)
    return token


@dataclass(frozen=True, eq=False)
class CitationNetwork:
    """A simple directed citing -> cited graph.

    Build instances with :meth:`from_edges` (or :func:`load_citations`), which
    removes duplicate pairs and self-loops and records how many were dropped.
    Identifiers are kept sorted so that every derived structure is canonical.
    """

    edges: tuple[tuple[str, str], ...]
    documents: Mapping[str, DocumentRecord] = field(default_factory=dict)
    dropped_duplicates: int = 0
    dropped_self_loops: int = 0

    @classmethod
    def from_edges(
        cls,
        pairs: Iterable[tuple[str, str]],
        documents: Mapping[str, DocumentRecord] | None = None,
    ) -> CitationNetwork:
        seen: set[tuple[str, str]] = set()
        dups = loops = 0
        for citing, cited in pairs:
            if citing == cited:
                loops += 1
                continue
            if (citing, cited) in seen:
                dups += 1
                continue
            seen.add((citing, cited))
        return cls(
            edges=tuple(sorted(seen)),
            documents=dict(documents or {}),
            dropped_duplicates=dups,
            dropped_self_loops=loops,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CitationNetwork):
            return NotImplemented
        return self.edges == other.edges

    def __hash__(self) -> int:
        return hash(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    @cached_property
    def citing(self) -> tuple[str, ...]:
        return tuple(sorted({a for a, _ in self.edges}))

    @cached_property
    def cited(self) -> tuple[str, ...]:
        return tuple(sorted({b for _, b in self.edges}))

    @cached_property
    def in_degree(self) -> dict[str, int]:
        return dict(Counter(b for _, b in self.edges))

    @cached_property
    def out_degree(self) -> dict[str, int]:
        return dict(Counter(a for a, _ in self.edges))

    @cached_property
    def citing_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.citing)}

    @cached_property
    def cited_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.cited)}

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges as (citing index, cited index) integer arrays, in edge order."""
        ci, cd = self.citing_index, self.cited_index
        src = np.fromiter((ci[a] for a, _ in self.edges), dtype=np.int64, count=len(self.edges))
        dst = np.fromiter((cd[b] for _, b in self.edges), dtype=np.int64, count=len(self.edges))
        return src, dst

    @cached_property
    def self_loop_candidates(self) -> np.ndarray:
        """For every cited index, the citing index of the same document or -1."""
        ci = self.citing_index
        return np.array([ci.get(c, -1) for c in self.cited], dtype=np.int64)

    @cached_property
    def _citers(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = defaultdict(list)
        for a, b in self.edges:
            out[b].append(a)
        return {k: tuple(v) for k, v in out.items()}

    def citers_of(self, source: str) -> tuple[str, ...]:
        """Sorted citing documents of `source`."""
        try:
            return self._citers[source]
        except KeyError:
            raise UnknownSourceError(f"{source!r} is not a cited document of this network") from None

    def summary(self) -> dict[str, int]:
        return {"citing": len(self.citing), "cited": len(self.cited), "edges": len(self.edges)}


def _read_edges(path: Path) -> list[tuple[str, str]]:
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise EmptyNetworkError(f"{path}: file is empty")
    rows = csv.reader(text.splitlines())
    header = next(rows)
    if tuple(h.strip() for h in header) != EDGE_HEADER:
        raise ParseError(f"expected header {','.join(EDGE_HEADER)}, got {','.join(header)}", line=1, path=str(path))
    pairs = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 columns, got {len(row)}", line=lineno, path=str(path))
        pairs.append((_check_id(row[0], lineno, str(path)), _check_id(row[1], lineno, str(path))))
    return pairs


def _read_metadata(path: Path) -> dict[str, DocumentRecord]:
    docs: dict[str, DocumentRecord] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None or tuple(h.strip() for h in header) != METADATA_HEADER:
            raise ParseError(f"expected header {','.join(METADATA_HEADER)}", line=1, path=str(path))
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(METADATA_HEADER):
                raise ParseError(f"expected {len(METADATA_HEADER)} columns, got {len(row)}", line=lineno, path=str(path))
            doc_id = _check_id(row[0], lineno, str(path))
            if doc_id in docs:
                raise ParseError(f"duplicate document id {doc_id!r}", line=lineno, path=str(path))
            year_s, typ_s = row[2].strip(), row[3].strip()
            if year_s and not (year_s.isdigit() and len(year_s) <= 4 and int(year_s) > 0):
                raise ParseError(f"invalid year {year_s!r}", line=lineno, path=str(path))
            try:
                typology = Typology(typ_s) if typ_s else None
            except ValueError:
                raise ParseError(f"unknown typology {typ_s!r}", line=lineno, path=str(path)) from None
            docs[doc_id] = DocumentRecord(
                id=doc_id,
                label=row[1].strip(),
                year=int(year_s) if year_s else None,
                typology=typology,
                raw_reference=row[4] if row[4].strip() else None,
            )
    return docs


def default_metadata_path(edge_path: str | Path) -> Path:
    p = Path(edge_path)
    return p.with_name(p.stem + ".metadata.csv")


def load_citations(
    path: str | Path,
    format: str = "edge-csv",
    metadata_path: str | Path | None = None,
    drop_authorless: bool = False,
) -> CitationNetwork:
    """Read a citation edge list (and optional metadata sidecar).

    `format` is ``"edge-csv"`` or ``"edge-csv-with-metadata"``. For the latter the
    sidecar defaults to ``<stem>.metadata.csv`` next to the edge file.
    With `drop_authorless`, cited documents whose metadata label is empty are
    removed before the network is built.
    """
    path = Path(path)
    if format not in ("edge-csv", "edge-csv-with-metadata"):
        raise ConfigurationError(f"unknown input format {format!r}")
    pairs = _read_edges(path)
    if not pairs:
        raise EmptyNetworkError(f"{path}: no edge rows")
    docs: dict[str, DocumentRecord] = {}
    if format == "edge-csv-with-metadata":
        docs = _read_metadata(Path(metadata_path) if metadata_path else default_metadata_path(path))
    if drop_authorless:
        if not docs:
            raise ConfigurationError("drop_authorless requires document metadata")
        before = len(pairs)
        pairs = [(a, b) for a, b in pairs if b in docs and docs[b].label]
        log.info("dropped %d edges to authorless references", before - len(pairs))

    citing_ids = {a for a, _ in pairs}
    for doc_id in {x for pair in pairs for x in pair}:
        rec = docs.get(doc_id)
        is_citing = doc_id in citing_ids
        if rec is None:
            docs[doc_id] = DocumentRecord(id=doc_id, is_citing=is_citing)
        elif rec.is_citing != is_citing:
            docs[doc_id] = DocumentRecord(
                id=rec.id, label=rec.label, year=rec.year, typology=rec.typology,
                is_citing=is_citing, raw_reference=rec.raw_reference,
            )
    net = CitationNetwork.from_edges(pairs, docs)
    if net.dropped_duplicates or net.dropped_self_loops:
        log.info("%s: dropped %d duplicate rows and %d self-loops", path, net.dropped_duplicates, net.dropped_self_loops)
    if not net.edges:
        raise EmptyNetworkError(f"{path}: no edges left after removing self-loops")
    return net


def write_edges(pairs: Iterable[tuple[str, str]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGE_HEADER)
        w.writerows(pairs)


# -- reference deduplication ----------------------------------------------------


@dataclass(frozen=True)
class MergeGroup:
    group_id: int
    canonical_id: str
    members: tuple[tuple[str, float], ...]  # (member id, best linking similarity)


@dataclass(frozen=True)
class MergeReport:
    groups: tuple[MergeGroup, ...]
    threshold: float
    normalization: str

    @property
    def merged_documents(self) -> int:
        """Number of cited documents that disappear into a canonical id."""
        return sum(len(g.members) - 1 for g in self.groups)

    def mapping(self) -> dict[str, str]:
        return {m: g.canonical_id for g in self.groups for m, _ in g.members}

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(MERGE_REPORT_HEADER)
            for g in self.groups:
                for member, sim in g.members:
                    w.writerow((g.group_id, g.canonical_id, member, repr(sim)))


def _reference_text(network: CitationNetwork, doc_id: str, normalization: str) -> str:
    rec = network.documents.get(doc_id)
    raw = rec.raw_reference if rec is not None else None
    if normalization == "none":
        return raw if raw is not None else doc_id
    if raw is None:
        raise ConfigurationError(f"cited document {doc_id!r} has no raw_reference to normalise")
    return normalize_reference(raw)


def dedup_references(
    network: CitationNetwork,
    similarity_threshold: float = 0.84,
    normalization: str = "strip-pagination-and-lowercase",
    blocking: bool = False,
) -> tuple[CitationNetwork, MergeReport]:
    """Merge cited documents whose reference strings are Jaro-Winkler similar.

    All pairs with similarity >= `similarity_threshold` are linked and the
    connected groups collapse onto their lexicographically smallest id. With
    `blocking`, only strings sharing their first token are compared.
    """
    if not 0.0 <= similarity_threshold <= 1.0:
        raise ConfigurationError(f"similarity threshold {similarity_threshold} outside [0, 1]")
    if normalization not in ("strip-pagination-and-lowercase", "none"):
        raise ConfigurationError(f"unknown normalization {normalization!r}")

    ids = list(network.cited)
    texts = [_reference_text(network, d, normalization) for d in ids]

    parent = list(range(len(ids)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    best = [0.0] * len(ids)
    if blocking:
        blocks: dict[str, list[int]] = defaultdict(list)
        for i, t in enumerate(texts):
            blocks[t.split(" ", 1)[0] if t else ""].append(i)
        candidates = blocks.values()
    else:
        candidates = [list(range(len(ids)))]
    for block in candidates:
        for x, i in enumerate(block):
            for j in block[x + 1:]:
                sim = jaro_winkler(texts[i], texts[j])
                if sim >= similarity_threshold:
                    best[i] = max(best[i], sim)
                    best[j] = max(best[j], sim)
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = defaultdict(list)
    for i in range(len(ids)):
        groups[find(i)].append(i)
    merge_groups = []
    for members in sorted((g for g in groups.values() if len(g) > 1), key=lambda g: ids[g[0]]):
        merge_groups.append(
            MergeGroup(
                group_id=len(merge_groups),
                canonical_id=ids[members[0]],
                members=tuple((ids[i], best[i]) for i in members),
            )
        )
    report = MergeReport(tuple(merge_groups), similarity_threshold, normalization)
    mapping = report.mapping()
    if not mapping:
        return network, report
    docs = {k: v for k, v in network.documents.items() if k not in mapping or mapping[k] == k}
    merged = CitationNetwork.from_edges(((a, mapping.get(b, b)) for a, b in network.edges), docs)
    return merged, report


# -- core selection -------------------------------------------------------------


@dataclass(frozen=True)
class CoreSet:
    quantile: float | None
    threshold: int
    members: tuple[tuple[str, int], ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(m for m, _ in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, doc_id: object) -> bool:
        return any(doc_id == m for m, _ in self.members)


def nearest_rank(values: list[int], quantile: float) -> int:
    """Value at 1-based rank ceil(quantile * n) of the ascending-sorted `values`."""
    ordered = sorted(values)
    rank = math.ceil(Fraction(str(quantile)) * len(ordered))
    return ordered[max(rank, 1) - 1]


def select_core(network: CitationNetwork, quantile: float = 0.995) -> CoreSet:
    """Cited sources whose in-degree reaches the nearest-rank `quantile` threshold.

    Ties at the threshold are all included, so the member count is set by the
    threshold rather than by ``(1 - quantile) * n``.
    """
    if not 0.0 < quantile < 1.0:
        raise ConfigurationError(f"quantile {quantile} outside (0, 1)")
    if not network.edges:
        raise EmptyNetworkError("core selection needs at least one edge")
    indeg = network.in_degree
    threshold = nearest_rank(list(indeg.values()), quantile)
    members = sorted(((d, k) for d, k in indeg.items() if k >= threshold), key=lambda m: (-m[1], m[0]))
    return CoreSet(quantile=quantile, threshold=threshold, members=tuple(members))


def core_from_ids(network: CitationNetwork, ids: Iterable[str]) -> CoreSet:
    """A core set made of explicitly chosen sources (threshold = their minimum in-degree)."""
    indeg = network.in_degree
    members = []
    for d in set(ids):
        if d not in indeg:
            raise UnknownSourceError(f"{d!r} is not a cited document of this network")
        members.append((d, indeg[d]))
    members.sort(key=lambda m: (-m[1], m[0]))
    return CoreSet(quantile=None, threshold=min(k for _, k in members), members=tuple(members))
