from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from corecite import CitationNetwork, CouplingNetwork

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_network(rng: random.Random, max_citing: int = 30, max_cited: int = 100) -> CitationNetwork:
    n_citing = rng.randint(2, max_citing)
    n_cited = rng.randint(1, max_cited)
    density = rng.uniform(0.02, 0.5)
    pairs = [
        (f"p{i:02d}", f"s{j:03d}")
        for i in range(n_citing) for j in range(n_cited)
        if rng.random() < density
    ]
    if not pairs:
        pairs = [("p00", "s000")]
    return CitationNetwork.from_edges(pairs)


def brute_force_coupling(network: CitationNetwork) -> dict[tuple[str, str], int]:
    refs = {p: set() for p in network.citing}
    for a, b in network.edges:
        refs[a].add(b)
    out = {}
    for i, j in itertools.combinations(sorted(refs), 2):
        shared = len(refs[i] & refs[j])
        if shared:
            out[(i, j)] = shared
    return out


def brute_force_modularity(dense: np.ndarray, labels) -> float:
    n = dense.shape[0]
    two_w = dense.sum()
    k = dense.sum(axis=1)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                total += dense[i, j] - k[i] * k[j] / two_w
    return total / two_w


def set_partitions(n: int):
    """All set partitions of range(n) as restricted-growth label lists."""
    def rec(prefix, m):
        if len(prefix) == n:
            yield list(prefix)
            return
        for lab in range(m + 1):
            yield from rec(prefix + [lab], max(m, lab + 1))
    yield from rec([0], 1) if n else iter([[]])


def two_triangles() -> CouplingNetwork:
    return CouplingNetwork.from_edges(
        "abcdef",
        [("a", "b", 1), ("b", "c", 1), ("a", "c", 1), ("d", "e", 1), ("e", "f", 1), ("d", "f", 1)],
    )


def two_triangle_citations() -> CitationNetwork:
    """Six citing documents whose coupling network is two disjoint unit triangles."""
    return CitationNetwork.from_edges([
        ("a", "x1"), ("b", "x1"), ("b", "x2"), ("c", "x2"), ("a", "x3"), ("c", "x3"),
        ("d", "y1"), ("e", "y1"), ("e", "y2"), ("f", "y2"), ("d", "y3"), ("f", "y3"),
    ])


@pytest.fixture
def toy_network() -> CitationNetwork:
    return CitationNetwork.from_edges([("p1", "s1"), ("p2", "s1"), ("p2", "s2"), ("p3", "s2")])
