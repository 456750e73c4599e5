import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corecite import CitationNetwork, CouplingNetwork, project_coupling, source_contribution
from corecite.errors import ConfigurationError, UnknownSourceError

from conftest import brute_force_coupling, random_network


def test_two_source_chain(toy_network):
    b = project_coupling(toy_network)
    assert b.vertices == ("p1", "p2", "p3")
    assert b.edge_dict() == {("p1", "p2"): 1.0, ("p2", "p3"): 1.0}
    assert b.weight("p1", "p3") == 0.0
    assert b.weight("p3", "p2") == 1.0


def test_single_shared_source_gives_k4():
    net = CitationNetwork.from_edges([(f"p{i}", "s") for i in range(1, 5)])
    b = project_coupling(net)
    assert b.n_edges == 6 and set(b.weights.tolist()) == {1.0}


@pytest.mark.parametrize("seed", range(10))
def test_matches_brute_force_on_random_instances(seed):
    rng = random.Random(seed)
    pairs = [(f"d{i}", f"s{j}") for i in range(10) for j in range(20) if rng.random() < 0.3]
    net = CitationNetwork.from_edges(pairs)
    got = {k: int(v) for k, v in project_coupling(net).edge_dict().items()}
    assert got == brute_force_coupling(net)


def test_isolated_citing_vertices_kept():
    net = CitationNetwork.from_edges([("p1", "s1"), ("p2", "s1"), ("p3", "s9")])
    b = project_coupling(net)
    assert b.n_vertices == 3 and b.n_edges == 1
    stats = b.component_stats()
    assert stats == {"vertices": 3, "edges": 1, "components": 2, "giant_fraction": 2 / 3, "density": 1 / 3}


def test_fractional_weighting():
    net = CitationNetwork.from_edges([("p1", "s1"), ("p2", "s1"), ("p3", "s1"), ("p1", "s2"), ("p2", "s2")])
    b = project_coupling(net, "fractional")
    # s1 has three citers -> 1/2 per pair, s2 has two -> 1 per pair
    assert b.edge_dict() == pytest.approx({("p1", "p2"): 1.5, ("p1", "p3"): 0.5, ("p2", "p3"): 0.5})
    # each source adds at most n/2 to the total, and exactly 1 to each citer's strength
    assert b.strength.tolist() == pytest.approx([2.0, 2.0, 1.0])


def test_unknown_weighting(toy_network):
    with pytest.raises(ConfigurationError):
        project_coupling(toy_network, "cosine")


def test_source_contribution_pairs():
    net = CitationNetwork.from_edges([("p1", "s"), ("p2", "s"), ("p3", "s"), ("p3", "t")])
    c = source_contribution(net, "s")
    assert c.pairs == {("p1", "p2"), ("p1", "p3"), ("p2", "p3")}
    assert c.n_pairs == 3 and c.total_weight == 3
    assert source_contribution(net, "t").pairs == frozenset()
    with pytest.raises(UnknownSourceError):
        source_contribution(net, "zzz")


@given(st.integers(0, 100_000))
@settings(max_examples=60, deadline=None)
def test_contributions_reproduce_projection(seed):
    net = random_network(random.Random(seed), 12, 25)
    summed = Counter()
    for s in net.cited:
        summed.update(source_contribution(net, s).pairs)
    b = project_coupling(net)
    assert {k: int(v) for k, v in b.edge_dict().items()} == dict(summed)
    assert sum(source_contribution(net, s).n_pairs for s in net.cited) == b.weights.sum()


@given(st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_projection_independent_of_edge_order(seed):
    rng = random.Random(seed)
    net = random_network(rng, 10, 20)
    shuffled = list(net.edges)
    rng.shuffle(shuffled)
    a, b = project_coupling(net), project_coupling(CitationNetwork.from_edges(shuffled))
    assert a.vertices == b.vertices
    assert a.rows.tolist() == b.rows.tolist() and a.cols.tolist() == b.cols.tolist()
    assert a.weights.tolist() == b.weights.tolist()


@given(st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_removing_once_cited_source_keeps_projection(seed):
    net = random_network(random.Random(seed), 10, 20)
    once = {s for s, d in net.in_degree.items() if d <= 1}
    kept = [e for e in net.edges if e[1] not in once]
    if not kept:
        return
    reduced = CitationNetwork.from_edges(kept)
    full = project_coupling(net).edge_dict()
    assert project_coupling(reduced).edge_dict() == full


def test_coupling_csv_export(tmp_path, toy_network):
    out = tmp_path / "b.csv"
    project_coupling(toy_network).write_csv(out)
    assert out.read_text(encoding="utf-8") == "source_i,source_j,weight\np1,p2,1\np2,p3,1\n"


def test_from_edges_rejects_self_pairs():
    with pytest.raises(ConfigurationError):
        CouplingNetwork.from_edges("ab", [("a", "a", 1)])


def test_pair_budget_warning(caplog):
    net = CitationNetwork.from_edges([(f"p{i}", "s") for i in range(5)])
    with caplog.at_level("WARNING"):
        project_coupling(net, pair_budget=3)
    assert "emits 10 coupled pairs" in caplog.text
