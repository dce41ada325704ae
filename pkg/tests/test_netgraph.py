import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    apl_oracle,
    clustering_oracle,
    diameter_oracle,
    disjoint_paths_by_cut,
    disjoint_paths_by_packing,
    random_connected_graph,
)
from tradenet import netgraph as ng
from tradenet.errors import DegenerateSpec, Disconnected, GenerationFailed, GraphFormatError


def ws(n, k, p, seed=0):
    return ng.generate_ws(ng.NetworkSpec(n, k, p, seed))


# ---------------------------------------------------------------- graph type


def test_graph_rejects_loops_duplicates_and_bad_terminals():
    with pytest.raises(ValueError):
        ng.Graph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        ng.Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        ng.Graph.from_edges(3, [(0, 1)], source=1, destination=1)
    with pytest.raises(ValueError):
        ng.Graph.from_edges(3, [(0, 3)])


def test_adjacency_is_symmetric():
    g = ws(26, 3, 1.0, seed=5)
    for u in range(g.n):
        for v in g.adj[u]:
            assert u in g.adj[v]


# ---------------------------------------------------------------- generation


def test_lattice_k4_is_regular_with_half_clustering():
    g = ws(26, 4, 0.0)
    assert all(g.degree(v) == 4 for v in range(26))
    assert ng.clustering_coefficient(g) == 0.5


def test_odd_degree_lattice_is_regular():
    g = ws(26, 3, 0.0)
    assert all(g.degree(v) == 3 for v in range(26))
    assert g.has_edge(0, 13)


def test_random_26_3_has_39_edges_and_is_connected():
    for seed in range(20):
        g = ws(26, 3, 1.0, seed)
        assert g.edge_count == 39
        assert ng.is_connected(g)


@pytest.mark.parametrize("n,k", [(26, 3), (26, 4), (30, 6), (50, 4), (20, 5)])
@pytest.mark.parametrize("p", [0.0, 0.1, 0.5, 1.0])
def test_edge_count_preserved_by_rewiring(n, k, p):
    for seed in range(5):
        assert ws(n, k, p, seed).edge_count == n * k // 2


@pytest.mark.parametrize("k", [2, 4, 6, 8, 10])
def test_lattice_clustering_closed_form(k):
    g = ws(40, k, 0.0)
    expected = Fraction(3 * (k - 2), 4 * (k - 1))
    assert ng.clustering_coefficient(g) == pytest.approx(float(expected), abs=1e-12)
    assert ng.lattice_clustering(k) == pytest.approx(float(expected), abs=1e-12)


def test_small_world_keeps_clustering_but_shortens_paths():
    sw = [ws(50, 4, 0.1, s) for s in range(100)]
    rd = [ws(50, 4, 1.0, s) for s in range(100)]
    lattice = ws(50, 4, 0.0)
    mean = lambda xs: sum(xs) / len(xs)
    c_sw = mean([ng.clustering_coefficient(g) for g in sw])
    c_rd = mean([ng.clustering_coefficient(g) for g in rd])
    l_sw = mean([ng.average_path_length(g) for g in sw])
    l_rd = mean([ng.average_path_length(g) for g in rd])
    assert c_sw > 2 * c_rd
    assert l_sw < 0.6 * ng.average_path_length(lattice)
    assert l_sw / l_rd < 1.5


def test_generation_is_deterministic_per_seed():
    assert ws(26, 3, 0.3, 9) == ws(26, 3, 0.3, 9)
    assert ws(26, 3, 0.3, 9) != ws(26, 3, 0.3, 10)


@pytest.mark.parametrize("n,k,p", [(26, 30, 0.1), (26, 26, 0.1), (26, 1, 0.1), (26, 4, 1.5),
                                   (25, 3, 0.1)])
def test_degenerate_specs(n, k, p):
    with pytest.raises(DegenerateSpec):
        ws(n, k, p)


def test_generation_failed_when_retries_exhausted():
    # k=2 with p=1 on a large ring disconnects almost surely
    with pytest.raises(GenerationFailed):
        ng.generate_ws(ng.NetworkSpec(200, 2, 1.0, 0), max_tries=3)


def test_generated_graph_matches_networkx_structure():
    g = ws(30, 4, 0.2, 3)
    G = nx.Graph(list(g.edges))
    assert nx.is_connected(G)
    assert ng.average_path_length(g) == pytest.approx(nx.average_shortest_path_length(G), abs=1e-12)
    assert ng.clustering_coefficient(g) == pytest.approx(nx.average_clustering(G), abs=1e-12)


# ---------------------------------------------------------------- metrics


def test_small_metric_cases():
    assert ng.average_path_length(ng.path_graph(3)) == pytest.approx(4 / 3)
    for n in (2, 5, 9):
        assert ng.average_path_length(ng.complete_graph(n)) == 1.0
    assert ng.clustering_coefficient(ng.complete_graph(3)) == 1.0
    assert ng.clustering_coefficient(ng.star_graph(5)) == 0.0
    assert ng.diameter(ng.path_graph(4)) == 3
    assert ng.diameter(ng.cycle_graph(26)) == 13


def test_disconnected_metrics_raise():
    g = ng.Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(Disconnected):
        ng.average_path_length(g)
    with pytest.raises(Disconnected):
        ng.diameter(g)
    assert not ng.is_connected(g)


@pytest.mark.parametrize("spec", [(26, 4, 0.1, 0), (26, 3, 1.0, 1), (50, 4, 0.1, 2)])
def test_ws_metrics_match_oracle(spec):
    g = ws(*spec)
    edges = list(g.edges)
    assert Fraction(ng.average_path_length(g)) == pytest.approx(apl_oracle(g.n, edges), abs=1e-12)
    assert ng.diameter(g) == diameter_oracle(g.n, edges)
    assert ng.clustering_coefficient(g) == pytest.approx(float(clustering_oracle(g.n, edges)), abs=1e-12)


def test_apl_and_diameter_on_100_random_graphs():
    rng = random.Random(1)
    for _ in range(100):
        g = random_connected_graph(rng, 4, 30) if rng.random() < 0.3 else random_connected_graph(rng, 4, 12)
        edges = list(g.edges)
        assert ng.average_path_length(g) == float(apl_oracle(g.n, edges))
        assert ng.diameter(g) == diameter_oracle(g.n, edges)


# ---------------------------------------------------------------- disjoint paths


def test_disjoint_paths_small_cases():
    diamond = ng.Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3)
    chain = ng.Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)], 0, 3)
    assert ng.node_disjoint_paths(diamond) == 2
    assert ng.node_disjoint_paths(chain) == 1
    split = ng.Graph.from_edges(4, [(0, 1), (2, 3)], 0, 3)
    assert ng.node_disjoint_paths(split) == 0


def test_direct_edge_counts_as_one_path():
    g = ng.Graph.from_edges(3, [(0, 2), (0, 1), (1, 2)], 0, 2)
    assert ng.node_disjoint_paths(g) == 2


def test_disjoint_paths_all_graphs_on_five_nodes():
    pairs = list(itertools.combinations(range(5), 2))
    for mask in range(1 << len(pairs)):
        edges = [e for i, e in enumerate(pairs) if mask >> i & 1]
        g = ng.Graph.from_edges(5, edges, 0, 4)
        assert ng.node_disjoint_paths(g) == disjoint_paths_by_cut(5, edges, 0, 4)


def test_disjoint_paths_match_packing_up_to_eight_nodes():
    rng = random.Random(2)
    for _ in range(150):
        g = random_connected_graph(rng, 4, 8)
        edges = list(g.edges)
        m = ng.node_disjoint_paths(g)
        assert m == disjoint_paths_by_packing(g.n, edges, g.source, g.destination)
        assert m == disjoint_paths_by_cut(g.n, edges, g.source, g.destination)
        assert m <= min(g.degree(g.source), g.degree(g.destination))


def test_disjoint_paths_match_networkx_on_ws_graphs():
    for seed in range(10):
        g = ws(26, 4, 0.5, seed).with_terminals(0, 13)
        G = nx.Graph(list(g.edges))
        if not G.has_edge(0, 13):
            assert ng.node_disjoint_paths(g) == nx.node_connectivity(G, 0, 13)


# ---------------------------------------------------------------- parallel paths


def test_parallel_path_shapes():
    diamond = ng.make_parallel_paths(2, 2)
    assert diamond.n == 4 and diamond.edge_count == 4
    assert ng.node_disjoint_paths(diamond) == 2
    chain = ng.make_parallel_paths(1, 5)
    assert len(chain.intermediaries()) == 4
    assert ng.node_disjoint_paths(chain) == 1


def test_parallel_paths_metrics_cross_check():
    g = ng.make_parallel_paths(4, 3)
    assert ng.node_disjoint_paths(g) == 4
    assert ng.average_path_length(g) == float(apl_oracle(g.n, list(g.edges)))


@settings(max_examples=40, deadline=None)
@given(M=st.integers(1, 6), hops=st.integers(2, 6))
def test_parallel_paths_have_M_disjoint_paths(M, hops):
    g = ng.make_parallel_paths(M, hops)
    assert ng.node_disjoint_paths(g) == M
    assert g.n == 2 + M * (hops - 1)
    assert ng.bfs_distances(g, 0)[1] == hops


# ---------------------------------------------------------------- file format


def test_round_trip(tmp_path):
    g = ws(26, 3, 1.0, 7).with_terminals(3, 17)
    path = tmp_path / "g.txt"
    ng.store(g, path)
    text = path.read_text()
    assert text.startswith("n 26 s 3 d 17\n")
    assert len(text.splitlines()) == 1 + 39
    back = ng.load(path)
    assert back == g
    ng.store(back, tmp_path / "h.txt")
    assert (tmp_path / "h.txt").read_bytes() == path.read_bytes()


def test_store_requires_terminals_and_loads_unset(tmp_path):
    g = ng.path_graph(3)
    with pytest.raises(ValueError):
        ng.store(g, tmp_path / "x.txt")
    assert ng.loads(ng.dumps(g, allow_unset=True)) == g


@pytest.mark.parametrize("text", ["", "n 3 s 0\n", "n 3 s 0 d 2\n0 x\n", "n 3 s 0 d 2\n0 0\n",
                                  "n 3 s 0 d 0\n0 1\n", "m 3 s 0 d 2\n"])
def test_malformed_files(text):
    with pytest.raises(GraphFormatError):
        ng.loads(text)
