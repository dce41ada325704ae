import math
import random

import pytest

from oracles import (
    random_connected_graph,
    sd_alpha_oracle,
    sd_betweenness_oracle,
    sd_oracle,
    simple_paths_oracle,
)
from tradenet import centrality as c
from tradenet.errors import Disconnected, NotIntermediary, PathExplosion
from tradenet.netgraph import Graph, complete_graph, make_parallel_paths

DIAMOND = Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3)
CHAIN = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)], 0, 3)
# S=0, a=1, b=2, c=3, D=4: paths S-a-D, S-a-b-D, S-c-D
THREE = Graph.from_edges(5, [(0, 1), (1, 4), (1, 2), (2, 4), (0, 3), (3, 4)], 0, 4)
# paths S-a-D (2 hops) and S-b-c-D (3 hops)
SHORT_LONG = Graph.from_edges(5, [(0, 1), (1, 4), (0, 2), (2, 3), (3, 4)], 0, 4)


def inv(g):
    return c.enumerate_paths(g)


def test_path_counts():
    assert len(inv(DIAMOND)) == 2
    assert len(inv(CHAIN)) == 1
    k5 = complete_graph(5).with_terminals(0, 4)
    assert len(inv(k5)) == 1 + 3 + 3 * 2 + 3 * 2 * 1


def test_inventory_paths_are_valid_and_distinct():
    g = complete_graph(7).with_terminals(2, 5)
    paths = inv(g).paths
    assert len(set(paths)) == len(paths)
    for p in paths:
        assert p[0] == 2 and p[-1] == 5 and len(set(p)) == len(p)
        assert all(g.has_edge(a, b) for a, b in zip(p, p[1:]))
    assert sorted(paths) == sorted(simple_paths_oracle(7, list(g.edges), 2, 5))


def test_path_explosion_and_disconnected():
    g = complete_graph(9).with_terminals(0, 8)
    with pytest.raises(PathExplosion) as exc:
        c.enumerate_paths(g, cap=100)
    assert exc.value.cap == 100
    with pytest.raises(Disconnected):
        c.enumerate_paths(Graph.from_edges(4, [(0, 1), (2, 3)], 0, 3))


def test_criticality_examples():
    assert c.sd_criticality(DIAMOND, 1, inv(DIAMOND)) == 0.5
    assert c.sd_criticality(CHAIN, 1, inv(CHAIN)) == 1.0
    assert c.sd_criticality(THREE, 1, inv(THREE)) == 2 / 3


def test_endpoints_are_not_intermediaries():
    with pytest.raises(NotIntermediary):
        c.sd_criticality(DIAMOND, 0, inv(DIAMOND))
    with pytest.raises(NotIntermediary):
        c.sd_alpha(DIAMOND, 3, 1.0, inv(DIAMOND))
    with pytest.raises(NotIntermediary):
        c.sd_betweenness(DIAMOND, 3)


def test_alpha_examples():
    i = inv(SHORT_LONG)
    assert c.sd_alpha(SHORT_LONG, 1, 1.0, i) == pytest.approx(0.6, abs=1e-12)
    assert abs(c.sd_alpha(SHORT_LONG, 1, 100.0, i) - c.sd_betweenness(SHORT_LONG, 1)) < 1e-6
    assert c.sd_betweenness(SHORT_LONG, 1) == 1.0
    # no underflow to 0/0 at huge alpha
    assert c.sd_alpha(SHORT_LONG, 1, 1e6, i) == 1.0
    assert c.sd_alpha(SHORT_LONG, 2, 1e6, i) == 0.0


def test_alpha_zero_equals_criticality_exactly():
    rng = random.Random(3)
    for _ in range(30):
        g = random_connected_graph(rng, 4, 9)
        i = inv(g)
        for v in g.intermediaries():
            assert c.sd_alpha(g, v, 0.0, i) == c.sd_criticality(g, v, i)


def test_betweenness_examples():
    assert c.sd_betweenness(DIAMOND, 1) == 0.5
    assert c.sd_betweenness(DIAMOND, 2) == 0.5
    assert c.sd_betweenness(CHAIN, 2) == 1.0
    with pytest.raises(Disconnected):
        c.sd_betweenness(Graph.from_edges(4, [(0, 1), (2, 3)], 0, 3), 1)


def test_betweenness_is_alpha_limit_on_random_graphs():
    rng = random.Random(4)
    for _ in range(50):
        g = random_connected_graph(rng, 4, 12) if rng.random() < 0.2 else random_connected_graph(rng, 4, 10)
        try:
            i = c.enumerate_paths(g, cap=200_000)
        except PathExplosion:
            continue
        sb = c.sd_betweenness_all(g)
        big = c.sd_alpha_all(g, 1e6, i)
        for v in g.intermediaries():
            assert abs(big[v] - sb[v]) < 1e-9


def test_alpha_50_close_to_limit_with_length_gap():
    # shortest path 2 hops, all others at least 4
    g = Graph.from_edges(8, [(0, 1), (1, 7), (0, 2), (2, 3), (3, 4), (4, 7), (3, 5), (5, 6), (6, 4)], 0, 7)
    i = inv(g)
    for v in g.intermediaries():
        assert abs(c.sd_alpha(g, v, 50.0, i) - c.sd_betweenness(g, v)) < 1e-3


def test_betweenness_sum_is_mean_shortest_interior():
    rng = random.Random(5)
    for _ in range(40):
        g = random_connected_graph(rng, 4, 9)
        paths = simple_paths_oracle(g.n, list(g.edges), g.source, g.destination)
        shortest = min(len(p) for p in paths)
        assert sum(c.sd_betweenness_all(g).values()) == pytest.approx(shortest - 2, abs=1e-12)


def test_cut_vertex_is_critical():
    # 0-1-2 triangle side, bridge node 3, then 4-5-6 with D=6
    g = Graph.from_edges(7, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)], 0, 6)
    assert c.sd_criticality(g, 3, inv(g)) == 1.0
    pp = make_parallel_paths(1, 4)
    for v in pp.intermediaries():
        assert c.sd_criticality(pp, v, inv(pp)) == 1.0


def test_relabeling_invariance():
    rng = random.Random(6)
    for _ in range(20):
        g = random_connected_graph(rng, 5, 9)
        perm = list(range(g.n))
        rng.shuffle(perm)
        h = Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges],
                             perm[g.source], perm[g.destination])
        ig, ih = inv(g), inv(h)
        sbg, sbh = c.sd_betweenness_all(g), c.sd_betweenness_all(h)
        for v in g.intermediaries():
            assert c.sd_criticality(g, v, ig) == c.sd_criticality(h, perm[v], ih)
            assert c.sd_alpha(g, v, 1.5, ig) == pytest.approx(c.sd_alpha(h, perm[v], 1.5, ih), abs=1e-12)
            assert sbg[v] == sbh[perm[v]]


def test_measures_match_oracles_exactly():
    rng = random.Random(7)
    for _ in range(60):
        g = random_connected_graph(rng, 4, 9)
        paths = simple_paths_oracle(g.n, list(g.edges), g.source, g.destination)
        i = inv(g)
        for v in g.intermediaries():
            assert c.sd_criticality(g, v, i) == float(sd_oracle(paths, v))
            assert c.sd_betweenness(g, v) == float(sd_betweenness_oracle(paths, v))
            for a in (0.5, 1.0, 3.0):
                assert math.isclose(c.sd_alpha(g, v, a, i), sd_alpha_oracle(paths, v, a),
                                    rel_tol=1e-9, abs_tol=1e-12)


def test_negative_alpha_rejected():
    with pytest.raises(ValueError):
        c.sd_alpha(DIAMOND, 1, -1.0, inv(DIAMOND))


def test_measures_csv_round_trip(tmp_path):
    path = tmp_path / "m.csv"
    c.write_measures_csv(path, THREE, [0.5, 2.0])
    header, rows = c.read_measures_csv(path)
    assert header == ["node", "sd0", "sd_alpha(α=0.5)", "sd_alpha(α=2)", "sd_inf"]
    assert rows == c.measures_table(THREE, [0.5, 2.0])
    assert rows[0][0] == 1 and rows[0][1] == 2 / 3
