import random
from collections import Counter

import numpy as np
import pytest

from sfoverlay.graph import Graph, GraphError, read_edgelist, write_edgelist

from conftest import binom_ok


def cycle(n):
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def test_add_edge_updates_degrees():
    g = Graph(3)
    assert g.add_edge(1, 2)
    assert {v: g.degree(v) for v in g.nodes()} == {1: 1, 2: 1, 3: 0}


def test_add_duplicate_reports_and_keeps_count():
    g = Graph(3)
    g.add_edge(1, 2)
    assert g.add_edge(2, 1) is False
    assert g.m == 1


def test_self_loop_rejected():
    with pytest.raises(GraphError):
        Graph(3).add_edge(1, 1)


def test_out_of_range_node_rejected():
    with pytest.raises(GraphError):
        Graph(3).add_edge(1, 4)


def test_remove_edge_splits_components(path3):
    assert path3.remove_edge(1, 2)
    assert sorted(map(sorted, path3.connected_components())) == [[1], [2, 3]]


def test_remove_marked_edge_clears_marks(path3):
    path3.mark(1, 2)
    assert path3.n_marked == 1
    path3.remove_edge(2, 1)
    assert path3.marked_neighbors(1) == set() and path3.marked_neighbors(2) == set()
    assert path3.n_marked == 0
    path3.validate()


def test_remove_absent_is_noop(path3):
    assert path3.remove_edge(1, 3) is False
    assert path3.m == 2


def test_random_neighbor_uniform_on_star():
    g = Graph.from_edges(4, [(1, 2), (1, 3), (1, 4)])
    rng = random.Random(1)
    N = 100_000
    c = Counter(g.random_neighbor(1, rng) for _ in range(N))
    assert all(binom_ok(c[v], N, 1 / 3) for v in (2, 3, 4))


def test_random_neighbor_degree_one(path3, rng):
    assert all(path3.random_neighbor(1, rng) == 2 for _ in range(100))


def test_random_neighbor_isolated_raises(rng):
    with pytest.raises(GraphError):
        Graph(2).random_neighbor(1, rng)


def test_random_unmarked_neighbor(path3, rng):
    path3.mark(2, 1)
    assert all(path3.random_unmarked_neighbor(2, rng) == 3 for _ in range(100))
    path3.mark(2, 3)
    assert path3.random_unmarked_neighbor(2, rng) is None


def test_random_unmarked_neighbor_uniform():
    g = Graph.from_edges(6, [(1, k) for k in range(2, 6)] + [(1, 6)])
    g.mark(1, 6)
    rng = random.Random(2)
    N = 100_000
    c = Counter(g.random_unmarked_neighbor(1, rng) for _ in range(N))
    assert c[6] == 0
    assert all(binom_ok(c[v], N, 1 / 4) for v in range(2, 6))


def test_components():
    assert [sorted(c) for c in Graph.from_edges(3, [(1, 2), (2, 3)]).connected_components()] == [[1, 2, 3]]
    assert len(Graph(3).connected_components()) == 3
    two = Graph.from_edges(6, [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)])
    assert sorted(len(c) for c in two.connected_components()) == [3, 3]


@pytest.mark.parametrize("g,d", [
    (Graph.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5)]), 4),
    (complete(4), 1),
    (cycle(6), 3),
])
def test_diameter(g, d):
    assert g.diameter() == d


def test_diameter_disconnected_raises():
    with pytest.raises(GraphError):
        Graph(3).diameter()


def test_csr_matches_adjacency(k3):
    indptr, indices = k3.to_csr()
    assert indptr.tolist() == [0, 2, 4, 6]
    assert sorted(indices[0:2].tolist()) == [1, 2]


def test_copy_is_independent(k3):
    h = k3.copy()
    h.remove_edge(1, 2)
    assert k3.has_edge(1, 2) and not h.has_edge(1, 2)
    assert k3 != h


def test_relabel_preserves_structure():
    g = Graph.from_edges(4, [(1, 2), (2, 3), (3, 4)])
    h = g.relabel(np.array([4, 3, 2, 1]))
    assert sorted(h.edges()) == [(1, 2), (2, 3), (3, 4)]
    assert h.degree(1) == 1 and h.degree(4) == 1


def test_edgelist_roundtrip(tmp_path):
    g = complete(5)
    g.remove_edge(1, 2)
    g.mark(3, 4)
    path = tmp_path / "g.edges"
    write_edgelist(g, path, {"seed": 3})
    h, meta = read_edgelist(path)
    assert h == g and h.is_marked(3, 4) and not h.is_marked(1, 3)
    assert meta["seed"] == "3"


def test_edgelist_bad_count(tmp_path):
    p = tmp_path / "bad.edges"
    p.write_text("n=3 m=2\n1 2\n")
    with pytest.raises(GraphError):
        read_edgelist(p)
