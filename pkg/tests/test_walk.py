import random
from collections import Counter

import numpy as np
import pytest

from sfoverlay.analysis import total_variation
from sfoverlay.generators import generate_er, random_connected_graph
from sfoverlay.graph import Graph, GraphError
from sfoverlay.stationary import TargetSpec, stationary_distribution
from sfoverlay.walk import (WalkSnapshot, exact_distribution, exact_distributions, mh_step, run_walk,
                            sample_edge_endpoints, transition_matrix, transition_matrix_sparse)

from conftest import binom_ok

PAIR = Graph.from_edges(2, [(1, 2)])


def test_step_towards_smaller_id_always_accepted():
    spec = TargetSpec(3.0, 2)
    rng = random.Random(0)
    assert all(mh_step(PAIR, 2, spec, rng) == 1 for _ in range(1000))


def test_step_from_node1_gamma2():
    spec = TargetSpec(2.0, 2)
    rng = random.Random(1)
    N = 100_000
    moved = sum(mh_step(PAIR, 1, spec, rng) == 2 for _ in range(N))
    assert binom_ok(moved, N, 0.5)


def test_step_frequencies_match_matrix(k3):
    spec = TargetSpec(3.0, 3)
    P = transition_matrix(k3, spec)
    rng = random.Random(2)
    N = 100_000
    for start in (1, 2, 3):
        c = Counter(mh_step(k3, start, spec, rng) for _ in range(N))
        for v in (1, 2, 3):
            assert binom_ok(c[v], N, P[start - 1, v - 1])


def test_step_isolated_raises():
    with pytest.raises(GraphError):
        mh_step(Graph(2), 1, TargetSpec(2.5, 2), random.Random(0))


def test_run_walk_zero_length(k3):
    assert run_walk(k3, 2, 0, TargetSpec(2.5, 3), random.Random(0)) == 2


def test_long_walks_reach_target_on_er50():
    g = generate_er(50, 120, random.Random(3))
    spec = TargetSpec(2.5, 50)
    pi = stationary_distribution(spec)
    P = transition_matrix(g, spec)
    assert total_variation(exact_distribution(P, 1, 200), pi) < 0.005
    snap = WalkSnapshot(g, spec)
    rng = np.random.default_rng(4)
    R = 1_000_000
    counts = snap.hit_counts(rng.integers(1, 51, size=R), [200], rng)[200]
    assert total_variation(counts / R, pi) <= 0.01


def test_edge_endpoints_zero_length(k3):
    out = sample_edge_endpoints(k3, 3, 0, TargetSpec(2.5, 3), random.Random(0))
    assert out.endpoint_mid == 3 and out.endpoint_end == 3


def test_edge_endpoints_mid_follows_row(k3):
    spec = TargetSpec(2.5, 3)
    P = transition_matrix(k3, spec)
    rng = random.Random(5)
    N = 60_000
    c = Counter(sample_edge_endpoints(k3, 1, 1, spec, rng).endpoint_mid for _ in range(N))
    assert all(binom_ok(c[v], N, P[0, v - 1]) for v in (1, 2, 3))


def test_edge_endpoints_nearly_independent():
    g = random_connected_graph(30, random.Random(6), mean_degree=4)
    spec = TargetSpec(2.5, 30)
    pi = stationary_distribution(spec)
    snap = WalkSnapshot(g, spec)
    rng = np.random.default_rng(7)
    R = 1_000_000
    cur = rng.integers(0, 30, size=R)
    for _ in range(100):
        cur = snap.step(cur, rng)
    mid = cur.copy()
    for _ in range(100):
        cur = snap.step(cur, rng)
    joint = np.bincount(mid * 30 + cur, minlength=900) / R
    assert total_variation(joint, np.outer(pi, pi).ravel()) <= 0.02


def test_two_node_matrix_gamma2():
    P = transition_matrix(PAIR, TargetSpec(2.0, 2))
    assert P.tolist() == [[0.5, 0.5], [1.0, 0.0]]


def test_detailed_balance_k3(k3):
    spec = TargetSpec(3.0, 3)
    P = transition_matrix(k3, spec)
    pi = stationary_distribution(spec)
    F = pi[:, None] * P
    assert np.abs(F - F.T).max() <= 1e-12
    assert np.abs(P.sum(axis=1) - 1).max() <= 1e-12


def test_sparse_matches_dense():
    g = random_connected_graph(40, random.Random(8))
    spec = TargetSpec(2.3, 40)
    assert np.abs(transition_matrix_sparse(g, spec).toarray() - transition_matrix(g, spec)).max() <= 1e-15


def test_exact_distribution_edges(k3):
    P = transition_matrix(k3, TargetSpec(2.5, 3))
    assert exact_distribution(P, 2, 0).tolist() == [0.0, 1.0, 0.0]
    assert np.allclose(exact_distribution(P, 2, 1), P[1])
    V = exact_distributions(P, [1, 3], 2)
    assert np.allclose(V[1], P[2] @ P)


def test_exact_distribution_converges():
    g = random_connected_graph(20, random.Random(9))
    spec = TargetSpec(2.5, 20)
    P = transition_matrix(g, spec)
    assert total_variation(exact_distribution(P, 5, 10_000), stationary_distribution(spec)) < 1e-8


def test_snapshot_rejects_isolated_start():
    g = Graph.from_edges(3, [(1, 2)])
    snap = WalkSnapshot(g, TargetSpec(2.5, 3))
    with pytest.raises(GraphError):
        snap.hit_counts([3], [1], np.random.default_rng(0))


def test_dense_guard():
    with pytest.raises(ValueError):
        transition_matrix(Graph(5001), TargetSpec(2.5, 5001))
