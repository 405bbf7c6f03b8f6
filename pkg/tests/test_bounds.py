import math
import random

import numpy as np
import pytest

from sfoverlay.bounds import (EULER_GAMMA, BoundError, asymptotic_bound, bound_report, eigengap_lower_bound,
                              harmonic, inverse_pi_min_bound, second_eigenvalue, second_eigenvalue_power,
                              spectral_bound, zipf_walk_bound)
from sfoverlay.generators import generate_ba, generate_er, random_connected_graph
from sfoverlay.graph import Graph
from sfoverlay.stationary import TargetSpec, stationary_distribution
from sfoverlay.walk import transition_matrix

PAIR = Graph.from_edges(2, [(1, 2)])


def pair_chain():
    spec = TargetSpec(2.0, 2)
    return transition_matrix(PAIR, spec), stationary_distribution(spec)


def test_two_node_spectral_bound():
    P, pi = pair_chain()
    sb = spectral_bound(P, pi, 1, 0.05)
    assert sb.lambda2 == pytest.approx(0.5)
    assert sb.value == pytest.approx(2 * math.log(30))
    assert not sb.vacuous


def test_complete_graph_uniform_limit():
    n = 6
    g = Graph.from_edges(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])
    P = np.full((n, n), 1 / (n - 1))
    np.fill_diagonal(P, 0)
    pi = np.full(n, 1 / n)
    lam = second_eigenvalue(P, pi)
    assert lam == pytest.approx(1 / (n - 1))
    assert spectral_bound(P, pi, 1, 0.05).value == pytest.approx(math.log(n / 0.05) / (1 - lam))


def test_vacuous_flag():
    P, pi = pair_chain()
    sb = spectral_bound(P, pi, 1, 1.6)
    assert sb.vacuous and sb.value <= 0


def test_eigengap_lower_bound_examples():
    assert eigengap_lower_bound(1 / 3, 1, 1) == pytest.approx(1 / 3)
    assert 1 / 3 <= 0.5
    assert eigengap_lower_bound(0.25, 1, 3) == pytest.approx(0.25 / 3)
    # K_4 with uniform target has gap 1 - 1/3
    assert eigengap_lower_bound(0.25, 1, 3) <= 2 / 3
    assert eigengap_lower_bound(0.1, 3, 8) == pytest.approx(eigengap_lower_bound(0.1, 3, 4) / 2)


def test_zipf_bound_examples():
    assert zipf_walk_bound(2 / 3, 1 / 3, 1, 1, 0.05) == pytest.approx(3 * math.log(30))
    a = zipf_walk_bound(0.1, 0.01, 4, 7, 0.05)
    b = zipf_walk_bound(0.1, 0.01, 4, 7, 0.025)
    assert b - a == pytest.approx(math.log(2) * 4 * 7 / 0.01)
    with pytest.raises(BoundError):
        zipf_walk_bound(0.1, 0.01, 4, 7, 1.0)


def test_harmonic_identity():
    n = 1000
    assert n * harmonic(n) == pytest.approx(7485.47, abs=0.01)
    pi_min = stationary_distribution(TargetSpec(2.0, n))[-1]
    assert 1 / pi_min == pytest.approx(n * harmonic(n), rel=1e-12)
    assert inverse_pi_min_bound(n) == pytest.approx(n * harmonic(n), rel=1e-12)
    assert harmonic(n) - math.log(n) - EULER_GAMMA == pytest.approx(1 / (2 * n), rel=1e-2)


@pytest.mark.parametrize("gamma", [2.5, 3.0, 5.0])
def test_pi_min_grows_with_gamma(gamma):
    assert stationary_distribution(TargetSpec(gamma, 1000))[-1] >= stationary_distribution(TargetSpec(2.0, 1000))[-1]


def test_asymptotic_monotone_in_gamma():
    assert asymptotic_bound(1000, 10, 2.1, 2.9, 0.05) > asymptotic_bound(1000, 10, 3.5, 2.9, 0.05)
    with pytest.raises(BoundError):
        asymptotic_bound(1000, 10, 2.0, 2.9, 0.05)


def test_power_iteration_agrees():
    rng = random.Random(0)
    for k in range(5):
        g = random_connected_graph(rng.randint(5, 40), rng)
        spec = TargetSpec(rng.choice([2.1, 2.5, 3.0]), g.n)
        P, pi = transition_matrix(g, spec), stationary_distribution(spec)
        assert abs(second_eigenvalue(P, pi) - second_eigenvalue_power(P, pi, rng=k)) <= 1e-8


def test_report_small_er():
    g = generate_er(50, 120, random.Random(1))
    rep = bound_report(g, TargetSpec(2.5, 50), 1, 0.05)
    assert rep.eigengap is not None and rep.eigengap_lb <= rep.eigengap
    assert rep.l_spectral <= rep.l_zipf


def test_report_large_skips_spectrum():
    g = generate_ba(5000, 5, random.Random(2))
    rep = bound_report(g, TargetSpec(2.5, 5000), 1, 0.05)
    assert rep.lambda2 is None and rep.l_spectral is None
    assert rep.l_zipf > 0 and rep.l_asymptotic > 0


def test_report_disconnected_raises():
    with pytest.raises(Exception):
        bound_report(Graph(3), TargetSpec(2.5, 3), 1, 0.05)
