from fractions import Fraction

import mpmath
import numpy as np
import pytest

from sfoverlay.stationary import (TargetSpec, acceptance_ratio, alpha_from_gamma, gamma_from_alpha,
                                  stationary_distribution)


@pytest.mark.parametrize("gamma,alpha", [(2, 1.0), (3, 0.5), (11, 0.1)])
def test_alpha_from_gamma(gamma, alpha):
    assert alpha_from_gamma(gamma) == pytest.approx(alpha)
    assert gamma_from_alpha(alpha) == pytest.approx(gamma)


def test_alpha_domain():
    with pytest.raises(ValueError):
        alpha_from_gamma(1.9)
    with pytest.raises(ValueError):
        alpha_from_gamma(2.0, strict=True)


def test_single_node():
    assert stationary_distribution(TargetSpec(2.5, 1)).tolist() == [1.0]


def test_two_nodes_gamma2():
    pi = stationary_distribution(TargetSpec(2, 2))
    assert pi == pytest.approx([2 / 3, 1 / 3], abs=1e-15)


def test_matches_extended_precision_sum():
    n, gamma = 1000, 3.0
    pi = stationary_distribution(TargetSpec(gamma, n))
    with mpmath.workdps(40):
        w = [mpmath.mpf(i) ** (-mpmath.mpf(1) / (gamma - 1)) for i in range(1, n + 1)]
        z = mpmath.fsum(w)
        oracle = np.array([float(x / z) for x in w])
    assert np.abs(pi - oracle).max() <= 1e-12
    assert abs(pi.sum() - 1) <= 1e-12


def test_pi_min_is_last():
    spec = TargetSpec(2.5, 50)
    assert spec.pi_min == pytest.approx(stationary_distribution(spec)[-1])


def test_acceptance_ratio_examples():
    assert acceptance_ratio(1, 2, 3, 3, 2) == pytest.approx(0.5)
    assert acceptance_ratio(2, 1, 3, 3, 2) == pytest.approx(2.0)
    assert min(acceptance_ratio(2, 1, 3, 3, 2), 1) == 1
    assert acceptance_ratio(4, 4, 2, 2, 3) == 1.0


def test_acceptance_ratio_degrees():
    # degree correction d_i / d_j
    spec = TargetSpec(3, 10)
    assert acceptance_ratio(1, 1, 6, 3, spec) == pytest.approx(2.0)


def test_gamma2_weights_are_harmonic():
    spec = TargetSpec(2, 6)
    h6 = sum(Fraction(1, k) for k in range(1, 7))
    assert spec.norm == pytest.approx(float(h6), rel=1e-15)
