"""Mixing-time bounds for the biased walk and their numeric counterparts."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, GraphError
from .stationary import TargetSpec, stationary_distribution
from .walk import DENSE_LIMIT, transition_matrix

EULER_GAMMA = 0.5772156649015329
# dense eigensolves above this size are skipped in reports
EIGEN_LIMIT = 2000


class BoundError(ValueError):
    pass


def _positive(**kw) -> None:
    for name, value in kw.items():
        if not value > 0:
            raise BoundError(f"{name} must be positive, got {value}")


def second_eigenvalue(P: np.ndarray, pi: np.ndarray) -> float:
    """Second largest eigenvalue modulus of a reversible chain.

    Uses the symmetrisation ``diag(sqrt(pi)) P diag(1/sqrt(pi))``, whose
    spectrum is real and equals that of ``P``.
    """
    r = np.sqrt(pi)
    S = (P * r[:, None]) / r[None, :]
    asym = np.abs(S - S.T).max()
    if asym > 1e-9:
        raise BoundError(f"chain is not reversible with respect to pi (asymmetry {asym:.2e})")
    ev = np.linalg.eigvalsh(0.5 * (S + S.T))
    mods = np.sort(np.abs(ev))[::-1]
    return float(mods[1]) if mods.size > 1 else 0.0


def second_eigenvalue_power(P: np.ndarray, pi: np.ndarray, tol: float = 1e-13, max_iter: int = 200_000,
                            rng=None) -> float:
    """Same quantity by power iteration on the symmetrised matrix with the
    top eigenvector ``sqrt(pi)`` projected out."""
    r = np.sqrt(pi)
    S = (P * r[:, None]) / r[None, :]
    S = 0.5 * (S + S.T)
    top = r / np.linalg.norm(r)
    x = np.random.default_rng(rng).standard_normal(len(pi))
    x -= top * (top @ x)
    x /= np.linalg.norm(x)
    lam = 0.0
    # square the operator so negative and positive extremes are ranked by modulus
    for _ in range(max_iter):
        y = S @ (S @ x)
        y -= top * (top @ y)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - lam) <= tol * max(new, 1e-300):
            lam = new
            break
        lam = new
    return math.sqrt(lam)


def spectral_gap(P: np.ndarray, pi: np.ndarray) -> float:
    return 1.0 - second_eigenvalue(P, pi)


@dataclass
class SpectralBound:
    value: float
    lambda2: float
    vacuous: bool


def spectral_bound(P: np.ndarray, pi: np.ndarray, s: int, epsilon: float) -> SpectralBound:
    """``ln(1 / (pi_s * eps)) / (1 - |lambda_2|)``.

    Flagged vacuous when ``pi_s * eps >= 1`` (the logarithm is not positive).
    """
    _positive(epsilon=epsilon)
    lam = second_eigenvalue(P, pi)
    if lam >= 1.0 - 1e-12:
        raise BoundError("chain has no spectral gap (disconnected or periodic)")
    arg = pi[s - 1] * epsilon
    value = math.log(1.0 / arg) / (1.0 - lam)
    return SpectralBound(value, lam, bool(arg >= 1.0))


def eigengap_lower_bound(pi_min: float, diam: int, d_max: int) -> float:
    """``pi_min / (D * d_max)``."""
    _positive(pi_min=pi_min, diam=diam, d_max=d_max)
    return pi_min / (diam * d_max)


def zipf_walk_bound(pi_s: float, pi_min: float, diam: int, d_max: int, epsilon: float) -> float:
    """Walk length ``ln(1 / (pi_s * eps)) * D * d_max / pi_min``."""
    _positive(pi_s=pi_s, pi_min=pi_min, diam=diam, d_max=d_max)
    if not 0 < epsilon < 1:
        raise BoundError(f"epsilon must lie in (0, 1), got {epsilon}")
    return math.log(1.0 / (pi_s * epsilon)) * diam * d_max / pi_min


def harmonic(n: int) -> float:
    return float(np.sum(1.0 / np.arange(n, 0, -1, dtype=float)))


def harmonic_remainder(n: int) -> float:
    """``H_n - ln(n) - Euler's constant``; tends to zero."""
    return harmonic(n) - math.log(n) - EULER_GAMMA


def asymptotic_bound(n: int, s: int, gamma: float, gamma_i: float, epsilon: float) -> float:
    """Order estimate ``ln(n * s**(1/(gamma-1)) / eps) * ln(n)**2 * n**(1 + 1/gamma_i)``.

    Evaluated with implied constant one; this is a scaling indicator, not a
    hard bound.
    """
    if n < 2:
        raise BoundError("n must be at least 2")
    if gamma <= 2 or gamma_i <= 2:
        raise BoundError("exponents must exceed 2")
    _positive(epsilon=epsilon, s=s)
    return math.log(n * s ** (1.0 / (gamma - 1.0)) / epsilon) * math.log(n) ** 2 * n ** (1.0 + 1.0 / gamma_i)


def inverse_pi_min_bound(n: int) -> float:
    """``n * (ln n + Euler's constant + r_n)``, i.e. ``n * H_n``."""
    return n * (math.log(n) + EULER_GAMMA + harmonic_remainder(n))


@dataclass
class BoundReport:
    n: int
    gamma: float
    gamma_i: float
    epsilon: float
    s: int
    diameter: int
    d_max: int
    pi_min: float
    pi_s: float
    lambda2: float | None
    eigengap: float | None
    eigengap_lb: float
    l_spectral: float | None
    l_zipf: float
    l_asymptotic: float

    def as_row(self) -> dict:
        return asdict(self)


REPORT_FIELDS = list(BoundReport.__dataclass_fields__)


def bound_report(g: Graph, spec: TargetSpec, s: int, epsilon: float, gamma_i: float = 2.9) -> BoundReport:
    """All bounds for one (graph, target, start, epsilon) combination.

    ``gamma_i`` is the exponent assumed for the initial topology in the
    asymptotic estimate. The numeric spectrum is only computed up to
    ``EIGEN_LIMIT`` nodes.
    """
    if not g.is_connected():
        raise GraphError("bounds need a connected graph")
    pi = stationary_distribution(spec)
    diam = g.diameter()
    d_max = int(g.degrees().max())
    lam = gap = l_spec = None
    if g.n <= min(EIGEN_LIMIT, DENSE_LIMIT):
        P = transition_matrix(g, spec)
        sb = spectral_bound(P, pi, s, epsilon)
        lam, l_spec = sb.lambda2, sb.value
        gap = 1.0 - lam
    return BoundReport(
        n=g.n, gamma=spec.gamma, gamma_i=gamma_i, epsilon=epsilon, s=s, diameter=diam, d_max=d_max,
        pi_min=float(pi[-1]), pi_s=float(pi[s - 1]), lambda2=lam, eigengap=gap,
        eigengap_lb=eigengap_lower_bound(float(pi[-1]), diam, d_max), l_spectral=l_spec,
        l_zipf=zipf_walk_bound(float(pi[s - 1]), float(pi[-1]), diam, d_max, epsilon),
        l_asymptotic=asymptotic_bound(g.n, s, spec.gamma, gamma_i, epsilon) if spec.gamma > 2 else math.nan,
    )
