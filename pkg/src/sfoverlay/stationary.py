"""Target stationary distribution of the biased walk.

Node ``i`` carries weight ``i ** -alpha`` with ``alpha = 1 / (gamma - 1)``;
drawing edge endpoints with the normalised weights yields a degree
distribution ``P(k) ~ k ** -gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def alpha_from_gamma(gamma: float, strict: bool = False) -> float:
    """Weight exponent for a target degree exponent.

    ``gamma = 2`` is admitted for bound computations; pass ``strict=True``
    where a usable protocol target is required.
    """
    if gamma < 2 or (strict and gamma <= 2):
        raise ValueError(f"target exponent must be {'>' if strict else '>='} 2, got {gamma}")
    return 1.0 / (gamma - 1.0)


def gamma_from_alpha(alpha: float) -> float:
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return 1.0 + 1.0 / alpha


@dataclass(frozen=True)
class TargetSpec:
    """Target exponent ``gamma`` on ``n`` nodes."""

    gamma: float
    n: int
    alpha: float = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        object.__setattr__(self, "alpha", alpha_from_gamma(self.gamma))

    @cached_property
    def weights(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float) ** -self.alpha

    @cached_property
    def norm(self) -> float:
        # summed smallest-first to limit round-off
        return float(np.sum(self.weights[::-1]))

    def prob(self, i: int) -> float:
        return i ** -self.alpha / self.norm

    @property
    def pi_min(self) -> float:
        return self.prob(self.n)


def stationary_distribution(spec: TargetSpec) -> np.ndarray:
    """``pi[i-1] = i ** -alpha / sum_k k ** -alpha`` for ``i = 1..n``."""
    return spec.weights / spec.norm


def acceptance_ratio(i: int, j: int, d_i: int, d_j: int, spec_or_gamma) -> float:
    """Unclamped Metropolis ratio for a proposed move ``i -> j``.

    Equals ``(pi_j / pi_i) * (d_i / d_j)``; the move is taken with
    probability ``min(ratio, 1)``.
    """
    if d_i < 1 or d_j < 1:
        raise ValueError("degrees must be positive")
    alpha = spec_or_gamma.alpha if isinstance(spec_or_gamma, TargetSpec) else alpha_from_gamma(spec_or_gamma)
    return (i / j) ** alpha * d_i / d_j
