"""scikit-learn style wrappers.

``PowerLawFitter`` is an estimator over a 1-D sample of degrees;
``ScaleFreeRewirer`` is a transformer that maps a connected overlay to its
adapted version by running one protocol cycle. Both expose
``get_params``/``set_params`` so they can be cloned and grid-searched.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import FitResult, fit_power_law
from .graph import Graph, GraphError
from .protocol import DEFAULT_FIT, SimConfig, Simulator


def check_degree_sample(X) -> np.ndarray:
    """Flatten ``X`` (list, 1-D array or single column) into positive integer degrees."""
    x = np.asarray(X)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D degree sample or single column, got shape {x.shape}")
    if x.size == 0:
        raise ValueError("empty degree sample")
    if not np.all(np.isfinite(x)) or np.any(x != np.round(x)):
        raise ValueError("degrees must be finite integers")
    x = x.astype(np.int64)
    if np.any(x < 0):
        raise ValueError("degrees must be non-negative")
    return x


def check_graph(G, require_connected: bool = True) -> Graph:
    if not isinstance(G, Graph):
        raise TypeError(f"expected a Graph, got {type(G).__name__}")
    if G.m == 0:
        raise GraphError("graph has no edges")
    if require_connected and not G.is_connected():
        raise GraphError("graph must be connected")
    return G


class PowerLawFitter(BaseEstimator):
    """Discrete power-law fit with KS-selected lower cutoff.

    Parameters
    ----------
    method : {"approx", "exact"}
        Closed-form shifted estimator or zeta-likelihood maximisation.
    min_tail : int
        Minimum number of samples at or above a candidate cutoff.
    exponent_range : tuple of float or None
        Restrict the exponent to this interval.

    Attributes
    ----------
    gamma_ : float
    d_min_ : int
    ks_ : float
    n_tail_ : int
    """

    def __init__(self, method="approx", min_tail=50, exponent_range=None):
        self.method = method
        self.min_tail = min_tail
        self.exponent_range = exponent_range

    def fit(self, X, y=None):
        x = check_degree_sample(X)
        res = fit_power_law(x, min_tail=self.min_tail, method=self.method, exponent_range=self.exponent_range)
        self.result_ = res
        self.gamma_ = res.gamma_f
        self.d_min_ = res.d_min_fit
        self.ks_ = res.ks_D
        self.n_tail_ = res.n_tail
        return self

    def score(self, X, y=None) -> float:
        """Negative KS distance of ``X``'s tail to the fitted law (higher is better)."""
        from .analysis import _ks_discrete

        check_is_fitted(self, "gamma_")
        x = check_degree_sample(X)
        tail = x[x >= self.d_min_]
        if tail.size == 0:
            return -1.0
        return -_ks_discrete(tail, self.d_min_, self.gamma_)


class ScaleFreeRewirer(TransformerMixin, BaseEstimator):
    """Adapt an overlay towards degree exponent ``gamma`` with one protocol cycle.

    ``fit`` only validates the input graph. ``transform`` works on a copy
    and leaves the caller's graph untouched; the per-snapshot trace and the
    cycle summary of the last call are kept as ``trace_`` and ``result_``.
    """

    def __init__(self, gamma=2.5, l=20, delay=None, snapshot_every=200.0, max_time=None, seed=0,
                 fit_method=DEFAULT_FIT["method"], exponent_range=DEFAULT_FIT["exponent_range"]):
        self.gamma = gamma
        self.l = l
        self.delay = delay
        self.snapshot_every = snapshot_every
        self.max_time = max_time
        self.seed = seed
        self.fit_method = fit_method
        self.exponent_range = exponent_range

    def _config(self) -> SimConfig:
        return SimConfig(gamma=self.gamma, l=self.l, delay=self.delay, snapshot_every=self.snapshot_every,
                         seed=self.seed, max_time=self.max_time,
                         fit={"method": self.fit_method, "exponent_range": self.exponent_range})

    def fit(self, G, y=None):
        G = check_graph(G)
        self._config()
        self.n_nodes_ = G.n
        self.n_edges_ = G.m
        return self

    def transform(self, G) -> Graph:
        check_is_fitted(self, "n_nodes_")
        G = check_graph(G, require_connected=False)
        if G.n != self.n_nodes_:
            raise ValueError(f"fitted on {self.n_nodes_} nodes, got {G.n}")
        H = G.copy()
        sim = Simulator(H, self.seed)
        self.result_ = sim.run_cycle(self._config())
        self.trace_ = self.result_.trace
        return H

    def fit_final(self, G) -> FitResult:
        """Power-law fit of ``G``'s degrees with this rewirer's fit settings."""
        return fit_power_law(G.degrees(), method=self.fit_method, exponent_range=self.exponent_range)
