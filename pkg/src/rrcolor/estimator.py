"""scikit-learn style front end for the sampler.

``fit`` takes a graph (a :class:`~rrcolor.graph.Graph`, a networkx graph,
or a square adjacency matrix, dense or sparse) and ``sample`` draws exact
uniform proper colorings as a ``(n_samples, n_nodes)`` array of 1-based
colors::

    sampler = ProperColoringSampler(n_colors=13, random_state=0).fit(G)
    X = sampler.sample(100)
"""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .core import rr_sample
from .graph import Graph
from .potential import GuaranteeUndefined, epsilon_bound, guarantee_applies
from .randomness import SEED_MASK, BitSource


def check_graph(G) -> Graph:
    """Coerce supported graph inputs to a validated :class:`Graph`."""
    if isinstance(G, Graph):
        G.check()
        return G
    if hasattr(G, "nodes") and hasattr(G, "edges") and not sp.issparse(G):
        if G.is_directed():
            raise ValueError("directed graphs are not supported")
        nodes = list(G.nodes)
        pos = {v: i for i, v in enumerate(nodes)}
        edges = [(pos[u], pos[v]) for u, v in G.edges if u != v]
        if len(edges) != G.number_of_edges():
            raise ValueError("self-loops are not supported")
        return Graph.from_edges(len(nodes), edges)
    A = check_array(G, accept_sparse="coo", dtype=None, ensure_min_samples=1)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {A.shape}")
    A = sp.coo_matrix(A)
    mask = A.data != 0
    rows, cols = A.row[mask], A.col[mask]
    if np.any(rows == cols):
        raise ValueError("adjacency matrix has nonzero diagonal (self-loops)")
    pairs = set(zip(rows.tolist(), cols.tolist()))
    if any((v, u) not in pairs for u, v in pairs):
        raise ValueError("adjacency matrix must be symmetric")
    return Graph.from_edges(A.shape[0], pairs)


def check_n_colors(n_colors) -> int:
    if not isinstance(n_colors, numbers.Integral) or isinstance(n_colors, bool) or n_colors < 1:
        raise ValueError(f"n_colors must be a positive integer, got {n_colors!r}")
    return int(n_colors)


def _base_seed(random_state) -> int:
    if isinstance(random_state, numbers.Integral):
        if not 0 <= random_state <= SEED_MASK:
            raise ValueError("integer random_state must fit in 64 unsigned bits")
        return int(random_state)
    rs = check_random_state(random_state)
    return int(rs.randint(0, 2**62, dtype=np.int64))


class ProperColoringSampler(BaseEstimator):
    """Exact uniform sampler of proper colorings via randomness recycling.

    Parameters
    ----------
    n_colors : int
        Number of colors k.
    step_cap : int or None
        Per-sample step budget; None means ``10**6 * n_nodes``.
    random_state : int, RandomState or None
        Sample ``i`` of every ``sample`` call uses BitSource seed
        ``base + i``; with an int, ``base`` is that int.
    check_invariants : bool
        Validate the index and membership after every step (slow).

    Attributes
    ----------
    graph_ : Graph
    n_nodes_ : int
    max_degree_ : int
    epsilon_ : Fraction or None
        Drift constant; None when the formula is undefined.
    guarantee_ : bool
        Whether the linear expected running time bound applies.
    metrics_ : list of RunMetrics
        Metrics for the samples of the most recent ``sample`` call.
    """

    def __init__(self, n_colors=3, step_cap=None, random_state=None, check_invariants=False):
        self.n_colors = n_colors
        self.step_cap = step_cap
        self.random_state = random_state
        self.check_invariants = check_invariants

    def fit(self, X, y=None):
        k = check_n_colors(self.n_colors)
        self.graph_ = check_graph(X)
        self.n_nodes_ = self.graph_.node_count
        self.max_degree_ = self.graph_.max_degree
        try:
            self.epsilon_ = epsilon_bound(k, self.max_degree_)
        except GuaranteeUndefined:
            self.epsilon_ = None
        self.guarantee_ = guarantee_applies(k, self.max_degree_)
        self.metrics_ = []
        return self

    def sample(self, n_samples=1):
        check_is_fitted(self, "graph_")
        if n_samples < 0:
            raise ValueError("n_samples must be nonnegative")
        base = _base_seed(self.random_state)
        out = np.empty((n_samples, self.n_nodes_), dtype=np.int64)
        self.metrics_ = []
        for i in range(n_samples):
            x, m = rr_sample(
                self.graph_,
                self.n_colors,
                BitSource((base + i) & SEED_MASK),
                step_cap=self.step_cap,
                check_invariants=self.check_invariants,
            )
            out[i] = x
            self.metrics_.append(m)
        return out
