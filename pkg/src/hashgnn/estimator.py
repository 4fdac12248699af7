"""Scikit-learn style front end to the sketch engine."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_graph, check_pairs, check_positive_int, check_seed
from .evaluation import pair_scores
from .sketch import build_family_table, embed


class HashGNN(TransformerMixin, BaseEstimator):
    """Training-free node embedding by randomised MinHash message passing.

    Parameters
    ----------
    n_iter : int, default=2
        Message-passing rounds; round ``t`` sees the ``t``-hop neighbourhood.
    n_components : int, default=200
        Width of each node's representation (number of MinHash processes).
    random_state : int or None, default=42
        Seed for the hash functions.  ``None`` draws one and stores it in ``seed_``.
    n_jobs : int, default=1
        Threads per iteration; results do not depend on it.

    Attributes
    ----------
    embedding_ : ndarray of shape (n_nodes, n_components)
        Representation of the graph passed to ``fit``.
    family_table_ : HashFamilyTable
        The hash functions, reused by ``transform`` on other graphs.
    seed_ : int
    universe_size_ : int

    Examples
    --------
    >>> from hashgnn import HashGNN, AttributedGraph
    >>> g = AttributedGraph.from_edges(3, [(0, 1), (1, 2)], [{0}, {0, 1}, {2}])
    >>> HashGNN(n_iter=1, n_components=4, random_state=0).fit_transform(g).shape
    (3, 4)
    """

    def __init__(self, n_iter=2, n_components=200, random_state=42, n_jobs=1):
        self.n_iter = n_iter
        self.n_components = n_components
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _embed(self, graph, table):
        return embed(
            graph, self.n_iter, self.n_components, table=table,
            threads=check_positive_int(self.n_jobs, "n_jobs"),
        ).rows

    def fit(self, X, y=None):
        graph = check_graph(X)
        T = check_positive_int(self.n_iter, "n_iter")
        K = check_positive_int(self.n_components, "n_components")
        self.seed_ = check_seed(self.random_state)
        self.universe_size_ = graph.universe_size
        self.family_table_ = build_family_table(graph.universe_size, T, K, self.seed_)
        self.embedding_ = self._embed(graph, self.family_table_)
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_

    def transform(self, X):
        """Embed another graph over the same attribute universe with the fitted functions."""
        check_is_fitted(self, "family_table_")
        return self._embed(check_graph(X), self.family_table_)

    def score_pairs(self, pairs):
        """Hamming similarity of the fitted embeddings for each ``(u, v)`` row."""
        check_is_fitted(self, "embedding_")
        return pair_scores(self.embedding_, check_pairs(pairs, self.embedding_.shape[0]))

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.two_d_array = False
        tags.requires_fit = True
        return tags
