"""Argument checks shared by the estimator, the harness and the CLI."""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp

from .exceptions import ConfigError
from .graph import AttributedGraph


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
    return int(value)


def check_ratio(value, name="train_ratio"):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if not 0 < value < 1:
        raise ConfigError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value


def check_seed(random_state):
    """Integer seed for ``random_state``; ``None`` draws a fresh one so it can be echoed."""
    if random_state is None:
        return int(np.random.SeedSequence().generate_state(1)[0])
    if isinstance(random_state, bool) or not isinstance(random_state, numbers.Integral):
        raise ConfigError(f"random_state must be an int or None, got {random_state!r}")
    if random_state < 0:
        raise ConfigError(f"random_state must be non-negative, got {random_state}")
    return int(random_state)


def check_graph(X) -> AttributedGraph:
    """Coerce estimator input to an :class:`AttributedGraph`.

    Accepts a graph, or a pair ``(adjacency, attributes)`` of square sparse or
    dense adjacency and node-by-attribute 0/1 matrices.
    """
    if isinstance(X, AttributedGraph):
        return X
    if isinstance(X, tuple) and len(X) == 2:
        adjacency, attributes = X
        if not sp.issparse(adjacency):
            adjacency = np.asarray(adjacency)
        if not sp.issparse(attributes):
            attributes = np.asarray(attributes)
        return AttributedGraph.from_scipy(adjacency, attributes)
    raise ConfigError(
        f"expected an AttributedGraph or an (adjacency, attributes) pair, got {type(X).__name__}"
    )


def check_pairs(pairs, node_count):
    pairs = np.asarray(pairs, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ConfigError(f"pairs must have shape (m, 2), got {pairs.shape}")
    if pairs.size and (pairs.min() < 0 or pairs.max() >= node_count):
        raise ConfigError(f"pair endpoint outside [0, {node_count})")
    return pairs
