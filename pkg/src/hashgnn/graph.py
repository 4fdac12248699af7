"""Attributed networks: storage, text IO, link splits and synthetic generation.

Nodes are dense integers ``0..n-1``.  Adjacency is kept in CSR form (``indptr``,
``indices``) with both directions of every undirected edge stored and each
neighbour list sorted; node attributes are a second CSR over element ids in
``[0, universe_size)``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import ConfigError, ParseError, SplitError, ValidationError

__all__ = [
    "AttributedGraph",
    "LinkSplit",
    "generate_synthetic",
    "load_graph",
    "read_mapping",
    "save_graph",
    "shuffle_attributes",
    "split_edges",
    "write_mapping",
]


def _csr_from_pairs(n, rows, cols):
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols.astype(np.int64, copy=False)


def _canonical_edges(n, edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if edges.min() < 0 or edges.max() >= n:
        raise ValidationError(f"edge endpoint outside [0, {n})")
    loops = edges[:, 0] == edges[:, 1]
    if loops.any():
        v = int(edges[loops][0, 0])
        raise ValidationError(f"self-loop on node {v}")
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    keys = np.unique(lo * n + hi)
    return np.column_stack((keys // n, keys % n))


class AttributedGraph:
    """Undirected simple graph whose nodes carry sets of attribute ids.

    Build with :meth:`from_edges`; the constructor trusts its CSR arrays.

    Attributes
    ----------
    indptr, indices : ndarray
        Symmetric adjacency in CSR form, neighbour lists sorted.
    attr_indptr, attr_indices : ndarray
        Per-node attribute sets in CSR form, each row sorted and unique.
    universe_size : int
        Size of the attribute universe; every attribute id is below it.
    labels : list of str or None
        Original node tokens when the graph came from a file.
    """

    def __init__(self, indptr, indices, attr_indptr, attr_indices, universe_size, labels=None):
        self.indptr = indptr
        self.indices = indices
        self.attr_indptr = attr_indptr
        self.attr_indices = attr_indices
        self.universe_size = int(universe_size)
        self.labels = labels

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges,
        attributes: Sequence[Iterable[int]] | None = None,
        universe_size: int | None = None,
        labels: Sequence[str] | None = None,
    ) -> "AttributedGraph":
        """Build a graph from an edge list and per-node attribute iterables.

        Duplicate edges (in either orientation) collapse to one; self-loops are
        rejected.  ``universe_size`` defaults to one past the largest attribute id.
        """
        n = int(node_count)
        if n < 0:
            raise ValidationError("node_count must be non-negative")
        canon = _canonical_edges(n, edges)
        rows = np.concatenate((canon[:, 0], canon[:, 1]))
        cols = np.concatenate((canon[:, 1], canon[:, 0]))
        indptr, indices = _csr_from_pairs(n, rows, cols)

        if attributes is None:
            attributes = [()] * n
        if len(attributes) != n:
            raise ValidationError(f"{len(attributes)} attribute sets for {n} nodes")
        a_rows, a_cols = [], []
        for v, attrs in enumerate(attributes):
            ids = np.unique(np.fromiter((int(x) for x in attrs), dtype=np.int64))
            a_rows.append(np.full(ids.size, v, dtype=np.int64))
            a_cols.append(ids)
        a_rows = np.concatenate(a_rows) if n else np.empty(0, dtype=np.int64)
        a_cols = np.concatenate(a_cols) if n else np.empty(0, dtype=np.int64)
        if a_cols.size and a_cols.min() < 0:
            raise ValidationError("attribute ids must be non-negative")
        top = int(a_cols.max()) + 1 if a_cols.size else 0
        if universe_size is None:
            universe_size = top
        elif top > universe_size:
            raise ValidationError(f"attribute id {top - 1} >= universe size {universe_size}")
        attr_indptr, attr_indices = _csr_from_pairs(n, a_rows, a_cols)
        if labels is not None:
            labels = [str(x) for x in labels]
            if len(labels) != n:
                raise ValidationError(f"{len(labels)} labels for {n} nodes")
        return cls(indptr, indices, attr_indptr, attr_indices, universe_size, labels)

    @classmethod
    def from_scipy(cls, adjacency, attributes, universe_size=None):
        """Graph from a sparse adjacency matrix and a node-by-attribute 0/1 matrix."""
        adj = sp.coo_matrix(adjacency)
        mask = adj.row != adj.col
        if not mask.all():
            raise ValidationError("adjacency matrix has non-zero diagonal")
        n = adj.shape[0]
        if adj.shape != (n, n):
            raise ValidationError(f"adjacency must be square, got {adj.shape}")
        att = sp.csr_matrix(attributes)
        if att.shape[0] != n:
            raise ValidationError(f"attribute matrix has {att.shape[0]} rows for {n} nodes")
        att.eliminate_zeros()
        att.sort_indices()
        sets = [att.indices[att.indptr[v]:att.indptr[v + 1]] for v in range(n)]
        if universe_size is None:
            universe_size = att.shape[1]
        edges = np.column_stack((adj.row, adj.col))
        return cls.from_edges(n, edges, sets, universe_size)

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def average_degree(self) -> float:
        n = self.node_count
        return 2 * self.edge_count / n if n else 0.0

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def attribute_set(self, v: int) -> np.ndarray:
        return self.attr_indices[self.attr_indptr[v]:self.attr_indptr[v + 1]]

    def attribute_sets(self) -> list[set[int]]:
        return [set(self.attribute_set(v).tolist()) for v in range(self.node_count)]

    def edges(self) -> np.ndarray:
        """``(|E|, 2)`` array of edges with ``u < v``, lexicographically sorted."""
        rows = np.repeat(np.arange(self.node_count), self.degrees)
        keep = rows < self.indices
        return np.column_stack((rows[keep], self.indices[keep]))

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.size and nbrs[i] == v)

    def with_edges(self, edges) -> "AttributedGraph":
        """Same nodes, attributes and labels over a different edge set."""
        n = self.node_count
        canon = _canonical_edges(n, edges)
        rows = np.concatenate((canon[:, 0], canon[:, 1]))
        cols = np.concatenate((canon[:, 1], canon[:, 0]))
        indptr, indices = _csr_from_pairs(n, rows, cols)
        return AttributedGraph(
            indptr, indices, self.attr_indptr, self.attr_indices, self.universe_size, self.labels
        )

    def with_attribute_order(self, order) -> "AttributedGraph":
        """Node ``v`` receives the attribute set of node ``order[v]``."""
        order = np.asarray(order)
        lengths = np.diff(self.attr_indptr)[order]
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        pieces = [self.attribute_set(u) for u in order]
        indices = np.concatenate(pieces) if pieces else np.empty(0, dtype=np.int64)
        return AttributedGraph(
            self.indptr, self.indices, indptr, indices, self.universe_size, self.labels
        )

    def adjacency_matrix(self) -> sp.csr_matrix:
        n = self.node_count
        data = np.ones(self.indices.size, dtype=np.int8)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def attribute_matrix(self) -> sp.csr_matrix:
        data = np.ones(self.attr_indices.size, dtype=np.int8)
        return sp.csr_matrix(
            (data, self.attr_indices, self.attr_indptr),
            shape=(self.node_count, self.universe_size),
        )

    def check_invariants(self) -> None:
        """Exhaustive structural check; raises ValidationError on the first breach."""
        n = self.node_count
        rows = np.repeat(np.arange(n), self.degrees)
        if np.any(rows == self.indices):
            raise ValidationError("self-loop present")
        fwd = rows * n + self.indices
        if np.any(np.diff(fwd) <= 0):
            raise ValidationError("neighbour lists not strictly sorted")
        back = np.sort(self.indices * n + rows)
        if not np.array_equal(fwd, back):
            raise ValidationError("adjacency is not symmetric")
        if self.attr_indices.size and (
            self.attr_indices.min() < 0 or self.attr_indices.max() >= self.universe_size
        ):
            raise ValidationError("attribute id outside universe")

    def __eq__(self, other):
        if not isinstance(other, AttributedGraph):
            return NotImplemented
        return (
            self.universe_size == other.universe_size
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.attr_indptr, other.attr_indptr)
            and np.array_equal(self.attr_indices, other.attr_indices)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"AttributedGraph(nodes={self.node_count}, edges={self.edge_count}, "
            f"universe={self.universe_size})"
        )


# -- text IO -------------------------------------------------------------------


def _open_lines(source, name):
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, encoding="utf-8") as fh:
                return fh.read().splitlines(), os.fspath(source)
        except OSError as exc:
            raise ParseError(f"cannot read {name} file: {exc.strerror}", source=os.fspath(source)) from exc
    if hasattr(source, "read"):
        return source.read().splitlines(), name
    return [line.rstrip("\n") for line in source], name


def _parse_int(token, lineno, src, what):
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"{what} {token!r} is not an integer", line=lineno, source=src) from None
    if value < 0:
        raise ParseError(f"{what} {token!r} is negative", line=lineno, source=src)
    return value


def _is_int_token(tok):
    return tok.isdigit() or (tok[:1] == "+" and tok[1:].isdigit())


def load_graph(edge_source, attr_source=None, *, universe_size: int | None = None) -> AttributedGraph:
    """Read an edge file and an optional attribute file.

    ``edge_source`` and ``attr_source`` are paths, open text handles or
    iterables of lines.  Node tokens are arbitrary strings; when every token is
    a non-negative integer they are numbered in numeric order, otherwise in
    order of first appearance (attribute file first).  The original tokens are
    kept in ``graph.labels``.
    """
    edge_lines, edge_src = _open_lines(edge_source, "edges")
    raw_edges = []
    for lineno, line in enumerate(edge_lines, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        toks = s.split()
        if len(toks) != 2:
            raise ParseError(f"expected 2 node tokens, got {len(toks)}", line=lineno, source=edge_src)
        if toks[0] == toks[1]:
            raise ValidationError(f"{edge_src}:{lineno}: self-loop on node {toks[0]!r}")
        raw_edges.append((toks[0], toks[1]))

    raw_attrs = {}
    attr_order = []
    declared = universe_size
    if attr_source is not None:
        attr_lines, attr_src = _open_lines(attr_source, "attributes")
        seen_content = False
        for lineno, line in enumerate(attr_lines, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                toks = s[1:].split()
                if toks and toks[0] == "universe":
                    if seen_content or len(toks) != 2:
                        raise ParseError("misplaced or malformed #universe header", line=lineno, source=attr_src)
                    if declared is None:
                        declared = _parse_int(toks[1], lineno, attr_src, "universe size")
                continue
            seen_content = True
            toks = s.split()
            node = toks[0]
            ids = [_parse_int(t, lineno, attr_src, "attribute id") for t in toks[1:]]
            if declared is not None and ids and max(ids) >= declared:
                raise ValidationError(
                    f"{attr_src}:{lineno}: attribute id {max(ids)} >= universe size {declared}"
                )
            if node not in raw_attrs:
                raw_attrs[node] = set()
                attr_order.append(node)
            raw_attrs[node].update(ids)

    tokens = list(attr_order)
    known = set(tokens)
    for u, v in raw_edges:
        for t in (u, v):
            if t not in known:
                known.add(t)
                tokens.append(t)
    if tokens and all(_is_int_token(t) for t in tokens):
        tokens.sort(key=int)
    index = {t: i for i, t in enumerate(tokens)}
    n = len(tokens)
    edges = np.array([(index[u], index[v]) for u, v in raw_edges], dtype=np.int64).reshape(-1, 2)
    attributes = [raw_attrs.get(t, ()) for t in tokens]
    return AttributedGraph.from_edges(n, edges, attributes, declared, labels=tokens)


def save_graph(g: AttributedGraph, edge_path, attr_path, mapping_path=None) -> None:
    """Write ``g`` in the text formats read by :func:`load_graph` using dense ids."""
    with open(edge_path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")
    with open(attr_path, "w", encoding="utf-8") as fh:
        fh.write(f"#universe {g.universe_size}\n")
        for v in range(g.node_count):
            ids = g.attribute_set(v)
            fh.write(" ".join([str(v), *map(str, ids.tolist())]) + "\n")
    if mapping_path is not None:
        write_mapping(g, mapping_path)


def write_mapping(g: AttributedGraph, path) -> None:
    labels = g.labels if g.labels is not None else [str(v) for v in range(g.node_count)]
    with open(path, "w", encoding="utf-8") as fh:
        for v, tok in enumerate(labels):
            fh.write(f"{tok} {v}\n")


def read_mapping(path) -> dict[str, int]:
    lines, src = _open_lines(path, "mapping")
    out = {}
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s:
            continue
        toks = s.split()
        if len(toks) != 2:
            raise ParseError("expected '<token> <id>'", line=lineno, source=src)
        out[toks[0]] = _parse_int(toks[1], lineno, src, "dense id")
    return out


# -- link splits ---------------------------------------------------------------


@dataclass(frozen=True)
class LinkSplit:
    """Training graph plus held-out positive edges and sampled non-edges."""

    train_graph: AttributedGraph
    test_positives: np.ndarray
    test_negatives: np.ndarray
    train_ratio: float


def _sample_non_edges(g, count, rng):
    n = g.node_count
    missing = n * (n - 1) // 2 - g.edge_count
    if missing <= 0:
        raise SplitError("graph has no non-edges to sample negatives from")
    edges = g.edges()
    edge_keys = edges[:, 0] * n + edges[:, 1]  # sorted, since edges() is lexicographic
    out = []
    have = 0
    while have < count:
        batch = max(2 * (count - have), 64)
        cand = rng.integers(0, n, size=(batch, 2))
        cand = cand[cand[:, 0] != cand[:, 1]]
        lo = np.minimum(cand[:, 0], cand[:, 1])
        hi = np.maximum(cand[:, 0], cand[:, 1])
        keys = lo * n + hi
        pos = np.searchsorted(edge_keys, keys)
        hit = (pos < edge_keys.size) & (edge_keys[np.minimum(pos, edge_keys.size - 1)] == keys)
        ok = np.column_stack((lo, hi))[~hit][: count - have]
        out.append(ok)
        have += len(ok)
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


def split_edges(g: AttributedGraph, train_ratio: float, rng=None) -> LinkSplit:
    """Hold out a random ``1 - train_ratio`` share of edges for testing.

    The training graph keeps ``ceil(train_ratio * |E|)`` edges (at most
    ``|E| - 1`` so at least one test edge exists) and every node.  Negatives are
    drawn uniformly, with replacement, from non-edges of the original graph;
    there are as many as test positives.
    """
    if not 0 < train_ratio < 1:
        raise ConfigError(f"train_ratio must lie in (0, 1), got {train_ratio}")
    m = g.edge_count
    if m < 2:
        raise SplitError(f"need at least 2 edges to split, got {m}")
    rng = np.random.default_rng(rng)
    # round() absorbs float noise such as 0.7 * 10 == 7.000000000000001
    n_train = min(math.ceil(round(train_ratio * m, 9)), m - 1)
    edges = g.edges()
    perm = rng.permutation(m)
    train = edges[np.sort(perm[:n_train])]
    test = edges[np.sort(perm[n_train:])]
    negatives = _sample_non_edges(g, len(test), rng)
    return LinkSplit(g.with_edges(train), test, negatives, float(train_ratio))


# -- synthetic graphs ----------------------------------------------------------

INTRA_EDGE_SHARE = 0.9


def _sample_unique_pairs(rng, count, draw, n):
    """Draw ``count`` distinct canonical pairs using the candidate generator ``draw``."""
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)
    keys = np.empty(0, dtype=np.int64)
    while keys.size < count:
        u, v = draw(max(2 * (count - keys.size), 64))
        ok = u != v
        u, v = u[ok], v[ok]
        cand = np.minimum(u, v) * n + np.maximum(u, v)
        merged = np.concatenate((keys, cand))
        _, first = np.unique(merged, return_index=True)
        keys = merged[np.sort(first)][:count]
    return np.column_stack((keys // n, keys % n))


def generate_synthetic(
    node_count: int,
    avg_degree: float,
    communities: int = 2,
    attrs_per_node: int = 10,
    universe_size: int = 200,
    attr_affinity: float = 0.9,
    rng=None,
) -> AttributedGraph:
    """Planted-partition graph with community-correlated attributes.

    Nodes fall into ``communities`` contiguous, near-equal blocks.  Edge
    probabilities are set so the expected average degree is ``avg_degree``
    with 90% of edges inside communities (all of them when there is a single
    community).  Community ``c`` owns the attribute ids
    ``[c * B, (c + 1) * B)`` with ``B = universe_size // communities``; each node
    draws ``round(attr_affinity * attrs_per_node)`` ids from its own block and
    the rest uniformly from the universe, with replacement, so duplicates
    collapse.
    """
    n = int(node_count)
    if not n >= communities >= 1:
        raise ConfigError(f"need node_count >= communities >= 1, got {n}, {communities}")
    if not 0 <= avg_degree < n:
        raise ConfigError(f"avg_degree must lie in [0, node_count), got {avg_degree}")
    if not 0 <= attr_affinity <= 1:
        raise ConfigError(f"attr_affinity must lie in [0, 1], got {attr_affinity}")
    if attrs_per_node < 0:
        raise ConfigError("attrs_per_node must be non-negative")
    block = universe_size // communities
    if attrs_per_node and block < 1:
        raise ConfigError(f"universe_size {universe_size} too small for {communities} attribute blocks")
    rng = np.random.default_rng(rng)

    sizes = np.array([len(a) for a in np.array_split(np.arange(n), communities)], dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    community = np.repeat(np.arange(communities), sizes)

    target = n * avg_degree / 2
    intra_pairs = sizes * (sizes - 1) // 2
    total_intra = int(intra_pairs.sum())
    total_inter = n * (n - 1) // 2 - total_intra
    share = 1.0 if communities == 1 else INTRA_EDGE_SHARE
    p_in = share * target / total_intra if total_intra else math.inf
    p_out = (1 - share) * target / total_inter if total_inter else 0.0
    if target > 0 and (p_in > 1 or p_out > 1):
        raise ConfigError(
            f"average degree {avg_degree} is infeasible for {n} nodes in {communities} communities"
        )

    parts = []
    for c in range(communities):
        s, lo = int(sizes[c]), int(starts[c])
        count = int(rng.binomial(int(intra_pairs[c]), p_in)) if intra_pairs[c] else 0
        parts.append(
            _sample_unique_pairs(
                rng, count, lambda k, s=s, lo=lo: (lo + rng.integers(0, s, k), lo + rng.integers(0, s, k)), n
            )
        )
    if total_inter and p_out > 0:
        count = int(rng.binomial(total_inter, p_out))

        def draw_inter(k):
            u = rng.integers(0, n, k)
            v = rng.integers(0, n, k)
            keep = community[u] != community[v]
            return u[keep], v[keep]

        parts.append(_sample_unique_pairs(rng, count, draw_inter, n))
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)

    n_own = int(round(attr_affinity * attrs_per_node))
    n_rest = attrs_per_node - n_own
    own = community[:, None] * block + rng.integers(0, max(block, 1), size=(n, n_own))
    rest = rng.integers(0, universe_size, size=(n, n_rest))
    draws = np.sort(np.concatenate((own, rest), axis=1), axis=1)
    fresh = np.ones_like(draws, dtype=bool)
    fresh[:, 1:] = draws[:, 1:] != draws[:, :-1]
    rows = np.repeat(np.arange(n), fresh.sum(axis=1))
    attr_indptr, attr_indices = _csr_from_pairs(n, rows, draws[fresh])

    base = AttributedGraph(
        np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64),
        attr_indptr, attr_indices, universe_size,
    )
    return base.with_edges(edges)


def shuffle_attributes(g: AttributedGraph, rng=None) -> AttributedGraph:
    """Randomly reassign whole attribute sets among nodes, keeping the edges."""
    rng = np.random.default_rng(rng)
    return g.with_attribute_order(rng.permutation(g.node_count))
