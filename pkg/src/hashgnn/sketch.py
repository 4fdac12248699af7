"""Randomised MinHash message passing over an attributed graph.

Every iteration ``t`` and output dimension ``k`` use three fresh hash functions.
Phase one summarises each node's current set ``x_v`` to one element, its
message, by MinHash under ``pi3``.  Phase two pools the node's own elements,
hashed with ``pi1``, and the messages of its neighbours, hashed with ``pi2``;
the pooled element with the smallest hash value becomes entry ``k`` of the
node's new representation.  Iteration ``t`` reads only the state of ``t - 1``.

Candidates are compared through one packed int64 key::

    key = (2 * hash + source) * (universe_size + 1) + element

with ``source`` 0 for the node's own elements and 1 for neighbour messages, so
a plain integer minimum applies the tie-break order hash value, then own set
over neighbours, then smaller element id.  With ``c <= 2**31 - 1`` and
``universe_size <= c`` the key stays below ``2**63``.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ConfigError, ParseError, ValidationError
from .hashing import MAX_PRIME, HashParams, next_prime, sample_hash_params

__all__ = [
    "EmbeddingMatrix",
    "HashFamilyTable",
    "SetView",
    "build_family_table",
    "embed",
    "memory_footprint",
    "phase1_messages",
    "phase2_update",
    "propagate",
    "read_embedding",
    "resume",
    "state_dtype",
    "write_embedding",
]

SELF, NEIGHBOR = 0, 1
_NO_KEY = np.iinfo(np.int64).max
# rows of the dense state hashed per block; bounds scratch memory per column
_CHUNK_ELEMENTS = 1 << 16


def state_dtype(universe_size: int) -> np.dtype:
    """Narrowest integer type holding every id plus the sentinel."""
    return np.dtype(np.int32) if universe_size <= np.iinfo(np.int32).max else np.dtype(np.int64)


@dataclass(frozen=True)
class HashFamilyTable:
    """Parameters of every ``pi1``, ``pi2``, ``pi3`` used by a run.

    ``a[t, k, j]`` and ``b[t, k, j]`` hold function ``pi_{j+1}`` for iteration
    ``t + 1`` and dimension ``k``; all functions share the prime ``c``.
    """

    a: np.ndarray
    b: np.ndarray
    c: int
    universe_size: int
    seed: int | None = None

    @property
    def iterations(self) -> int:
        return self.a.shape[0]

    @property
    def dimensions(self) -> int:
        return self.a.shape[1]

    def params(self, t: int, k: int) -> tuple[HashParams, HashParams, HashParams]:
        """``(pi1, pi2, pi3)`` for iteration ``t`` (1-based) and dimension ``k`` (0-based)."""
        if not 1 <= t <= self.iterations:
            raise IndexError(f"iteration {t} outside 1..{self.iterations}")
        a, b = self.a[t - 1, k], self.b[t - 1, k]
        return tuple(HashParams(int(a[j]), int(b[j]), self.c) for j in range(3))

    def __eq__(self, other):
        if not isinstance(other, HashFamilyTable):
            return NotImplemented
        return (
            self.c == other.c
            and self.universe_size == other.universe_size
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )

    __hash__ = None


def build_family_table(universe_size: int, T: int, K: int, seed: int | None) -> HashFamilyTable:
    """Draw all ``3 * T * K`` hash functions from one seeded generator.

    Draw order is iteration-major, then dimension, then ``pi1, pi2, pi3``, each
    function drawing ``a`` before ``b``.
    """
    if T < 1 or K < 1:
        raise ConfigError(f"T and K must be >= 1, got T={T}, K={K}")
    if universe_size < 0:
        raise ConfigError("universe_size must be non-negative")
    # the sentinel id equals universe_size and must fit the packed key
    if universe_size > MAX_PRIME:
        raise ConfigError(f"universe of {universe_size} ids exceeds the supported hash domain")
    domain = max(universe_size, 1)
    rng = np.random.default_rng(seed)
    a = np.empty((T, K, 3), dtype=np.int64)
    b = np.empty((T, K, 3), dtype=np.int64)
    for t in range(T):
        for k in range(K):
            for j in range(3):
                p = sample_hash_params(domain, rng)
                a[t, k, j], b[t, k, j] = p.a, p.b
    a.setflags(write=False)
    b.setflags(write=False)
    return HashFamilyTable(a, b, next_prime(domain), universe_size, seed)


def _segment_min(keys, indptr):
    out = np.full(len(indptr) - 1, _NO_KEY, dtype=np.int64)
    nonempty = indptr[1:] > indptr[:-1]
    if keys.size and nonempty.any():
        out[nonempty] = np.minimum.reduceat(keys, indptr[:-1][nonempty])
    return out


class SetView:
    """Read-only view of one element set per node.

    Either ragged CSR arrays (the initial attribute sets) or a dense
    ``(n, K)`` matrix whose rows are read as sets.  Entries equal to the
    sentinel ``universe_size`` stand for "no element" and are skipped.
    """

    def __init__(self, universe_size, *, indptr=None, indices=None, rows=None):
        self.universe_size = int(universe_size)
        self.indptr = indptr
        self.indices = indices
        self.rows = rows
        self._has_sentinel = None

    @classmethod
    def from_graph(cls, g):
        return cls(g.universe_size, indptr=g.attr_indptr, indices=g.attr_indices)

    @classmethod
    def from_sets(cls, sets, universe_size):
        lengths = [len(s) for s in sets]
        indptr = np.zeros(len(sets) + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        indices = np.fromiter((int(e) for s in sets for e in sorted(s)), dtype=np.int64, count=indptr[-1])
        if indices.size and (indices.min() < 0 or indices.max() > universe_size):
            raise ValidationError("set element outside [0, universe_size]")
        return cls(universe_size, indptr=indptr, indices=indices)

    @classmethod
    def from_rows(cls, rows, universe_size):
        rows = np.asarray(rows)
        if rows.ndim != 2:
            raise ValidationError(f"state must be 2-D, got shape {rows.shape}")
        return cls(universe_size, rows=rows)

    def __len__(self):
        return self.rows.shape[0] if self.rows is not None else len(self.indptr) - 1

    def to_sets(self) -> list[set[int]]:
        s = self.universe_size
        if self.rows is not None:
            return [set(r.tolist()) - {s} for r in self.rows]
        return [
            set(self.indices[self.indptr[v]:self.indptr[v + 1]].tolist()) - {s}
            for v in range(len(self))
        ]

    def has_sentinel(self) -> bool:
        if self._has_sentinel is None:
            data = self.rows if self.rows is not None else self.indices
            self._has_sentinel = bool(data.size) and bool((data == self.universe_size).any())
        return self._has_sentinel

    def _key_table(self, params: HashParams, scale: int, offset: int) -> np.ndarray:
        # packed key of every id in [0, universe_size]; the sentinel maps to "empty"
        ids = np.arange(self.universe_size + 1, dtype=np.int64)
        table = params.hash_array(ids) * scale + ids
        table[-1] = _NO_KEY - offset
        return table

    def min_keys(self, params: HashParams, source: int) -> np.ndarray:
        """Packed key of each row's MinHash element; ``_NO_KEY`` for empty rows."""
        base = self.universe_size + 1
        # the source term is constant per call, so it is added after the minimum
        scale = 2 * base
        offset = source * base
        data = self.indices if self.rows is None else self.rows
        # small universes: hash every id once, then gather instead of hashing each entry
        table = self._key_table(params, scale, offset) if base <= data.size else None
        if self.rows is None:
            if table is not None:
                keys = table[self.indices]
            else:
                elems = self.indices.astype(np.int64, copy=False)
                keys = params.hash_array(elems) * scale + elems
                if self.has_sentinel():
                    keys[elems == self.universe_size] = _NO_KEY - offset
            out = _segment_min(keys, self.indptr)
        else:
            n, width = self.rows.shape
            out = np.empty(n, dtype=np.int64)
            if width == 0:
                out.fill(_NO_KEY)
                return out
            masked = self.has_sentinel()
            step = max(1, _CHUNK_ELEMENTS // width)
            buf = np.empty((min(step, n), width), dtype=np.int64)
            for lo in range(0, n, step):
                block = self.rows[lo:lo + step]
                keys = buf[: block.shape[0]]
                if table is not None:
                    np.take(table, block, out=keys)
                else:
                    np.multiply(block, params.a, out=keys, dtype=np.int64)
                    keys += params.b
                    np.remainder(keys, params.c, out=keys)
                    keys *= scale
                    keys += block
                    if masked:
                        keys[block == self.universe_size] = _NO_KEY - offset
                keys.min(axis=1, out=out[lo:lo + step])
        empty = out >= _NO_KEY - offset
        out += offset
        out[empty] = _NO_KEY
        return out


def _unpack(keys, universe_size, dtype):
    out = (keys % (universe_size + 1)).astype(dtype)
    out[keys == _NO_KEY] = universe_size
    return out


def phase1_messages(view: SetView, pi3: HashParams) -> np.ndarray:
    """Each node's MinHash element under ``pi3``; the sentinel for empty sets."""
    return _unpack(view.min_keys(pi3, SELF), view.universe_size, state_dtype(view.universe_size))


def phase2_update(view: SetView, messages, adjacency, pi1: HashParams, pi2: HashParams) -> np.ndarray:
    """New entry per node: the argmin over own elements (``pi1``) and neighbour messages (``pi2``).

    ``adjacency`` is anything exposing CSR ``indptr``/``indices`` (an
    :class:`~hashgnn.graph.AttributedGraph` or a scipy CSR matrix).  Sentinel
    messages carry no element and are ignored.
    """
    universe = view.universe_size
    base = universe + 1
    messages = np.asarray(messages, dtype=np.int64)
    msg_keys = (pi2.hash_array(messages) * 2 + NEIGHBOR) * base + messages
    msg_keys[messages == universe] = _NO_KEY
    neighbor_best = _segment_min(msg_keys[adjacency.indices], np.asarray(adjacency.indptr))
    best = np.minimum(view.min_keys(pi1, SELF), neighbor_best)
    return _unpack(best, universe, state_dtype(universe))


@dataclass
class EmbeddingMatrix:
    """Node representations after ``iteration`` rounds; row ``v`` belongs to node ``v``."""

    rows: np.ndarray
    iteration: int
    universe_size: int
    seed: int | None = None
    history: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def K(self) -> int:
        return self.rows.shape[1]

    @property
    def sentinel(self) -> int:
        return self.universe_size

    def empty_rows(self) -> np.ndarray:
        """Nodes whose representation holds no element at all."""
        return np.flatnonzero((self.rows == self.universe_size).all(axis=1))


def propagate(graph, view: SetView, table: HashFamilyTable, t: int, *, threads: int = 1) -> np.ndarray:
    """One full iteration ``t`` (1-based): returns the new ``(n, K)`` state.

    Columns are independent given ``view``, so they may run on several
    threads; each column finishes phase one before its phase two starts.
    """
    n, K = len(view), table.dimensions
    out = np.empty((n, K), dtype=state_dtype(view.universe_size))

    def column(k):
        pi1, pi2, pi3 = table.params(t, k)
        messages = phase1_messages(view, pi3)
        out[:, k] = phase2_update(view, messages, graph, pi1, pi2)

    if threads > 1 and K > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(column, range(K)))
    else:
        for k in range(K):
            column(k)
    return out


def _check_table(graph, table):
    if graph.universe_size > table.universe_size:
        raise ValidationError(
            f"graph universe {graph.universe_size} exceeds the hash table's {table.universe_size}"
        )


def embed(
    graph,
    T: int,
    K: int,
    seed: int | None = None,
    *,
    table: HashFamilyTable | None = None,
    threads: int = 1,
    keep_history: bool = False,
    on_iteration: Callable[[int, float], None] | None = None,
) -> EmbeddingMatrix:
    """Embed every node of ``graph`` into ``K`` element ids after ``T`` iterations.

    Parameters
    ----------
    graph : AttributedGraph
    T, K : int
        Iteration count and representation width, both >= 1.
    seed : int
        Seed for the hash family; ignored when ``table`` is given.
    table : HashFamilyTable, optional
        Pre-built functions; must cover ``T`` iterations and exactly ``K`` columns.
    threads : int
        Worker threads per iteration.  The output does not depend on it.
    keep_history : bool
        Also keep the state after every iteration in ``result.history``.
    on_iteration : callable, optional
        Called as ``on_iteration(t, seconds)`` after each iteration.
    """
    if T < 1 or K < 1:
        raise ConfigError(f"T and K must be >= 1, got T={T}, K={K}")
    if table is None:
        table = build_family_table(graph.universe_size, T, K, seed)
    elif table.iterations < T or table.dimensions != K:
        raise ConfigError(
            f"hash table covers T={table.iterations}, K={table.dimensions}; need T={T}, K={K}"
        )
    _check_table(graph, table)
    # a sketch of the graph universe inside a wider table keeps its own sentinel
    universe = table.universe_size
    view = SetView(universe, indptr=graph.attr_indptr, indices=graph.attr_indices)
    history = []
    rows = None
    for t in range(1, T + 1):
        start = time.perf_counter()
        rows = propagate(graph, view, table, t, threads=threads)
        view = SetView.from_rows(rows, universe)
        if keep_history:
            history.append(rows)
        if on_iteration is not None:
            on_iteration(t, time.perf_counter() - start)
    return EmbeddingMatrix(rows, T, universe, table.seed, history)


def resume(graph, state: EmbeddingMatrix, table: HashFamilyTable, steps: int = 1, *, threads: int = 1) -> EmbeddingMatrix:
    """Continue ``steps`` iterations from a stored state using ``table``."""
    _check_table(graph, table)
    if state.K != table.dimensions:
        raise ConfigError(f"state has K={state.K}, table has K={table.dimensions}")
    rows = state.rows
    t0 = state.iteration
    for t in range(t0 + 1, t0 + steps + 1):
        rows = propagate(graph, SetView.from_rows(rows, table.universe_size), table, t, threads=threads)
    return EmbeddingMatrix(rows, t0 + steps, table.universe_size, table.seed)


def memory_footprint(graph, T: int, K: int, itemsize: int | None = None) -> int:
    """Planned peak bytes of an ``embed`` run: ``(2 * |V| * K + |V|) * itemsize``.

    Two ``|V| x K`` state buffers (previous and current iteration) plus one
    ``|V|`` message column.  ``T`` does not enter because only the previous
    state is kept.  Scratch for hashing is bounded by a fixed block size and
    left out.
    """
    if itemsize is None:
        itemsize = state_dtype(graph.universe_size).itemsize
    n = graph.node_count
    return (2 * n * K + n) * itemsize


# -- embedding file --------------------------------------------------------------

_HEADER = "#gnn v1 nodes={n} K={K} T={T} seed={seed} universe={universe}"


def write_embedding(path_or_file, emb: EmbeddingMatrix, labels=None) -> None:
    """Write the text format: a ``#gnn v1`` header, then ``<node> <K ids>`` per line."""
    header = _HEADER.format(
        n=emb.rows.shape[0], K=emb.K, T=emb.iteration,
        seed="none" if emb.seed is None else emb.seed, universe=emb.universe_size,
    )
    lines = [header]
    for v, row in enumerate(emb.rows.tolist()):
        node = labels[v] if labels is not None else v
        lines.append(" ".join(map(str, [node, *row])))
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_embedding(path) -> tuple[EmbeddingMatrix, list[str]]:
    """Inverse of :func:`write_embedding`; returns the matrix and node tokens."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#gnn v1"):
        raise ParseError("missing '#gnn v1' header", line=1, source=str(path))
    try:
        meta = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
        n, K, T, universe = (int(meta[k]) for k in ("nodes", "K", "T", "universe"))
        seed = None if meta["seed"] == "none" else int(meta["seed"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad header: {exc}", line=1, source=str(path)) from None
    rows = np.empty((n, K), dtype=state_dtype(universe))
    labels = []
    body = [line for line in lines[1:] if line.strip()]
    if len(body) != n:
        raise ParseError(f"expected {n} rows, found {len(body)}", source=str(path))
    for i, line in enumerate(body):
        toks = line.split()
        if len(toks) != K + 1:
            raise ParseError(f"expected {K} entries", line=i + 2, source=str(path))
        labels.append(toks[0])
        rows[i] = [int(x) for x in toks[1:]]
    return EmbeddingMatrix(rows, T, universe, seed), labels
