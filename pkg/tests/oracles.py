"""Independent reference computations used as test oracles.

Nothing here imports the package's hashing or sketch code: the reference
sketch shares only the raw (a, b, c) arrays of a hash family table.
"""

import itertools


def reference_sketch(neighbors, attributes, universe_size, a, b, c, T, K):
    """Straight-line loop version of the message-passing sketch.

    ``neighbors[v]`` lists v's neighbours, ``attributes[v]`` is v's attribute
    set, ``a[t][k][j]``/``b[t][k][j]`` give pi_{j+1} for iteration t+1.
    Returns the list of per-iteration states (each a list of K-lists).
    """
    n = len(attributes)
    sentinel = universe_size
    sets = [set(x) for x in attributes]
    states = []
    for t in range(T):
        rows = [[None] * K for _ in range(n)]
        for k in range(K):
            a1, a2, a3 = (int(x) for x in a[t][k])
            b1, b2, b3 = (int(x) for x in b[t][k])
            message = []
            for v in range(n):
                best = None
                for e in sets[v]:
                    cand = ((a3 * e + b3) % c, e)
                    if best is None or cand < best:
                        best = cand
                message.append(sentinel if best is None else best[1])
            for v in range(n):
                pool = [((a1 * e + b1) % c, 0, e) for e in sets[v]]
                received = {message[u] for u in neighbors[v]}
                pool += [((a2 * m + b2) % c, 1, m) for m in received if m != sentinel]
                rows[v][k] = min(pool)[2] if pool else sentinel
        states.append(rows)
        sets = [set(r) - {sentinel} for r in rows]
    return states


def brute_force_auc(pos, neg):
    """Pairwise count: (#{p > n} + #{p == n} / 2) / (|pos| |neg|)."""
    twice = 0
    for p, q in itertools.product(pos, neg):
        if p > q:
            twice += 2
        elif p == q:
            twice += 1
    return twice / (2 * len(pos) * len(neg))


def brute_argmin(elements, a, b, c):
    """Element with the smallest (a*e + b) % c, ties to the smaller element."""
    return min(sorted(elements), key=lambda e: ((a * e + b) % c, e))
