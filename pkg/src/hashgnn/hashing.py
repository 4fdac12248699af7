"""Universal modular hashing and MinHash signatures over integer element ids.

A hash function is ``pi(i) = (a * i + b) mod c`` with ``c`` a prime no smaller
than the universe and ``0 < a, b < c``.  The element of a set with the smallest
hash value is its MinHash; ties on the hash value go to the smaller element id,
which keeps ``minhash_argmin`` a total function of the set contents.

The empty set has no MinHash.  Signatures represent it with a sentinel id equal
to the universe size, one past the largest valid element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exceptions import ConfigError, EmptySetError, HashDomainError, ValidationError

# Keeps (a*i + b) and the packed sort keys used by the sketch engine in int64.
MAX_PRIME = 2**31 - 1

__all__ = [
    "HashParams",
    "MAX_PRIME",
    "estimate_similarity",
    "exact_jaccard",
    "hash_value",
    "is_prime",
    "minhash_argmin",
    "minhash_signature",
    "next_prime",
    "sample_hash_params",
]


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    for f in range(5, math.isqrt(n) + 1, 6):
        if n % f == 0 or n % (f + 2) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def next_prime(n: int) -> int:
    """Smallest prime >= n (trial division)."""
    p = max(int(n), 2)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class HashParams:
    """Parameters of one hash function ``(a * i + b) mod c``."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if not (0 < self.a < self.c and 0 < self.b < self.c):
            raise ValidationError(f"need 0 < a, b < c, got a={self.a} b={self.b} c={self.c}")
        if self.c > MAX_PRIME or not is_prime(self.c):
            raise ValidationError(f"modulus c={self.c} must be a prime <= {MAX_PRIME}")

    def __call__(self, element: int) -> int:
        return hash_value(element, self)

    def hash_array(self, elements: np.ndarray) -> np.ndarray:
        """Vectorised hash of an id array; the caller guarantees the domain."""
        return (np.asarray(elements, dtype=np.int64) * self.a + self.b) % self.c


def hash_value(element: int, params: HashParams) -> int:
    element = int(element)
    if element < 0 or element >= params.c:
        raise HashDomainError(f"element {element} outside hash domain [0, {params.c})")
    # Python ints never overflow; the same expression in int64 stays below 2**62.
    return (params.a * element + params.b) % params.c


def minhash_argmin(elements: Iterable[int], params: HashParams) -> int:
    """Element of ``elements`` with the smallest hash value (ties -> smaller id)."""
    best = None
    for e in elements:
        key = (hash_value(e, params), int(e))
        if best is None or key < best:
            best = key
    if best is None:
        raise EmptySetError("MinHash of an empty set is undefined")
    return best[1]


def minhash_signature(
    elements: Iterable[int],
    family: Sequence[HashParams],
    *,
    universe_size: int | None = None,
) -> np.ndarray:
    """K-vector of MinHash elements, one per hash function in ``family``.

    An empty set yields ``K`` copies of the sentinel ``universe_size``.  Without
    a universe size the family's modulus is used, which is likewise outside
    every valid element id.
    """
    if len(family) < 1:
        raise ConfigError("hash family must contain at least one function")
    items = np.unique(np.fromiter((int(e) for e in elements), dtype=np.int64))
    if items.size == 0:
        fill = family[0].c if universe_size is None else universe_size
        return np.full(len(family), fill, dtype=np.int64)
    if items[0] < 0:
        raise HashDomainError(f"negative element id {items[0]}")
    a = np.array([p.a for p in family], dtype=np.int64)
    b = np.array([p.b for p in family], dtype=np.int64)
    c = np.array([p.c for p in family], dtype=np.int64)
    if items[-1] >= c.min():
        raise HashDomainError(f"element {items[-1]} outside hash domain [0, {c.min()})")
    h = (a[:, None] * items[None, :] + b[:, None]) % c[:, None]
    # items is sorted, so argmin's first-occurrence rule is the id tie-break
    return items[np.argmin(h, axis=1)]


def estimate_similarity(sig1, sig2) -> float:
    """Fraction of signature positions holding the same element."""
    s1 = np.asarray(sig1)
    s2 = np.asarray(sig2)
    if s1.shape != s2.shape or s1.ndim != 1:
        raise ValueError(f"signature shapes differ: {s1.shape} vs {s2.shape}")
    if s1.size == 0:
        raise ValueError("empty signatures")
    return float(np.count_nonzero(s1 == s2)) / s1.size


def exact_jaccard(s: Iterable[int], t: Iterable[int]) -> float:
    s, t = set(s), set(t)
    union = s | t
    if not union:
        return 1.0
    return len(s & t) / len(union)


def sample_hash_params(universe_size: int, rng: np.random.Generator) -> HashParams:
    """Draw ``a`` then ``b`` uniformly from [1, c) with ``c = next_prime(universe_size)``."""
    if universe_size < 1:
        raise ConfigError(f"universe_size must be >= 1, got {universe_size}")
    c = next_prime(universe_size)
    if c > MAX_PRIME:
        raise ConfigError(f"universe of {universe_size} ids exceeds the supported hash domain")
    a = int(rng.integers(1, c))
    b = int(rng.integers(1, c))
    return HashParams(a, b, c)
