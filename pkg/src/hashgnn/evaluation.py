"""Link-prediction harness: pair scoring, AUC and the repeated-split protocol."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from ._validation import check_positive_int, check_ratio
from .exceptions import ConfigError
from .graph import split_edges
from .sketch import embed

__all__ = [
    "EvalReport",
    "auc",
    "hamming_score",
    "pair_scores",
    "run_link_prediction",
]


def hamming_score(row1, row2) -> float:
    """Fraction of dimensions on which two representations agree."""
    r1 = np.asarray(row1)
    r2 = np.asarray(row2)
    if r1.shape != r2.shape or r1.ndim != 1 or r1.size == 0:
        raise ValueError(f"rows must be non-empty and equally long, got {r1.shape} and {r2.shape}")
    return float(np.count_nonzero(r1 == r2)) / r1.size


def pair_scores(rows, pairs) -> np.ndarray:
    """Vectorised :func:`hamming_score` for every ``(u, v)`` row of ``pairs``."""
    rows = np.asarray(rows)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if rows.shape[1] == 0:
        raise ValueError("representations have zero width")
    return np.count_nonzero(rows[pairs[:, 0]] == rows[pairs[:, 1]], axis=1) / rows.shape[1]


def auc(pos_scores, neg_scores) -> float:
    """Probability a positive outranks a negative, ties counting one half.

    Computed from average ranks of the pooled scores (Mann-Whitney U), so the
    cost is that of one sort.
    """
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos.size == 0 or neg.size == 0:
        raise ValueError("auc needs at least one positive and one negative score")
    ranks = rankdata(np.concatenate((pos, neg)), method="average")
    # average ranks are multiples of 1/2, so doubling keeps the count integral
    twice_u = int(round(2 * ranks[: pos.size].sum())) - pos.size * (pos.size + 1)
    return twice_u / (2 * pos.size * neg.size)


@dataclass
class EvalReport:
    auc_per_trial: list[float]
    embed_seconds: list[float]
    score_seconds: list[float]
    config: dict
    extra: dict = field(default_factory=dict)

    @property
    def trial_count(self) -> int:
        return len(self.auc_per_trial)

    @property
    def auc(self) -> float:
        return float(np.mean(self.auc_per_trial))

    @property
    def embed_seconds_mean(self) -> float:
        return float(np.mean(self.embed_seconds))

    @property
    def score_seconds_mean(self) -> float:
        return float(np.mean(self.score_seconds))

    def to_dict(self) -> dict:
        return {
            "auc_mean": self.auc,
            "auc_per_trial": list(self.auc_per_trial),
            "embed_seconds_mean": self.embed_seconds_mean,
            "score_seconds_mean": self.score_seconds_mean,
            "config": dict(self.config),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _trial_seeds(seed, trial):
    # split and hash draws come from separate streams of the trial's seed
    split_seq, hash_seq = np.random.SeedSequence(seed + trial).spawn(2)
    return np.random.default_rng(split_seq), int(hash_seq.generate_state(1)[0])


def run_link_prediction(
    graph,
    train_ratio: float = 0.8,
    T: int = 2,
    K: int = 200,
    trials: int = 5,
    seed: int = 42,
    *,
    threads: int = 1,
) -> EvalReport:
    """Repeat split, embed, score and AUC ``trials`` times; trial ``i`` is seeded by ``seed + i``.

    Only the training graph is embedded; every node stays in it, so held-out
    pairs are scored on representations that never saw their edge.
    """
    train_ratio = check_ratio(train_ratio)
    T = check_positive_int(T, "T")
    K = check_positive_int(K, "K")
    trials = check_positive_int(trials, "trials")
    if seed is None or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")

    aucs, embed_s, score_s = [], [], []
    for i in range(trials):
        split_rng, hash_seed = _trial_seeds(seed, i)
        split = split_edges(graph, train_ratio, split_rng)
        start = time.perf_counter()
        emb = embed(split.train_graph, T, K, hash_seed, threads=threads)
        embed_s.append(time.perf_counter() - start)
        start = time.perf_counter()
        pos = pair_scores(emb.rows, split.test_positives)
        neg = pair_scores(emb.rows, split.test_negatives)
        aucs.append(auc(pos, neg))
        score_s.append(time.perf_counter() - start)
    config = {"T": T, "K": K, "seed": seed, "train_ratio": train_ratio, "trials": trials}
    return EvalReport(aucs, embed_s, score_s, config)
