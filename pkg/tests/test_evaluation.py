import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hashgnn.evaluation import auc, hamming_score, pair_scores, run_link_prediction
from hashgnn.exceptions import ConfigError
from hashgnn.graph import AttributedGraph
from hashgnn.sketch import embed
from oracles import brute_force_auc

scores = st.lists(st.integers(0, 10).map(lambda x: x / 10), min_size=1, max_size=40)


def test_hamming_examples():
    assert hamming_score([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0
    assert hamming_score([1, 2, 3, 4], [1, 2, 9, 9]) == 0.5
    with pytest.raises(ValueError):
        hamming_score([1, 2], [1])


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=30))
def test_hamming_symmetric(pairs):
    a, b = zip(*pairs)
    assert hamming_score(a, b) == hamming_score(b, a)


def test_pair_scores_matches_hamming(rng):
    rows = rng.integers(0, 4, size=(10, 16))
    pairs = rng.integers(0, 10, size=(20, 2))
    expected = [hamming_score(rows[u], rows[v]) for u, v in pairs]
    assert np.allclose(pair_scores(rows, pairs), expected)


def test_disjoint_isolated_nodes_score_zero():
    g = AttributedGraph.from_edges(2, [], [set(range(0, 20)), set(range(20, 40))], 40)
    rows = embed(g, 1, 2048, 5).rows
    assert hamming_score(rows[0], rows[1]) <= 0.02


def test_auc_examples():
    assert auc([0.9, 0.8], [0.1, 0.2]) == 1.0
    assert auc([0.5], [0.5]) == 0.5
    assert auc([0.7, 0.3], [0.5, 0.1]) == brute_force_auc([0.7, 0.3], [0.5, 0.1]) == 0.75
    with pytest.raises(ValueError):
        auc([], [0.1])


@given(scores, scores)
def test_auc_equals_pairwise_count(pos, neg):
    assert auc(pos, neg) == brute_force_auc(pos, neg)


@given(scores, scores)
def test_auc_invariant_under_increasing_transform(pos, neg):
    f = lambda x: np.exp(3 * np.asarray(x)) + 7
    assert auc(pos, neg) == auc(f(pos), f(neg))


def _twin_graph():
    # cliques of attribute-identical nodes; different cliques share no attributes
    n_groups, size = 10, 6
    edges, attrs = [], []
    for g in range(n_groups):
        base = g * size
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size)]
        attrs += [set(range(g * 5, g * 5 + 5))] * size
    return AttributedGraph.from_edges(n_groups * size, edges, attrs, n_groups * 5)


def test_link_prediction_separation():
    report = run_link_prediction(_twin_graph(), 0.8, T=1, K=64, trials=3, seed=0)
    assert report.auc >= 0.95


def test_report_shape_and_determinism():
    g = _twin_graph()
    r1 = run_link_prediction(g, 0.8, T=2, K=32, trials=5, seed=3)
    r2 = run_link_prediction(g, 0.8, T=2, K=32, trials=5, seed=3)
    assert r1.trial_count == 5 and len(r1.auc_per_trial) == 5
    assert r1.auc_per_trial == r2.auc_per_trial
    assert r1.auc == pytest.approx(np.mean(r1.auc_per_trial))
    doc = r1.to_dict()
    assert set(doc) == {"auc_mean", "auc_per_trial", "embed_seconds_mean", "score_seconds_mean", "config"}
    assert doc["config"] == {"T": 2, "K": 32, "seed": 3, "train_ratio": 0.8, "trials": 5}
    assert all(0 <= a <= 1 for a in doc["auc_per_trial"])


def test_link_prediction_bad_params():
    with pytest.raises(ConfigError):
        run_link_prediction(_twin_graph(), 1.5)
    with pytest.raises(ConfigError):
        run_link_prediction(_twin_graph(), 0.8, trials=0)
