from __future__ import annotations

import math

import numpy as np
import pytest

from civic_pulse.sentiment import Label, SentimentResult
from civic_pulse.synthetic import disjoint_topic_corpus
from civic_pulse.topics import (
    _gibbs_sweep,
    _token_arrays,
    TopicModel,
    VocabularyCollapsedError,
    build_dtm,
    coherence_score,
    fit_lda,
    rounded_shares,
    select_num_topics,
    topic_sentiment_table,
)

TOY = [("d0", ["a", "b"]), ("d1", ["b", "c"]), ("d2", ["b"])]


@pytest.fixture(scope="module")
def synthetic():
    docs, labels = disjoint_topic_corpus(7)
    return build_dtm(docs), labels


def test_dtm_hand_counts():
    dtm = build_dtm(TOY, min_df=1, max_df_frac=1.0)
    assert dtm.vocab == ["a", "b", "c"]
    assert dtm.counts.toarray().tolist() == [[1, 1, 0], [0, 1, 1], [0, 1, 0]]


def test_dtm_max_df_prunes_and_excludes():
    dtm = build_dtm(TOY, min_df=1, max_df_frac=0.5)
    assert dtm.vocab == ["a", "c"]
    assert dtm.doc_ids == ["d0", "d1"] and dtm.excluded == ["d2"]


def test_dtm_empty_corpus_fatal():
    with pytest.raises(ValueError):
        build_dtm([])


def test_dtm_collapse_fatal():
    with pytest.raises(VocabularyCollapsedError):
        build_dtm(TOY, min_df=5)


def test_single_topic_degeneracy(synthetic):
    dtm, _ = synthetic
    model = fit_lda(dtm, 1, iters=5)
    assert np.allclose(model.theta, 1.0)
    freq = np.asarray(dtm.counts.sum(axis=0)).ravel()
    expected = (freq + model.beta) / (freq.sum() + dtm.n_terms * model.beta)
    assert np.allclose(model.phi[0], expected)


def test_deterministic(synthetic):
    dtm, _ = synthetic
    a = fit_lda(dtm, 3, iters=50, seed=5)
    b = fit_lda(dtm, 3, iters=50, seed=5)
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.phi, b.phi) and np.array_equal(a.theta, b.theta)


def test_simplex_and_conservation(synthetic):
    dtm, _ = synthetic
    model = fit_lda(dtm, 4, iters=30, seed=1, debug=True)
    assert np.all(np.abs(model.phi.sum(axis=1) - 1) <= 1e-9)
    assert np.all(np.abs(model.theta.sum(axis=1) - 1) <= 1e-9)
    assert len(model.assignments) == dtm.counts.sum()


@pytest.mark.parametrize("kwargs", [{"K": 0}, {"K": 3, "iters": 0}, {"K": 3, "beta": 0}])
def test_bad_parameters(synthetic, kwargs):
    with pytest.raises(ValueError):
        fit_lda(synthetic[0], **kwargs)


def _model_with_top_terms(dtm, top_ids: list[list[int]]) -> TopicModel:
    K, V = len(top_ids), dtm.n_terms
    phi = np.full((K, V), 1e-6)
    for k, ids in enumerate(top_ids):
        for rank, j in enumerate(ids):
            phi[k, j] = 1.0 - rank * 0.01
    phi /= phi.sum(axis=1, keepdims=True)
    return TopicModel(K, dtm.vocab, dtm.doc_ids, phi, np.full((dtm.n_docs, K), 1 / K), 1.0, 0.01, 1, 0,
                      np.zeros(0, dtype=np.int64), [[] for _ in range(K)])


def test_coherence_perfect_cooccurrence():
    docs = [(f"d{i}", ["x", "y"]) for i in range(4)] + [("e", ["z"])]
    dtm = build_dtm(docs)
    model = _model_with_top_terms(dtm, [[dtm.vocab.index("x"), dtm.vocab.index("y")]])
    assert coherence_score(model, dtm, top_n=2) == pytest.approx(math.log(5 / 4))


def test_coherence_never_cooccurring_pair():
    docs = [(f"a{i}", ["x"]) for i in range(10)] + [(f"b{i}", ["y"]) for i in range(3)]
    dtm = build_dtm(docs)
    model = _model_with_top_terms(dtm, [[dtm.vocab.index("x"), dtm.vocab.index("y")]])
    assert coherence_score(model, dtm, top_n=2) == pytest.approx(math.log(1 / 10))


def test_coherence_beats_shuffled_corpus():
    rng = np.random.default_rng(0)
    wins = 0
    for seed in range(5):
        docs, _ = disjoint_topic_corpus(seed)
        tokens = [t for _, toks in docs for t in toks]
        rng.shuffle(tokens)
        shuffled, i = [], 0
        for doc_id, toks in docs:
            shuffled.append((doc_id, tokens[i : i + len(toks)]))
            i += len(toks)
        real = build_dtm(docs)
        fake = build_dtm(shuffled)
        c_real = coherence_score(fit_lda(real, 3, iters=200, seed=seed), real)
        c_fake = coherence_score(fit_lda(fake, 3, iters=200, seed=seed), fake)
        wins += c_real > c_fake
    assert wins == 5


def test_coherence_upper_bound(synthetic):
    dtm, _ = synthetic
    model = fit_lda(dtm, 3, iters=100)
    D = dtm.n_docs
    assert coherence_score(model, dtm) <= 45 * math.log((D + 1) / D)


def test_select_single_candidate(synthetic):
    dtm, _ = synthetic
    model = select_num_topics(dtm, [3], iters=50, seed=2)
    again = fit_lda(dtm, 3, iters=50, seed=2)
    assert model.K == 3 and np.array_equal(model.assignments, again.assignments)
    assert model.coherence == coherence_score(again, dtm)


def test_select_parallel_matches_serial(synthetic):
    dtm, _ = synthetic
    a = select_num_topics(dtm, [2, 3, 4], iters=50, seed=3)
    b = select_num_topics(dtm, [2, 3, 4], iters=50, seed=3, max_workers=3)
    assert a.K == b.K and np.array_equal(a.phi, b.phi)


def _sent(c):
    return SentimentResult(0.0, 1.0, 0.0, c, Label.NEUTRAL)


def test_topic_sentiment_mean_and_share():
    dtm = build_dtm([("p1", ["a"]), ("p2", ["a"])])
    model = fit_lda(dtm, 1, iters=2)
    [row] = topic_sentiment_table(model, {"p1": _sent(-0.5), "p2": _sent(0.1)}, {0: "Parking"})
    assert row.avg_compound == pytest.approx(-0.2) and row.share == 100.0
    assert row.theme == "Parking" and row.doc_count == 2


def test_dominant_topic_tie_goes_to_lowest_id():
    dtm = build_dtm([("p1", ["a", "b"])])
    model = _model_with_top_terms(dtm, [[0, 1], [1, 0]])
    model.theta = np.array([[0.5, 0.5]])
    assert model.dominant_topics().tolist() == [0]


def test_missing_sentiment_is_error():
    dtm = build_dtm([("p1", ["a"])])
    with pytest.raises(KeyError):
        topic_sentiment_table(fit_lda(dtm, 1, iters=1), {})


def test_shares_sum_to_100(synthetic):
    dtm, _ = synthetic
    model = fit_lda(dtm, 6, iters=20)
    rows = topic_sentiment_table(model, {d: _sent(0.0) for d in dtm.doc_ids})
    assert abs(sum(r.share for r in rows) - 100) <= 0.1
    assert sum(rounded_shares(rows)) == pytest.approx(100.0)


def test_python_kernel_matches_compiled(synthetic):
    dtm, _ = synthetic
    kernel = getattr(_gibbs_sweep, "py_func", _gibbs_sweep)
    doc, word = _token_arrays(dtm)
    rng = np.random.default_rng(0)
    K, V, D = 3, dtm.n_terms, dtm.n_docs
    z = rng.integers(0, K, size=len(doc))
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_dk, (doc, z), 1)
    np.add.at(n_kw, (z, word), 1)
    state = [z, n_dk, n_kw, n_kw.sum(axis=1)]
    a, b = [x.copy() for x in state], [x.copy() for x in state]
    for _ in range(3):
        u = rng.random(len(doc))
        _gibbs_sweep(doc, word, a[0], a[1], a[2], a[3], u, 1.0, 0.01, V * 0.01, np.empty(K))
        kernel(doc, word, b[0], b[1], b[2], b[3], u, 1.0, 0.01, V * 0.01, np.empty(K))
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
