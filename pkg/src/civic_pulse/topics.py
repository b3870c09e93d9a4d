"""LDA topic modeling by collapsed Gibbs sampling, UMass coherence, and the
topic x sentiment summary table.

The sampler draws all of a sweep's uniforms from a seeded numpy Generator
up front and hands them to a plain-loop kernel, so a fit is reproducible
bit-for-bit whether or not numba is available to compile the kernel.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from .preprocess import CleanDoc
from .sentiment import SentimentResult

log = logging.getLogger(__name__)

try:
    from numba import njit

    _kernel_jit = njit(cache=False, nogil=True)
except ImportError:  # pragma: no cover - exercised only without numba
    def _kernel_jit(fn):
        fn.py_func = fn
        return fn


class VocabularyCollapsedError(ValueError):
    pass


class InvariantError(AssertionError):
    pass


# ---------------------------------------------------------------- document-term matrix


@dataclass
class DocTermMatrix:
    vocab: list[str]
    counts: sparse.csr_matrix
    doc_ids: list[str]
    excluded: list[str] = field(default_factory=list)

    @property
    def n_docs(self) -> int:
        return self.counts.shape[0]

    @property
    def n_terms(self) -> int:
        return self.counts.shape[1]

    def doc_frequency(self) -> np.ndarray:
        return np.asarray((self.counts > 0).sum(axis=0)).ravel()


def build_dtm(
    docs: Sequence[CleanDoc] | Sequence[tuple[str, Sequence[str]]],
    min_df: int = 1,
    max_df_frac: float = 1.0,
) -> DocTermMatrix:
    """Count matrix over terms with ``min_df <= df <= max_df_frac * D``.

    Documents left without any vocabulary term are dropped and listed in
    ``excluded``. Vocabulary is sorted, so term ids do not depend on input order.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if not 0 < max_df_frac <= 1:
        raise ValueError("max_df_frac must be in (0, 1]")
    pairs = [(d.uid, d.tokens) if isinstance(d, CleanDoc) else (d[0], d[1]) for d in docs]
    if not pairs:
        raise VocabularyCollapsedError("vocabulary collapsed: empty corpus")

    df: dict[str, int] = {}
    for _, tokens in pairs:
        for tok in set(tokens):
            df[tok] = df.get(tok, 0) + 1
    max_df = max_df_frac * len(pairs)
    vocab = sorted(t for t, n in df.items() if min_df <= n <= max_df)
    index = {t: i for i, t in enumerate(vocab)}

    indptr, indices, data = [0], [], []
    doc_ids, excluded = [], []
    for doc_id, tokens in pairs:
        row: dict[int, int] = {}
        for tok in tokens:
            j = index.get(tok)
            if j is not None:
                row[j] = row.get(j, 0) + 1
        if not row:
            excluded.append(doc_id)
            continue
        cols = sorted(row)
        indices.extend(cols)
        data.extend(row[j] for j in cols)
        indptr.append(len(indices))
        doc_ids.append(doc_id)
    if not doc_ids:
        raise VocabularyCollapsedError("vocabulary collapsed: every document was pruned empty")
    counts = sparse.csr_matrix(
        (np.array(data, dtype=np.int64), np.array(indices, dtype=np.int64), np.array(indptr)),
        shape=(len(doc_ids), len(vocab)),
    )
    if excluded:
        log.info("build_dtm: %d document(s) empty after pruning", len(excluded))
    return DocTermMatrix(vocab, counts, doc_ids, excluded)


# ---------------------------------------------------------------- Gibbs sampler


@_kernel_jit
def _gibbs_sweep(doc, word, z, n_dk, n_kw, n_k, u, alpha, beta, v_beta, p):
    K = n_k.shape[0]
    for i in range(z.shape[0]):
        d = doc[i]
        w = word[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for t in range(K):
            total += (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) / (n_k[t] + v_beta)
            p[t] = total
        target = u[i] * total
        k = K - 1
        for t in range(K):
            if p[t] > target:
                k = t
                break
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1


def _token_arrays(dtm: DocTermMatrix) -> tuple[np.ndarray, np.ndarray]:
    counts = dtm.counts
    lengths = np.diff(counts.indptr)
    doc_of_entry = np.repeat(np.arange(dtm.n_docs, dtype=np.int64), lengths)
    doc = np.repeat(doc_of_entry, counts.data)
    word = np.repeat(counts.indices.astype(np.int64), counts.data)
    return doc, word


@dataclass
class TopicModel:
    K: int
    vocab: list[str]
    doc_ids: list[str]
    phi: np.ndarray
    theta: np.ndarray
    alpha: float
    beta: float
    iters: int
    seed: int
    assignments: np.ndarray
    top_keywords: list[list[str]]
    coherence: float | None = None

    def dominant_topics(self) -> np.ndarray:
        # argmax returns the first maximum, i.e. ties go to the lowest topic id
        return np.argmax(self.theta, axis=1)

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "alpha": self.alpha,
            "beta": self.beta,
            "iters": self.iters,
            "seed": self.seed,
            "coherence": self.coherence,
            "vocab": self.vocab,
            "doc_ids": self.doc_ids,
            "top_keywords": self.top_keywords,
            "phi": self.phi.tolist(),
            "theta": self.theta.tolist(),
        }


def _check_counts(doc, word, z, n_dk, n_kw, n_k, n_docs, V, K) -> None:
    N = z.shape[0]
    if n_dk.sum() != N or n_kw.sum() != N or n_k.sum() != N:
        raise InvariantError("token count not conserved")
    if not np.array_equal(n_k, n_kw.sum(axis=1)):
        raise InvariantError("topic totals disagree with topic-word counts")
    expect_dk = np.zeros((n_docs, K), dtype=np.int64)
    np.add.at(expect_dk, (doc, z), 1)
    expect_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(expect_kw, (z, word), 1)
    if not (np.array_equal(expect_dk, n_dk) and np.array_equal(expect_kw, n_kw)):
        raise InvariantError("count tables disagree with assignments")
    if (n_dk < 0).any() or (n_kw < 0).any():
        raise InvariantError("negative count")


def _estimates(n_dk, n_kw, n_k, alpha, beta):
    K, V = n_kw.shape
    phi = (n_kw + beta) / (n_k[:, None] + V * beta)
    theta = (n_dk + alpha) / (n_dk.sum(axis=1)[:, None] + K * alpha)
    return phi, theta


def _check_simplex(phi, theta, tol=1e-9) -> None:
    for name, m in (("phi", phi), ("theta", theta)):
        if (m < 0).any() or np.abs(m.sum(axis=1) - 1.0).max() > tol:
            raise InvariantError(f"{name} rows are not probability distributions")


def top_terms(phi_row: np.ndarray, n: int) -> np.ndarray:
    # stable sort: equal weights keep vocabulary order
    return np.argsort(-phi_row, kind="stable")[:n]


def fit_lda(
    dtm: DocTermMatrix,
    K: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iters: int = 1000,
    seed: int = 0,
    debug: bool = False,
    n_keywords: int = 10,
) -> TopicModel:
    """Fit LDA by collapsed Gibbs sampling; ``alpha`` defaults to 50/K.

    With ``debug=True`` count conservation and the simplex property of the
    smoothed estimates are verified after every sweep.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if alpha is None:
        alpha = 50.0 / K
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    doc, word = _token_arrays(dtm)
    N, V, D = doc.shape[0], dtm.n_terms, dtm.n_docs
    if K > N:
        raise ValueError(f"K={K} exceeds the number of tokens ({N})")

    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=N).astype(np.int64)
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_dk, (doc, z), 1)
    np.add.at(n_kw, (z, word), 1)
    n_k = n_kw.sum(axis=1)
    p = np.empty(K, dtype=np.float64)
    alpha, beta = float(alpha), float(beta)

    for _ in range(iters):
        u = rng.random(N)
        _gibbs_sweep(doc, word, z, n_dk, n_kw, n_k, u, alpha, beta, V * beta, p)
        if debug:
            _check_counts(doc, word, z, n_dk, n_kw, n_k, D, V, K)
            _check_simplex(*_estimates(n_dk, n_kw, n_k, alpha, beta))

    phi, theta = _estimates(n_dk, n_kw, n_k, alpha, beta)
    _check_simplex(phi, theta)
    keywords = [[dtm.vocab[j] for j in top_terms(phi[k], n_keywords)] for k in range(K)]
    return TopicModel(
        K=K,
        vocab=list(dtm.vocab),
        doc_ids=list(dtm.doc_ids),
        phi=phi,
        theta=theta,
        alpha=alpha,
        beta=beta,
        iters=iters,
        seed=seed,
        assignments=z,
        top_keywords=keywords,
    )


# ---------------------------------------------------------------- coherence


def coherence_score(model: TopicModel, dtm: DocTermMatrix, top_n: int = 10) -> float:
    """Mean UMass coherence over topics.

    Per topic: sum over ranked pairs i > j of log((D(w_i, w_j) + 1) / D(w_j)),
    with D counting documents in ``dtm``.
    """
    if top_n < 2:
        raise ValueError("top_n must be >= 2")
    if list(model.vocab) != list(dtm.vocab):
        raise ValueError("model and document-term matrix use different vocabularies")
    present = (dtm.counts > 0).astype(np.int64).tocsc()
    scores = []
    for k in range(model.K):
        ids = top_terms(model.phi[k], min(top_n, dtm.n_terms))
        sub = present[:, ids]
        co = (sub.T @ sub).toarray()
        total = 0.0
        for i in range(1, len(ids)):
            for j in range(i):
                if co[j, j] == 0:
                    raise ValueError(f"term {dtm.vocab[ids[j]]!r} has zero document frequency")
                total += math.log((co[i, j] + 1) / co[j, j])
        scores.append(total)
    return float(np.mean(scores))


def score_candidates(
    dtm: DocTermMatrix,
    k_candidates: Sequence[int],
    alpha: float | None = None,
    beta: float = 0.01,
    iters: int = 1000,
    seed: int = 0,
    top_n: int = 10,
    max_workers: int = 1,
) -> list[TopicModel]:
    """Fit one model per K (seed offset by candidate index), each with coherence set."""
    if not k_candidates:
        raise ValueError("k_candidates must be non-empty")

    def fit(idx_k):
        idx, k = idx_k
        model = fit_lda(dtm, k, alpha, beta, iters, seed + idx)
        model.coherence = coherence_score(model, dtm, top_n)
        log.info("K=%d coherence=%.4f", k, model.coherence)
        return model

    jobs = list(enumerate(k_candidates))
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(fit, jobs))
    return [fit(job) for job in jobs]


def select_num_topics(
    dtm: DocTermMatrix,
    k_candidates: Sequence[int],
    alpha: float | None = None,
    beta: float = 0.01,
    iters: int = 1000,
    seed: int = 0,
    top_n: int = 10,
    max_workers: int = 1,
) -> TopicModel:
    """Return the most coherent candidate model; ties go to the smaller K."""
    models = score_candidates(dtm, k_candidates, alpha, beta, iters, seed, top_n, max_workers)
    return max(models, key=lambda m: (m.coherence, -m.K))


# ---------------------------------------------------------------- topic x sentiment


@dataclass(frozen=True)
class TopicSentimentRow:
    topic_id: int
    top_keywords: tuple[str, ...]
    theme: str
    doc_count: int
    share: float
    avg_compound: float | None


def topic_sentiment_table(
    model: TopicModel,
    sentiments: Mapping[str, SentimentResult],
    themes: Mapping[int, str] | None = None,
) -> list[TopicSentimentRow]:
    """Join each document's dominant topic with its compound score."""
    themes = themes or {}
    missing = [d for d in model.doc_ids if d not in sentiments]
    if missing:
        raise KeyError(f"no sentiment for document {missing[0]!r}")
    dominant = model.dominant_topics()
    D = len(model.doc_ids)
    per_topic: list[list[float]] = [[] for _ in range(model.K)]
    for doc_id, k in zip(model.doc_ids, dominant):
        per_topic[int(k)].append(sentiments[doc_id].compound)
    rows = []
    for k, scores in enumerate(per_topic):
        rows.append(
            TopicSentimentRow(
                topic_id=k,
                top_keywords=tuple(model.top_keywords[k]),
                theme=themes.get(k, ""),
                doc_count=len(scores),
                share=100.0 * len(scores) / D,
                avg_compound=math.fsum(scores) / len(scores) if scores else None,
            )
        )
    return rows


def rounded_shares(rows: Sequence[TopicSentimentRow], decimals: int = 1) -> list[float]:
    """Largest-remainder rounding so displayed shares still add up to 100."""
    scale = 10**decimals
    total_units = 100 * scale
    n_docs = sum(r.doc_count for r in rows)
    exact = [r.doc_count * total_units / n_docs for r in rows]
    floors = [math.floor(x) for x in exact]
    short = total_units - sum(floors)
    order = sorted(range(len(rows)), key=lambda i: (-(exact[i] - floors[i]), i))
    for i in order[:short]:
        floors[i] += 1
    return [f / scale for f in floors]
