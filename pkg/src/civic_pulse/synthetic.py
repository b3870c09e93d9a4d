"""Seeded synthetic corpora for tests and the bundled fixture."""

from __future__ import annotations

import numpy as np


def disjoint_topic_corpus(
    seed: int,
    n_docs: int = 200,
    n_classes: int = 3,
    words_per_class: int = 20,
    doc_len: tuple[int, int] = (20, 40),
) -> tuple[list[tuple[str, list[str]]], list[int]]:
    """Documents each drawn uniformly from one of ``n_classes`` disjoint vocabularies.

    Returns ``([(doc_id, tokens), ...], true_class_per_doc)``.
    """
    rng = np.random.default_rng(seed)
    vocabs = [[f"c{c}w{j:02d}" for j in range(words_per_class)] for c in range(n_classes)]
    docs, labels = [], []
    for d in range(n_docs):
        c = int(rng.integers(n_classes))
        n = int(rng.integers(doc_len[0], doc_len[1] + 1))
        words = rng.integers(words_per_class, size=n)
        docs.append((f"doc{d:04d}", [vocabs[c][j] for j in words]))
        labels.append(c)
    return docs, labels
