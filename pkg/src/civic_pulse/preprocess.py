"""Token normalization for topic modeling.

Sentiment scoring never sees these tokens; it works on the raw post text,
which keeps the capitalization and punctuation cues the rule engine needs.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from datetime import datetime
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .ingest import Platform, RawPost, format_timestamp, make_uid, parse_timestamp

_URL_RE = re.compile(r"(?:\b[a-z][a-z0-9+.\-]*://|\bwww\.)\S+")
_MENTION_RE = re.compile(r"(?<![\w@])@\w+")
_NON_ALNUM_RE = re.compile(r"[^a-z0-9]+")
_VOWEL_RE = re.compile(r"[aeiouy]")


def _data_path(name: str):
    return resources.files("civic_pulse") / "data" / name


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """One token per line; blank lines and ``#`` comments are ignored."""
    src = _data_path("stopwords.txt") if path is None else Path(path)
    words = set()
    for line in src.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def load_lemma_exceptions(path: str | Path | None = None) -> dict[str, str]:
    """CSV with a ``surface,lemma`` header."""
    src = _data_path("lemma_exceptions.csv") if path is None else Path(path)
    table: dict[str, str] = {}
    with src.open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            table[row["surface"].strip().lower()] = row["lemma"].strip().lower()
    # lemmas are their own lemma, otherwise the suffix rules could strip them again
    for lemma in list(table.values()):
        table.setdefault(lemma, lemma)
    return table


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    return load_stopwords()


@lru_cache(maxsize=1)
def _default_exceptions() -> Mapping[str, str]:
    return load_lemma_exceptions()


def _undouble(stem: str) -> str:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "aeiouylsz":
        return stem[:-1]
    return stem


def _strip_suffix(word: str) -> str:
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith(("ches", "shes", "xes", "zes")) and len(word) > 4:
        return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is")) and len(word) > 3:
        return word[:-1]
    if word.endswith("ied") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("ing"):
        stem = word[:-3]
        if len(stem) >= 3 and _VOWEL_RE.search(stem):
            return _undouble(stem)
    if word.endswith("ed"):
        stem = word[:-2]
        if len(stem) >= 3 and _VOWEL_RE.search(stem):
            return _undouble(stem)
    return word


def lemmatize(word: str, exceptions: Mapping[str, str] | None = None) -> str:
    """Suffix-stripping lemmatizer guarded by an exception table.

    Rules are applied until the word stops changing, so the result is always
    a fixed point (``lemmatize(lemmatize(w)) == lemmatize(w)``).
    """
    table = _default_exceptions() if exceptions is None else exceptions
    while True:
        if word in table:
            return table[word]
        stripped = _strip_suffix(word)
        if stripped == word:
            return word
        word = stripped


def normalize_for_topics(
    text: str,
    stopwords: frozenset[str] | set[str] | None = None,
    exceptions: Mapping[str, str] | None = None,
) -> list[str]:
    stop = default_stopwords() if stopwords is None else stopwords
    text = text.lower()
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = text.replace("#", "")
    text = _NON_ALNUM_RE.sub(" ", text)
    tokens = []
    for tok in text.split():
        if len(tok) < 2 or tok in stop:
            continue
        lemma = lemmatize(tok, exceptions)
        # a lemma can itself be short or a stopword ("ones" -> "one" is fine, "ss" is not)
        if len(lemma) >= 2 and lemma not in stop:
            tokens.append(lemma)
    return tokens


@dataclass(frozen=True)
class CleanDoc:
    post_id: str
    platform: Platform
    raw_text: str
    tokens: tuple[str, ...]
    created_at: datetime
    geo: tuple[float, float] | None = None

    @property
    def uid(self) -> str:
        return make_uid(self.platform, self.post_id)

    def to_record(self) -> dict:
        rec = {
            "post_id": self.post_id,
            "platform": self.platform.value,
            "raw_text": self.raw_text,
            "tokens": list(self.tokens),
            "created_at": format_timestamp(self.created_at),
        }
        if self.geo is not None:
            rec["lat"], rec["lon"] = self.geo
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "CleanDoc":
        geo = (float(rec["lat"]), float(rec["lon"])) if "lat" in rec else None
        return cls(
            post_id=rec["post_id"],
            platform=Platform.parse(rec["platform"]),
            raw_text=rec["raw_text"],
            tokens=tuple(rec["tokens"]),
            created_at=parse_timestamp(rec["created_at"]),
            geo=geo,
        )


def to_clean_doc(post: RawPost, stopwords=None, exceptions=None) -> CleanDoc:
    return CleanDoc(
        post_id=post.id,
        platform=post.platform,
        raw_text=post.text,
        tokens=tuple(normalize_for_topics(post.text, stopwords, exceptions)),
        created_at=post.created_at,
        geo=post.geo,
    )


def preprocess_posts(posts: Iterable[RawPost], stopwords=None, exceptions=None) -> list[CleanDoc]:
    return [to_clean_doc(p, stopwords, exceptions) for p in posts]


def write_docs_jsonl(docs: Iterable[CleanDoc], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(json.dumps(doc.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def read_docs_jsonl(path: str | Path) -> list[CleanDoc]:
    with open(path, encoding="utf-8") as fh:
        return [CleanDoc.from_record(json.loads(line)) for line in fh if line.strip()]
