from __future__ import annotations

import re
from datetime import datetime, timezone

from hypothesis import given
from hypothesis import strategies as st

from civic_pulse.ingest import Platform, RawPost
from civic_pulse.preprocess import (
    default_stopwords,
    lemmatize,
    load_lemma_exceptions,
    normalize_for_topics,
    read_docs_jsonl,
    to_clean_doc,
    write_docs_jsonl,
)

TOKEN = re.compile(r"[a-z0-9]{2,}")


def test_url_mention_and_punctuation():
    # "check" is not in the bundled stopword list
    assert "check" not in default_stopwords()
    assert normalize_for_topics("Check http://a.io @bob ROADS!!") == ["check", "road"]


def test_empty():
    assert normalize_for_topics("") == []


def test_hashtag_and_duplicates():
    assert normalize_for_topics("#KnoxTraffic delays delays") == ["knoxtraffic", "delay", "delay"]


def test_stopword_list_size():
    assert 170 <= len(default_stopwords()) <= 200


def test_exception_table():
    table = load_lemma_exceptions()
    assert len(table) >= 200
    assert lemmatize("causing") == "cause"
    assert lemmatize("buses") == "bus"
    assert lemmatize("bus") == "bus"
    assert lemmatize("gas") == "gas"
    assert lemmatize("delays") == "delay"


def test_suffix_rules():
    assert lemmatize("roads") == "road"
    assert lemmatize("cities") == "city"
    assert lemmatize("crashes") == "crash"


def test_custom_stopwords():
    assert normalize_for_topics("the road", stopwords={"road"}) == ["the"]


def test_raw_text_preserved():
    text = "Avoid exit 374 if possible - major accident causing delays"
    p = RawPost("1", Platform.TWITTER, text, datetime(2022, 3, 1, tzinfo=timezone.utc))
    doc = to_clean_doc(p)
    assert doc.raw_text == text
    assert doc.tokens == ("avoid", "exit", "374", "possible", "major", "accident", "cause", "delay")


def test_docs_roundtrip(tmp_path):
    p = RawPost("9", Platform.REDDIT, "Parking garages full", datetime(2022, 3, 1, tzinfo=timezone.utc), geo=(35.9, -83.9))
    docs = [to_clean_doc(p)]
    write_docs_jsonl(docs, tmp_path / "d.jsonl")
    assert read_docs_jsonl(tmp_path / "d.jsonl") == docs


_pieces = st.sampled_from(
    list("abcdefghijklmnopqrstuvwxyzABCXYZ0123456789 #@!.,:/-'éß") + ["http://x.io/a ", "ing", "ies", "es"]
)
_text = st.lists(_pieces, max_size=40).map("".join)


@given(_text)
def test_token_shape_and_stopwords(text):
    stop = default_stopwords()
    for tok in normalize_for_topics(text):
        assert TOKEN.fullmatch(tok)
        assert tok not in stop


@given(_text)
def test_idempotent_on_joined_output(text):
    once = normalize_for_topics(text)
    assert normalize_for_topics(" ".join(once)) == once


@given(st.from_regex(r"[a-z]{1,12}", fullmatch=True))
def test_lemmatize_fixed_point(word):
    assert lemmatize(lemmatize(word)) == lemmatize(word)
