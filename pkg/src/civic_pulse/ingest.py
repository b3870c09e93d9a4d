"""Loading, relevance filtering and cleaning of social-media post exports.

Posts come from JSONL or CSV exports (one record per post). Records that fail
validation are not fatal: they are collected as :class:`Reject` entries and
the load continues.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Iterator, NamedTuple

log = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "platform", "text", "created_at")

_URL_RE = re.compile(r"(?:\b[a-z][a-z0-9+.\-]*://|\bwww\.)\S+", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")


class Platform(str, enum.Enum):
    TWITTER = "Twitter"
    REDDIT = "Reddit"

    @classmethod
    def parse(cls, value: Any) -> "Platform":
        if isinstance(value, Platform):
            return value
        if isinstance(value, str):
            for member in cls:
                if member.value.lower() == value.strip().lower():
                    return member
        raise ValueError(f"unknown platform {value!r}")


@dataclass(frozen=True)
class RawPost:
    id: str
    platform: Platform
    text: str
    created_at: datetime
    geo: tuple[float, float] | None = None
    is_retweet: bool = False
    lang: str | None = None
    parent_id: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("post id must be non-empty")
        if self.geo is not None:
            lat, lon = self.geo
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                raise ValueError(f"coordinates out of range: {self.geo}")

    @property
    def key(self) -> tuple[Platform, str]:
        return (self.platform, self.id)

    @property
    def uid(self) -> str:
        return make_uid(self.platform, self.id)

    def to_record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "id": self.id,
            "platform": self.platform.value,
            "text": self.text,
            "created_at": format_timestamp(self.created_at),
        }
        if self.geo is not None:
            rec["lat"], rec["lon"] = self.geo
        rec["is_retweet"] = self.is_retweet
        if self.lang is not None:
            rec["lang"] = self.lang
        if self.parent_id is not None:
            rec["parent_id"] = self.parent_id
        return rec


@dataclass(frozen=True)
class BoundingBox:
    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def __post_init__(self):
        if self.min_lat > self.max_lat or self.min_lon > self.max_lon:
            raise ValueError(f"inverted bounding box: {self}")

    def contains(self, lat: float, lon: float) -> bool:
        return self.min_lat <= lat <= self.max_lat and self.min_lon <= lon <= self.max_lon


@dataclass(frozen=True)
class KeywordSet:
    phrases: tuple[str, ...]

    def __post_init__(self):
        phrases = tuple(self.phrases)
        if not phrases:
            raise ValueError("keyword set must be non-empty")
        if any(p != p.lower() or not p for p in phrases):
            raise ValueError("keyword phrases must be non-empty lowercase strings")
        if len(set(phrases)) != len(phrases):
            raise ValueError("duplicate keyword phrases")
        object.__setattr__(self, "phrases", phrases)

    @classmethod
    def from_phrases(cls, phrases: Iterable[str]) -> "KeywordSet":
        """Lowercase and de-duplicate ``phrases`` (first occurrence wins)."""
        return cls(tuple(dict.fromkeys(p.strip().lower() for p in phrases if p.strip())))

    def matches(self, text: str) -> bool:
        lowered = text.lower()
        return any(p in lowered for p in self.phrases)


def make_uid(platform: Platform, post_id: str) -> str:
    """Corpus-wide document key; ids are only unique within a platform."""
    return f"{platform.value}:{post_id}"


class Reject(NamedTuple):
    line_number: int
    reason: str


class LoadResult(NamedTuple):
    posts: list[RawPost]
    rejects: list[Reject]


def parse_timestamp(value: Any) -> datetime:
    """Parse an RFC 3339 string or epoch seconds into a UTC datetime (seconds precision)."""
    if isinstance(value, bool):
        raise ValueError(f"bad timestamp {value!r}")
    if isinstance(value, (int, float)):
        dt = datetime.fromtimestamp(float(value), tz=timezone.utc)
    elif isinstance(value, str):
        s = value.strip()
        if re.fullmatch(r"-?\d+(\.\d+)?", s):
            dt = datetime.fromtimestamp(float(s), tz=timezone.utc)
        else:
            if s[-1:] in ("Z", "z"):
                s = s[:-1] + "+00:00"
            dt = datetime.fromisoformat(s)
            if dt.tzinfo is None:
                raise ValueError(f"timestamp without offset: {value!r}")
            dt = dt.astimezone(timezone.utc)
    else:
        raise ValueError(f"bad timestamp {value!r}")
    return dt.replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_bool(value: Any) -> bool:
    if value is None or value == "":
        return False
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return bool(value)
    s = str(value).strip().lower()
    if s in ("true", "t", "1", "yes", "y"):
        return True
    if s in ("false", "f", "0", "no", "n"):
        return False
    raise ValueError(f"bad boolean {value!r}")


def _optional_str(value: Any) -> str | None:
    if value is None:
        return None
    s = str(value).strip()
    return s or None


def post_from_record(rec: dict[str, Any]) -> RawPost:
    """Build a :class:`RawPost` from a loosely-typed record; raises ``ValueError``."""
    missing = [k for k in REQUIRED_FIELDS if rec.get(k) in (None, "")]
    # empty text is still a text; only absence is a defect
    if "text" in missing and isinstance(rec.get("text"), str):
        missing.remove("text")
    if missing:
        raise ValueError("missing required field(s): " + ", ".join(missing))
    if not isinstance(rec["text"], str):
        raise ValueError("text must be a string")

    lat, lon = rec.get("lat"), rec.get("lon")
    if lat in (None, "") and lon in (None, ""):
        geo = None
    elif lat in (None, "") or lon in (None, ""):
        raise ValueError("lat and lon must be given together")
    else:
        geo = (float(lat), float(lon))

    return RawPost(
        id=str(rec["id"]).strip(),
        platform=Platform.parse(rec["platform"]),
        text=rec["text"],
        created_at=parse_timestamp(rec["created_at"]),
        geo=geo,
        is_retweet=_parse_bool(rec.get("is_retweet")),
        lang=_optional_str(rec.get("lang")),
        parent_id=_optional_str(rec.get("parent_id")),
    )


def _jsonl_records(fh) -> Iterator[tuple[int, Any]]:
    for lineno, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, exc


def _csv_records(fh) -> Iterator[tuple[int, Any]]:
    reader = csv.DictReader(fh)
    if reader.fieldnames is None:
        return
    for row in reader:
        # CSV cannot tell an empty cell from an absent one; treat both as absent
        # (line_num counts physical lines, so multi-line quoted text stays correct)
        yield reader.line_num, {k: (None if v == "" else v) for k, v in row.items()}


def load_posts(path: str | Path, fmt: str) -> LoadResult:
    """Read posts from a JSONL or CSV export, in file order.

    Malformed records become :class:`Reject` entries rather than errors.
    An unreadable file raises ``OSError``.
    """
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unsupported format {fmt!r}")
    posts: list[RawPost] = []
    rejects: list[Reject] = []
    with open(path, encoding="utf-8", newline="" if fmt == "csv" else None) as fh:
        records = _jsonl_records(fh) if fmt == "jsonl" else _csv_records(fh)
        for lineno, rec in records:
            if isinstance(rec, Exception):
                rejects.append(Reject(lineno, f"invalid JSON: {rec.msg}"))
                continue
            if not isinstance(rec, dict):
                rejects.append(Reject(lineno, "record is not an object"))
                continue
            try:
                posts.append(post_from_record(rec))
            except (ValueError, TypeError) as exc:
                rejects.append(Reject(lineno, str(exc)))
    if rejects:
        log.warning("%s: %d record(s) rejected", path, len(rejects))
    return LoadResult(posts, rejects)


def filter_relevant(
    posts: Iterable[RawPost], keywords: KeywordSet, bbox: BoundingBox | None = None
) -> list[RawPost]:
    """Keep posts mentioning a keyword; geotagged posts must also fall in ``bbox``."""
    kept = []
    for post in posts:
        if not keywords.matches(post.text):
            continue
        if bbox is not None and post.geo is not None and not bbox.contains(*post.geo):
            continue
        kept.append(post)
    return kept


def is_english(lang: str | None) -> bool:
    if lang is None:
        return True
    return lang.split("-")[0].split("_")[0].lower() == "en"


def normalize_for_dedupe(text: str) -> str:
    text = _URL_RE.sub(" ", text.lower())
    return _WS_RE.sub(" ", text).strip()


def clean_corpus(posts: Iterable[RawPost]) -> list[RawPost]:
    """Drop retweets, non-English posts, duplicate ids and same-platform text copies."""
    seen_keys: set[tuple[Platform, str]] = set()
    seen_texts: set[tuple[Platform, str]] = set()
    kept = []
    for post in posts:
        if post.is_retweet or not is_english(post.lang):
            continue
        if post.key in seen_keys:
            continue
        seen_keys.add(post.key)
        text_key = (post.platform, normalize_for_dedupe(post.text))
        if text_key in seen_texts:
            continue
        seen_texts.add(text_key)
        kept.append(post)
    return kept


def write_posts_jsonl(posts: Iterable[RawPost], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for post in posts:
            fh.write(json.dumps(post.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def read_posts_jsonl(path: str | Path) -> list[RawPost]:
    """Read a JSONL file written by :func:`write_posts_jsonl`; any defect is fatal."""
    result = load_posts(path, "jsonl")
    if result.rejects:
        first = result.rejects[0]
        raise ValueError(f"{path}:{first.line_number}: {first.reason}")
    return result.posts


def write_rejects(rejects: Iterable[Reject], path: str | Path, source: str | None = None) -> None:
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        for r in rejects:
            rec = {"line_number": r.line_number, "reason": r.reason}
            if source is not None:
                rec["source"] = source
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
