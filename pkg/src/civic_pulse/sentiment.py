"""Lexicon- and rule-based sentiment scoring (VADER-style).

Each whitespace token gets a valence from the lexicon, adjusted by the
surrounding context (boosters, negations, capitalization, idioms, "but"
clauses). The adjusted valences are summed, amplified by trailing
punctuation, and squashed into a compound score in [-1, 1].
"""

from __future__ import annotations

import enum
import math
import string
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from . import constants as C


class LexiconError(ValueError):
    """Malformed or out-of-range lexicon data."""


class Label(str, enum.Enum):
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    POSITIVE = "Positive"


@dataclass(frozen=True)
class Lexicon:
    valence: Mapping[str, float]
    boosters: Mapping[str, float]
    negators: frozenset[str]
    idioms: Mapping[str, float]
    emoji: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.valence or not self.boosters or not self.negators or not self.idioms:
            raise LexiconError("lexicon tables must be non-empty")
        for word, v in self.valence.items():
            if not -C.VALENCE_LIMIT <= v <= C.VALENCE_LIMIT:
                raise LexiconError(f"valence of {word!r} out of range: {v}")
        for phrase, inc in self.boosters.items():
            if not -C.BOOSTER_LIMIT <= inc <= C.BOOSTER_LIMIT:
                raise LexiconError(f"booster increment of {phrase!r} out of range: {inc}")

    def negated(self, sign: float = -1.0) -> "Lexicon":
        """Copy with every valence (and idiom override) multiplied by ``sign``."""
        return Lexicon(
            valence={w: sign * v for w, v in self.valence.items()},
            boosters=self.boosters,
            negators=self.negators,
            idioms={p: sign * v for p, v in self.idioms.items()},
            emoji=self.emoji,
        )


@dataclass(frozen=True)
class SentimentResult:
    neg: float
    neu: float
    pos: float
    compound: float
    label: Label

    def to_record(self) -> dict:
        return {
            "neg": self.neg,
            "neu": self.neu,
            "pos": self.pos,
            "compound": self.compound,
            "label": self.label.value,
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "SentimentResult":
        return cls(rec["neg"], rec["neu"], rec["pos"], rec["compound"], Label(rec["label"]))


NEUTRAL_RESULT = SentimentResult(0.0, 1.0, 0.0, 0.0, Label.NEUTRAL)


# ---------------------------------------------------------------- loading


def _data_file(name: str):
    return resources.files("civic_pulse") / "data" / name


def _read_lines(src) -> list[tuple[int, str]]:
    text = src.read_text(encoding="utf-8")
    return [(n, line) for n, line in enumerate(text.splitlines(), start=1)]


def _read_valence_table(src, limit: float, what: str) -> dict[str, float]:
    table: dict[str, float] = {}
    for lineno, line in _read_lines(src):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\r").split("\t")
        if len(parts) < 2:
            raise LexiconError(f"{src}:{lineno}: expected '<token>\\t<value>'")
        try:
            value = float(parts[1])
        except ValueError:
            raise LexiconError(f"{src}:{lineno}: bad {what} {parts[1]!r}") from None
        if not -limit <= value <= limit:
            raise LexiconError(f"{src}:{lineno}: {what} {value} outside [-{limit}, {limit}]")
        table[parts[0].strip()] = value
    return table


def load_lexicon(
    path: str | Path | None = None,
    *,
    boosters: str | Path | None = None,
    negators: str | Path | None = None,
    idioms: str | Path | None = None,
    emoji: str | Path | None = None,
) -> Lexicon:
    """Load a token<TAB>mean_valence lexicon plus its companion rule tables.

    Companion tables default to the bundled ones. Any parse failure or
    out-of-range value raises :class:`LexiconError` naming the line.
    """
    src = _data_file("vader_lexicon.txt") if path is None else Path(path)
    valence = _read_valence_table(src, C.VALENCE_LIMIT, "valence")
    if not valence:
        raise LexiconError(f"{src}: empty lexicon")

    booster_src = _data_file("boosters.tsv") if boosters is None else Path(boosters)
    booster_table = _read_valence_table(booster_src, C.BOOSTER_LIMIT, "booster increment")

    negator_src = _data_file("negators.txt") if negators is None else Path(negators)
    negator_set = frozenset(
        line.strip().lower()
        for _, line in _read_lines(negator_src)
        if line.strip() and not line.startswith("#")
    )

    idiom_src = _data_file("idioms.tsv") if idioms is None else Path(idioms)
    idiom_table = _read_valence_table(idiom_src, C.VALENCE_LIMIT, "idiom valence")

    emoji_src = _data_file("emoji_utf8_lexicon.txt") if emoji is None else Path(emoji)
    emoji_table = {}
    for lineno, line in _read_lines(emoji_src):
        parts = line.split("\t")
        if len(parts) < 2:
            raise LexiconError(f"{emoji_src}:{lineno}: expected '<emoji>\\t<description>'")
        emoji_table[parts[0]] = parts[1]

    return Lexicon(valence, booster_table, negator_set, idiom_table, emoji_table)


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    return load_lexicon()


# ---------------------------------------------------------------- scoring


def classify(compound: float) -> Label:
    if not -1.0 <= compound <= 1.0:
        raise ValueError(f"compound score {compound!r} outside [-1, 1]")
    if compound <= C.NEGATIVE_THRESHOLD:
        return Label.NEGATIVE
    if compound >= C.POSITIVE_THRESHOLD:
        return Label.POSITIVE
    return Label.NEUTRAL


def normalize(score: float, alpha: float = C.NORMALIZATION_ALPHA) -> float:
    norm = score / math.sqrt(score * score + alpha)
    return max(-1.0, min(1.0, norm))


def _replace_emoji(text: str, emoji: Mapping[str, str]) -> str:
    if not emoji:
        return text
    out = []
    prev_space = True
    for ch in text:
        desc = emoji.get(ch)
        if desc is None:
            out.append(ch)
            prev_space = ch == " "
        else:
            if not prev_space:
                out.append(" ")
            out.append(desc)
            prev_space = False
    return "".join(out)


def tokenize(text: str) -> list[str]:
    """Whitespace tokens with edge punctuation removed.

    A token that would shrink to two characters or fewer is kept verbatim,
    which preserves emoticons such as ``:)``.
    """
    tokens = []
    for tok in text.split():
        stripped = tok.strip(string.punctuation)
        tokens.append(tok if len(stripped) <= 2 else stripped)
    return tokens


def _has_mixed_caps(words: Sequence[str]) -> bool:
    n_caps = sum(1 for w in words if w.isupper())
    return 0 < len(words) - n_caps < len(words)


class _Sentence:
    """Per-text scoring state."""

    def __init__(self, words: list[str], lexicon: Lexicon):
        self.words = words
        self.lower = [w.lower() for w in words]
        self.lex = lexicon
        self.mixed_caps = _has_mixed_caps(words)

    def _is_negator(self, word: str) -> bool:
        return word in self.lex.negators or "n't" in word

    def _booster_scalar(self, i: int, valence: float) -> float:
        inc = self.lex.boosters.get(self.lower[i])
        if inc is None:
            return 0.0
        if valence < 0:
            inc = -inc
        if self.words[i].isupper() and self.mixed_caps:
            inc += C.CAPS_INCREMENT if valence > 0 else -C.CAPS_INCREMENT
        return inc

    def _negation(self, v: float, i: int, dist: int) -> float:
        w = self.lower
        if dist == 1:
            if self._is_negator(w[i - 1]):
                v *= C.NEGATION_SCALAR
        elif dist == 2:
            if w[i - 2] == "never" and w[i - 1] in ("so", "this"):
                v *= C.NEVER_SO_SCALAR
            elif w[i - 2] == "without" and w[i - 1] == "doubt":
                pass
            elif self._is_negator(w[i - 2]):
                v *= C.NEGATION_SCALAR
        else:
            # the reference rule also fires on a bare "so"/"this" right before the word
            if (w[i - 3] == "never" and w[i - 2] in ("so", "this")) or w[i - 1] in ("so", "this"):
                v *= C.NEVER_SO_SCALAR
            elif w[i - 3] == "without" and "doubt" in (w[i - 2], w[i - 1]):
                pass
            elif self._is_negator(w[i - 3]):
                v *= C.NEGATION_SCALAR
        return v

    def _idioms(self, v: float, i: int) -> float:
        w = self.lower
        idioms = self.lex.idioms
        back = [
            f"{w[i - 1]} {w[i]}",
            f"{w[i - 2]} {w[i - 1]} {w[i]}",
            f"{w[i - 2]} {w[i - 1]}",
            f"{w[i - 3]} {w[i - 2]} {w[i - 1]}",
            f"{w[i - 3]} {w[i - 2]}",
        ]
        for seq in back:
            if seq in idioms:
                v = idioms[seq]
                break
        if i + 1 < len(w) and f"{w[i]} {w[i + 1]}" in idioms:
            v = idioms[f"{w[i]} {w[i + 1]}"]
        if i + 2 < len(w) and f"{w[i]} {w[i + 1]} {w[i + 2]}" in idioms:
            v = idioms[f"{w[i]} {w[i + 1]} {w[i + 2]}"]
        # multiword dampeners such as "kind of" just before the word
        for seq in (back[3], back[4], back[2]):
            if seq in self.lex.boosters:
                v += self.lex.boosters[seq]
        return v

    def word_valence(self, i: int) -> float:
        w, lex = self.lower, self.lex.valence
        base = lex.get(w[i])
        if base is None:
            return 0.0
        v = base
        # "no" directly before a sentiment word acts as a negator, not as a word
        if w[i] == "no" and i + 1 < len(w) and w[i + 1] in lex:
            v = 0.0
        if (
            (i >= 1 and w[i - 1] == "no")
            or (i >= 2 and w[i - 2] == "no")
            or (i >= 3 and w[i - 3] == "no" and w[i - 1] in ("or", "nor"))
        ):
            v = base * C.NEGATION_SCALAR

        if self.words[i].isupper() and self.mixed_caps:
            v += C.CAPS_INCREMENT if v > 0 else -C.CAPS_INCREMENT

        for dist in (1, 2, 3):
            if i < dist or w[i - dist] in lex:
                continue
            s = self._booster_scalar(i - dist, v)
            if s != 0:
                s *= C.BOOSTER_DECAY[dist]
            v += s
            v = self._negation(v, i, dist)
            if dist == 3:
                v = self._idioms(v, i)

        if i >= 1 and w[i - 1] == "least" and "least" not in lex:
            if not (i >= 2 and w[i - 2] in ("at", "very")):
                v *= C.NEGATION_SCALAR
        return v

    def valences(self) -> list[float]:
        out = []
        n = len(self.lower)
        for i, word in enumerate(self.lower):
            if word in self.lex.boosters or (word == "kind" and i + 1 < n and self.lower[i + 1] == "of"):
                out.append(0.0)
            else:
                out.append(self.word_valence(i))
        if "but" in self.lower:
            pivot = self.lower.index("but")
            out = [
                v * C.BUT_BEFORE_WEIGHT if k < pivot else v * C.BUT_AFTER_WEIGHT if k > pivot else v
                for k, v in enumerate(out)
            ]
        return out


def punctuation_emphasis(text: str) -> float:
    n_excl = min(text.count("!"), C.EXCLAMATION_MAX)
    amp = n_excl * C.EXCLAMATION_INCREMENT
    n_q = text.count("?")
    if n_q > 1:
        amp += n_q * C.QUESTION_INCREMENT if n_q <= 3 else C.QUESTION_CAP
    return amp


def _summarize(valences: list[float], text: str) -> SentimentResult:
    total = float(sum(valences))
    emphasis = punctuation_emphasis(text)
    if total > 0:
        total += emphasis
    elif total < 0:
        total -= emphasis
    compound = normalize(total)

    # +/-1 per word keeps neutral words (counted as 1) commensurable
    pos_mass = sum(v + 1 for v in valences if v > 0)
    neg_mass = sum(v - 1 for v in valences if v < 0)
    n_neutral = sum(1 for v in valences if v == 0)
    if pos_mass > abs(neg_mass):
        pos_mass += emphasis
    elif pos_mass < abs(neg_mass):
        neg_mass -= emphasis
    denom = pos_mass + abs(neg_mass) + n_neutral
    return SentimentResult(
        neg=abs(neg_mass / denom),
        neu=abs(n_neutral / denom),
        pos=abs(pos_mass / denom),
        compound=compound,
        label=classify(compound),
    )


def score_text(text: str, lexicon: Lexicon | None = None) -> SentimentResult:
    """Score raw (unpreprocessed) text.

    Text without any tokens scores as fully neutral (``neu=1``).
    """
    lex = default_lexicon() if lexicon is None else lexicon
    text = _replace_emoji(text, lex.emoji).strip()
    words = tokenize(text)
    if not words:
        return NEUTRAL_RESULT
    return _summarize(_Sentence(words, lex).valences(), text)
