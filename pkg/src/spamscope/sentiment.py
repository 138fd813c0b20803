"""Lexicon sentiment scoring with negation, booster and emoticon rules.

Each tweet gets a positive polarity ``pos`` and a negative polarity ``neg``,
both in 1..5 (1 = neutral), and a scalar score ``s = pos - neg`` in -4..4.
Polarities are driven by the strongest matching term per direction, after:

  tokenize -> negation (a negator flips the first sentiment token within the
  next two tokens) -> booster (the token right before a sentiment token adds
  its delta to the magnitude) -> per-polarity max -> clamp into range.

Unknown tokens contribute nothing; a token with a run of three or more equal
letters is retried with the run collapsed ("loooove" -> "love") before being
given up on. Scoring is a pure function of (text, lexicon).
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ConfigError, DataError

NEGATION_WINDOW = 2  # tokens a negator reaches past itself

NEGATIVE = "negative"
NEUTRAL = "neutral"
POSITIVE = "positive"


class RangeError(DataError):
    """Sentiment score outside the representable -4..4 range."""


@dataclass(frozen=True)
class SentimentScore:
    pos: int
    neg: int

    def __post_init__(self):
        if not (1 <= self.pos <= 5 and 1 <= self.neg <= 5):
            raise RangeError(f"polarities out of range: pos={self.pos} neg={self.neg}")

    @property
    def s(self) -> int:
        return self.pos - self.neg


@dataclass
class SentimentLexicon:
    """Term strengths plus the rule words that modify them.

    ``term_polarity`` maps a word to a signed strength in -4..4 (never 0);
    the final polarity is ``1 + magnitude`` after rules and clamping.
    Negators take precedence over boosters, boosters over terms, when a word
    appears in more than one table. Emoticons are matched on the raw token.
    """

    term_polarity: dict = field(default_factory=dict)
    boosters: dict = field(default_factory=dict)
    negators: set = field(default_factory=set)
    emoticon_polarity: dict = field(default_factory=dict)

    def __post_init__(self):
        for term, value in {**self.term_polarity, **self.emoticon_polarity}.items():
            if not isinstance(value, int) or value == 0 or abs(value) > 4:
                raise ConfigError(
                    f"lexicon strength for {term!r} must be a non-zero integer in -4..4"
                )


_STRIP_CHARS = string.punctuation + string.whitespace


def _collapse_runs(token: str, keep: int) -> str:
    out = []
    prev = ""
    run = 0
    for ch in token:
        if ch == prev:
            run += 1
        else:
            prev, run = ch, 1
        if run <= keep:
            out.append(ch)
    return "".join(out)


def _term_value(token: str, lexicon: SentimentLexicon):
    table = lexicon.term_polarity
    if token in table:
        return table[token]
    if any(a == b == c for a, b, c in zip(token, token[1:], token[2:])):
        for keep in (2, 1):
            collapsed = _collapse_runs(token, keep)
            if collapsed in table:
                return table[collapsed]
    return None


def tokenize(text: str) -> list:
    """Whitespace tokens, lowercased with surrounding punctuation stripped.

    The raw (unstripped) form is kept alongside so emoticons survive.
    """
    out = []
    for raw in text.split():
        out.append((raw, raw.strip(_STRIP_CHARS).lower()))
    return out


def score_tweet(text: str, lexicon: SentimentLexicon) -> SentimentScore:
    """Score one text; deterministic for a fixed lexicon."""
    tokens = tokenize(text)
    pos_strength = 0
    neg_strength = 0
    pending_negators = []  # positions of negators not yet consumed
    booster_delta = None  # delta if the previous token was a booster

    for i, (raw, word) in enumerate(tokens):
        value = lexicon.emoticon_polarity.get(raw)
        if value is None and word:
            if word in lexicon.negators:
                pending_negators.append(i)
                booster_delta = None
                continue
            if word in lexicon.boosters:
                booster_delta = lexicon.boosters[word]
                continue
            value = _term_value(word, lexicon)
        if value is None:
            booster_delta = None
            continue

        magnitude = abs(value)
        if booster_delta is not None:
            magnitude = max(0, magnitude + booster_delta)
            booster_delta = None
        sign = 1 if value > 0 else -1
        live = [j for j in pending_negators if i - j <= NEGATION_WINDOW]
        if len(live) % 2 == 1:
            sign = -sign
        pending_negators = []  # in-window negators consumed, stale ones expire
        if magnitude == 0:
            continue
        if sign > 0:
            pos_strength = max(pos_strength, magnitude)
        else:
            neg_strength = max(neg_strength, magnitude)

    return SentimentScore(pos=1 + min(4, pos_strength), neg=1 + min(4, neg_strength))


def classify(s: int) -> str:
    """Map a scalar score onto {negative, neutral, positive}."""
    if not -4 <= s <= 4:
        raise RangeError(f"sentiment score {s} outside -4..4")
    if s < 0:
        return NEGATIVE
    if s > 0:
        return POSITIVE
    return NEUTRAL


def sentiment_histogram(scores: Iterable[SentimentScore]) -> dict:
    """Counts per scalar score, with all nine -4..4 buckets present."""
    counts = Counter()
    for score in scores:
        counts[score.s] += 1
    return {s: counts.get(s, 0) for s in range(-4, 5)}


# ---------------------------------------------------------------------------
# Lexicon file format: sections of TAB-separated term/value lines
#
#   [terms]       word<TAB>strength      strength in -4..4, not 0
#   [boosters]    word<TAB>delta         delta added to the next term's magnitude
#   [negators]    word                   one per line
#   [emoticons]   emoticon<TAB>strength  matched against the raw token
#
# Blank lines and lines starting with '#' are ignored.

_SECTIONS = ("terms", "boosters", "negators", "emoticons")


def load_lexicon(path) -> SentimentLexicon:
    terms: dict = {}
    boosters: dict = {}
    negators: set = set()
    emoticons: dict = {}
    section = "terms"
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read lexicon {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            if line.startswith("[") and line.rstrip().endswith("]"):
                section = line.strip()[1:-1].strip().lower()
                if section not in _SECTIONS:
                    raise ConfigError(f"{path}:{lineno}: unknown lexicon section [{section}]")
                continue
            parts = line.split("\t")
            token = parts[0].strip()
            if not token:
                raise ConfigError(f"{path}:{lineno}: empty term")
            if section == "negators":
                negators.add(token.lower())
                continue
            if len(parts) < 2:
                raise ConfigError(f"{path}:{lineno}: expected term<TAB>value")
            try:
                value = int(parts[1].strip())
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value {parts[1]!r}") from exc
            if section == "terms":
                terms[token.lower()] = value
            elif section == "boosters":
                boosters[token.lower()] = value
            else:
                emoticons[token] = value
    return SentimentLexicon(
        term_polarity=terms,
        boosters=boosters,
        negators=negators,
        emoticon_polarity=emoticons,
    )


def save_lexicon(lexicon: SentimentLexicon, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("[terms]\n")
        for term, value in sorted(lexicon.term_polarity.items()):
            fh.write(f"{term}\t{value}\n")
        fh.write("[boosters]\n")
        for term, value in sorted(lexicon.boosters.items()):
            fh.write(f"{term}\t{value}\n")
        fh.write("[negators]\n")
        for term in sorted(lexicon.negators):
            fh.write(f"{term}\n")
        fh.write("[emoticons]\n")
        for term, value in sorted(lexicon.emoticon_polarity.items()):
            fh.write(f"{term}\t{value}\n")
