"""Text normalization and iterative spam-keyword filtering.

The filter mirrors a three-stage loop: rank keyword stems of the residual
corpus, intersect the top-N with an annotated spam-stem list (the file-based
stand-in for live annotators), move every residual tweet containing a
matched stem into the spam set, and repeat until the top-N is clean. Spam
keywords match on stems, so inflected variants ("movies", "movie") collapse
into one keyword.
"""

from __future__ import annotations

import csv
import hashlib
import json
import string
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from . import porter
from .errors import ConfigError

STEMMER_PORTER = "porter"
STEMMER_NONE = "none"

PUNCT_STRIP = "strip"
PUNCT_KEEP = "keep"

FREQ_TOKENS = "tokens"
FREQ_DOCUMENTS = "documents"

DEFAULT_TOP_N = 250

_PUNCT_TO_SPACE = str.maketrans({ch: " " for ch in string.punctuation})


@dataclass
class TokenPipelineConfig:
    """Normalization settings; stopwords are stored pre-lowercased."""

    stopwords: frozenset = frozenset()
    stemmer: str = STEMMER_PORTER
    punctuation: str = PUNCT_STRIP
    lowercase: bool = True

    def __post_init__(self):
        if self.stemmer not in (STEMMER_PORTER, STEMMER_NONE):
            raise ConfigError(f"unknown stemmer {self.stemmer!r}")
        if self.punctuation not in (PUNCT_STRIP, PUNCT_KEEP):
            raise ConfigError(f"unknown punctuation policy {self.punctuation!r}")
        self.stopwords = frozenset(w.lower() for w in self.stopwords)


def load_stopwords(path) -> frozenset:
    """Plain-text stopword list, one term per line, '#' comments allowed."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word.lower())
    return frozenset(words)


def normalize_text(text: str, config: Optional[TokenPipelineConfig] = None) -> list:
    """Lowercase, strip punctuation, tokenize, drop stopwords, then stem."""
    config = config or TokenPipelineConfig()
    if config.lowercase:
        text = text.lower()
    if config.punctuation == PUNCT_STRIP:
        text = text.translate(_PUNCT_TO_SPACE)
    tokens = [t for t in text.split() if t not in config.stopwords]
    if config.stemmer == STEMMER_PORTER:
        return [porter.stem(t) for t in tokens]
    return tokens


@dataclass
class KeywordRanking:
    """Stems with frequencies, descending; ties broken lexicographically."""

    entries: list = field(default_factory=list)  # [(stem, frequency), ...]

    def __post_init__(self):
        freqs = [f for _, f in self.entries]
        if any(a < b for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be non-increasing")
        stems = [s for s, _ in self.entries]
        if len(set(stems)) != len(stems):
            raise ValueError("duplicate stems in ranking")

    def top(self, n: int) -> list:
        return self.entries[:n]


def _count_stems(stem_lists: Iterable[list], mode: str) -> Counter:
    counts: Counter = Counter()
    if mode == FREQ_TOKENS:
        for stems in stem_lists:
            counts.update(stems)
    elif mode == FREQ_DOCUMENTS:
        for stems in stem_lists:
            counts.update(set(stems))
    else:
        raise ConfigError(f"unknown frequency mode {mode!r}")
    return counts


def rank_keywords(
    tweets: Iterable[str],
    config: Optional[TokenPipelineConfig] = None,
    mode: str = FREQ_TOKENS,
) -> KeywordRanking:
    """Rank stems of a corpus by frequency (token or document counts)."""
    counts = _count_stems((normalize_text(t, config) for t in tweets), mode)
    entries = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return KeywordRanking(entries=entries)


@dataclass
class SpamPartition:
    """Output of the iterative filter: a disjoint cover of the corpus."""

    spam_keywords: set = field(default_factory=set)
    spam_tweet_ids: set = field(default_factory=set)
    residual_tweet_ids: set = field(default_factory=set)
    iterations: list = field(default_factory=list)

    @property
    def removal_rounds(self) -> int:
        return sum(1 for it in self.iterations if it["keywords_removed"])

    def as_dict(self) -> dict:
        return {
            "spam_keywords": sorted(self.spam_keywords),
            "spam_tweets": len(self.spam_tweet_ids),
            "residual_tweets": len(self.residual_tweet_ids),
            "removal_rounds": self.removal_rounds,
            "iterations": self.iterations,
        }


def _top_hash(top: list) -> str:
    payload = json.dumps(top, sort_keys=True).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def run_iterative_filter(
    tweets,
    annotations: Iterable[str],
    config: Optional[TokenPipelineConfig] = None,
    top_n: int = DEFAULT_TOP_N,
    freq_mode: str = FREQ_TOKENS,
) -> SpamPartition:
    """Partition tweets into spam and residual sets by annotated keywords.

    ``tweets`` is a mapping tweet_id -> text (or an iterable of id/text
    pairs); ``annotations`` is the adjudicated set of spam stems. Each round
    ranks the residual, intersects the top ``top_n`` stems with the
    annotations, and moves matching tweets; the loop stops on the first
    clean top list. The terminating check is recorded as a final audit row
    with nothing removed.
    """
    items = dict(tweets.items() if isinstance(tweets, Mapping) else tweets)
    config = config or TokenPipelineConfig()
    annotated = {s for s in annotations}
    stems_by_tweet = {tid: normalize_text(text, config) for tid, text in items.items()}
    stem_sets = {tid: frozenset(stems) for tid, stems in stems_by_tweet.items()}

    residual = set(items)
    spam: set = set()
    spam_keywords: set = set()
    iterations: list = []
    round_no = 0
    while True:
        round_no += 1
        counts = _count_stems((stems_by_tweet[tid] for tid in residual), freq_mode)
        ranking = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        top = ranking[:top_n]
        matched = sorted({stem for stem, _ in top} & annotated)
        moved = set()
        if matched:
            matched_set = set(matched)
            moved = {tid for tid in residual if stem_sets[tid] & matched_set}
            residual -= moved
            spam |= moved
            spam_keywords |= matched_set
        iterations.append({
            "round": round_no,
            "top_hash": _top_hash(top),
            "top_size": len(top),
            "keywords_removed": matched,
            "tweets_moved": len(moved),
            "spam_total": len(spam),
            "residual_total": len(residual),
        })
        if not matched:
            break
    return SpamPartition(
        spam_keywords=spam_keywords,
        spam_tweet_ids=spam,
        residual_tweet_ids=residual,
        iterations=iterations,
    )


def active_spammers(partition: SpamPartition, tweet_authors: Mapping) -> set:
    """Users with two or more tweets in the spam set.

    ``tweet_authors`` maps tweet_id -> author_id for at least every spam
    tweet.
    """
    per_user = Counter(tweet_authors[tid] for tid in partition.spam_tweet_ids)
    return {author for author, n in per_user.items() if n >= 2}


# ---------------------------------------------------------------------------
# Annotation files: CSV rows (stem, annotator_id, is_spam). A stem counts as
# spam only when every annotator present in the files flagged it (the
# conservative agreement rule).


def load_annotations(paths) -> set:
    votes = defaultdict(dict)  # stem -> {annotator: is_spam}
    annotators = set()
    for path in paths:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"stem", "annotator_id", "is_spam"}
            if reader.fieldnames is None or not required <= set(reader.fieldnames):
                raise ConfigError(
                    f"annotation file {path} must have columns {sorted(required)}"
                )
            for row in reader:
                stem = row["stem"].strip().lower()
                annotator = row["annotator_id"].strip()
                flag = row["is_spam"].strip().lower() in ("1", "true", "yes")
                votes[stem][annotator] = flag
                annotators.add(annotator)
    return {
        stem
        for stem, by in votes.items()
        if set(by) == annotators and all(by.values())
    }
