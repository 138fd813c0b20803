"""Diffusion and engagement analytics over labeled users.

Covers the reply/retweet CCDFs disaggregated by group and scope, hashtag
majority partisanship, sentiment-volume breakdowns with pairwise difference
insets, sentiment-conditioned feature diagnostics, and the stratified
bot-population extrapolation from a top-activity labeled sample.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError, EmptyInput
from .ingest import KIND_REPLY, KIND_RETWEET, UserAggregate

GROUP_BOT = "bot"
GROUP_HUMAN = "human"
GROUPS = (GROUP_BOT, GROUP_HUMAN)

INTERACTION_REPLY = "reply"
INTERACTION_RETWEET = "retweet"
INTERACTION_KINDS = (INTERACTION_REPLY, INTERACTION_RETWEET)

SCOPE_WITHIN = "within"
SCOPE_ACROSS = "across"
SCOPE_TOTAL = "total"
SCOPES = (SCOPE_WITHIN, SCOPE_ACROSS, SCOPE_TOTAL)

FACTION_CLINTON = "clinton"
FACTION_TRUMP = "trump"
FACTION_NONE = "none"

TOP_HASHTAGS = 10
SENTIMENT_DIAGNOSTIC_RANGE = 3  # conditioned means restricted to |s| <= 3

SPLIT_LOW = "retweeted_le1"
SPLIT_HIGH = "retweeted_gt1"
SPLITS = (SPLIT_LOW, SPLIT_HIGH)


class InsufficientStrata(DataError):
    """The labeled sample covers no activity stratum."""


# ---------------------------------------------------------------------------
# CCDF


@dataclass(frozen=True)
class CcdfSeries:
    """P(X >= v) evaluated at the sorted distinct sample values."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        if not self.values:
            raise EmptyInput("CCDF of an empty sample is undefined")
        if any(a >= b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")
        if any(p <= 0 or p > 1 for p in self.probs):
            raise ValueError("probabilities must lie in (0, 1]")
        if any(a < b for a, b in zip(self.probs, self.probs[1:])):
            raise ValueError("probabilities must be non-increasing")
        if self.probs[0] != 1.0:
            raise ValueError("P(X >= min) must be 1")

    def as_dict(self) -> dict:
        return dict(zip(self.values, self.probs))


def ccdf(values: Sequence) -> CcdfSeries:
    """Empirical complementary CDF: p(v) = |{x : x >= v}| / n."""
    arr = np.sort(np.asarray(list(values), dtype=float))
    n = arr.size
    if n == 0:
        raise EmptyInput("CCDF of an empty sample is undefined")
    distinct, first_idx = np.unique(arr, return_index=True)
    probs = (n - first_idx) / n
    return CcdfSeries(values=tuple(distinct.tolist()), probs=tuple(probs.tolist()))


# ---------------------------------------------------------------------------
# Interaction matrix and per-group CCDFs


@dataclass
class GroupInteractionMatrix:
    """Reply/retweet edge totals between bot/human groups, plus the
    per-user initiation counts that feed the CCDFs."""

    edge_totals: Dict = field(default_factory=dict)      # (src, dst, kind) -> n
    per_user_counts: Dict = field(default_factory=dict)  # (group, kind, scope) -> {user: n}
    excluded_edges: int = 0

    def total(self, group: str, kind: str) -> int:
        return sum(
            n for (src, _dst, k), n in self.edge_totals.items()
            if src == group and k == kind
        )


_KIND_BY_RECORD = {KIND_REPLY: INTERACTION_REPLY, KIND_RETWEET: INTERACTION_RETWEET}


def build_interaction_matrix(records, labels: Mapping) -> GroupInteractionMatrix:
    """Count interaction edges where both endpoints carry a bot/human label.

    Edges with an unlabeled (or undecided) endpoint are excluded and
    counted.
    """
    matrix = GroupInteractionMatrix()
    edge_totals = Counter()
    per_user = defaultdict(Counter)
    excluded = 0
    for rec in records:
        kind = _KIND_BY_RECORD.get(rec.kind)
        if kind is None:
            continue
        src = labels.get(rec.author_id)
        dst = labels.get(rec.target_author_id)
        if src not in GROUPS or dst not in GROUPS:
            excluded += 1
            continue
        edge_totals[(src, dst, kind)] += 1
        scope = SCOPE_WITHIN if src == dst else SCOPE_ACROSS
        per_user[(src, kind, scope)][rec.author_id] += 1
        per_user[(src, kind, SCOPE_TOTAL)][rec.author_id] += 1
    matrix.edge_totals = dict(edge_totals)
    matrix.per_user_counts = {k: dict(v) for k, v in per_user.items()}
    matrix.excluded_edges = excluded
    return matrix


def interaction_ccdfs(records, labels: Mapping):
    """CCDF per (group, interaction kind, scope) of per-user counts.

    Returns (series, matrix); a key with no interacting users maps to None
    so empty panels stay visibly flagged.
    """
    matrix = build_interaction_matrix(records, labels)
    series = {}
    for group in GROUPS:
        for kind in INTERACTION_KINDS:
            for scope in SCOPES:
                counts = matrix.per_user_counts.get((group, kind, scope), {})
                key = (group, kind, scope)
                series[key] = ccdf(list(counts.values())) if counts else None
    return series, matrix


# ---------------------------------------------------------------------------
# Partisanship


@dataclass(frozen=True)
class FactionAssignment:
    faction: str
    clinton_matches: int
    trump_matches: int
    top_hashtags: tuple


def assign_faction(
    agg: UserAggregate,
    clinton_tags: Iterable[str],
    trump_tags: Iterable[str],
) -> FactionAssignment:
    """Majority vote over the user's top-10 hashtags.

    Ties at the tenth-place cut are resolved lexicographically (smallest tag
    included), so the assignment is independent of input order and of any
    hashtag outside the cut. A matched-count tie, or no matches at all,
    yields the "none" faction.
    """
    clinton = {t.lower().lstrip("#") for t in clinton_tags}
    trump = {t.lower().lstrip("#") for t in trump_tags}
    if clinton & trump:
        raise ConfigError(f"faction tag lists overlap: {sorted(clinton & trump)}")
    top = sorted(agg.hashtag_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    top_tags = tuple(tag for tag, _ in top[:TOP_HASHTAGS])
    c_matches = sum(1 for tag in top_tags if tag in clinton)
    t_matches = sum(1 for tag in top_tags if tag in trump)
    if c_matches > t_matches:
        faction = FACTION_CLINTON
    elif t_matches > c_matches:
        faction = FACTION_TRUMP
    else:
        faction = FACTION_NONE
    return FactionAssignment(
        faction=faction,
        clinton_matches=c_matches,
        trump_matches=t_matches,
        top_hashtags=top_tags,
    )


# ---------------------------------------------------------------------------
# Sentiment-volume breakdowns (per faction x group panel, two candidates)


def mentions_candidate(text: str, terms: Iterable[str]) -> bool:
    """A tweet mentions a candidate iff any configured term occurs in it
    (case-insensitive substring)."""
    lowered = text.lower()
    return any(term.lower() in lowered for term in terms)


def sentiment_volume_by_group(rows, candidate_terms: Mapping):
    """Tweet volumes per (faction, group, candidate, score) plus the
    per-panel absolute difference between the two candidates.

    ``rows`` yields (faction, group, s, text) per scored tweet; a tweet can
    mention both candidates and then counts for both.
    """
    candidates = sorted(candidate_terms)
    if len(candidates) != 2:
        raise ConfigError(f"need exactly two candidate term lists, got {candidates}")
    volumes = Counter()
    panels = set()
    for faction, group, s, text in rows:
        panels.add((faction, group))
        for cand in candidates:
            if mentions_candidate(text, candidate_terms[cand]):
                volumes[(faction, group, cand, s)] += 1
    table = {}
    for faction, group in panels:
        for cand in candidates:
            for s in range(-4, 5):
                table[(faction, group, cand, s)] = volumes.get((faction, group, cand, s), 0)
    differences = {}
    a, b = candidates
    for faction, group in panels:
        for s in range(-4, 5):
            differences[(faction, group, s)] = abs(
                table[(faction, group, a, s)] - table[(faction, group, b, s)]
            )
    return table, differences


# ---------------------------------------------------------------------------
# Sentiment-conditioned feature means


@dataclass(frozen=True)
class TweetFeatureRow:
    """One scored tweet joined with its author's aggregate features."""

    s: int
    retweet_count: int
    tweets_posted: float
    retweets_received: float
    friends: float
    followers: float


CONDITIONED_FEATURES = ("tweets_posted", "retweets_received", "friends", "followers")


def sentiment_conditioned_means(rows: Iterable[TweetFeatureRow], feature: str) -> dict:
    """Mean and standard error of an author feature per sentiment bucket.

    Buckets are (split, s) for s in -3..3, split by the tweet's retweet
    count (at most once vs more than once). SE is population-stddev / sqrt(n);
    empty buckets are emitted with n=0 and mean None.
    """
    if feature not in CONDITIONED_FEATURES:
        raise ConfigError(f"unknown feature {feature!r}, pick from {CONDITIONED_FEATURES}")
    buckets = defaultdict(list)
    for row in rows:
        if abs(row.s) > SENTIMENT_DIAGNOSTIC_RANGE:
            continue
        split = SPLIT_LOW if row.retweet_count <= 1 else SPLIT_HIGH
        buckets[(split, row.s)].append(getattr(row, feature))
    table = {}
    for split in SPLITS:
        for s in range(-SENTIMENT_DIAGNOSTIC_RANGE, SENTIMENT_DIAGNOSTIC_RANGE + 1):
            values = buckets.get((split, s), [])
            n = len(values)
            if n == 0:
                table[(split, s)] = {"mean": None, "se": None, "n": 0}
                continue
            arr = np.asarray(values, dtype=float)
            mean = float(arr.mean())
            se = float(arr.std(ddof=0) / math.sqrt(n))
            table[(split, s)] = {"mean": mean, "se": se, "n": n}
    return table


# ---------------------------------------------------------------------------
# Population extrapolation


@dataclass
class PopulationEstimate:
    bot_count: float
    bot_fraction: float
    bot_tweet_volume: float
    volume_fraction: float
    strata: list


def extrapolate_population(
    top_k_labels: Mapping,
    tweet_counts: Mapping,
    population_size: Optional[int] = None,
    total_tweets: Optional[float] = None,
    n_strata: int = 10,
) -> PopulationEstimate:
    """Stratified bot-population estimate from a top-activity sample.

    The population is split into ``n_strata`` near-equal activity strata
    (ascending tweet counts, author id as tie-break). Each sampled stratum
    contributes its observed bot rate (undecided labels count in the
    denominator only, keeping the estimate an "at least"); strata the sample
    misses inherit the lowest sampled stratum's rate as a floor. With one
    stratum this reduces exactly to the plain sample proportion.
    """
    if not tweet_counts:
        raise InsufficientStrata("population is empty")
    if n_strata < 1:
        raise ConfigError("n_strata must be >= 1")
    authors = sorted(tweet_counts, key=lambda a: (tweet_counts[a], a))
    n = len(authors)
    if population_size is not None and population_size != n:
        raise DataError(
            f"population_size {population_size} disagrees with {n} tweet counts"
        )
    population_size = n
    pop_tweets = float(sum(tweet_counts.values()))
    if total_tweets is not None and total_tweets != pop_tweets:
        raise DataError(
            f"total_tweets {total_tweets} disagrees with summed counts {pop_tweets}"
        )
    total_tweets = pop_tweets

    k = min(n_strata, n)
    bounds = [n * i // k for i in range(k + 1)]
    strata = []
    for i in range(k):
        members = authors[bounds[i]:bounds[i + 1]]
        sampled = [a for a in members if a in top_k_labels]
        bots = sum(1 for a in sampled if top_k_labels[a] == GROUP_BOT)
        strata.append({
            "stratum": i,
            "size": len(members),
            "tweets": float(sum(tweet_counts[a] for a in members)),
            "sampled": len(sampled),
            "sample_bots": bots,
            "rate": bots / len(sampled) if sampled else None,
            "floored": False,
        })
    sampled_rates = [(s["stratum"], s["rate"]) for s in strata if s["rate"] is not None]
    if not sampled_rates:
        raise InsufficientStrata("no activity stratum contains labeled users")
    floor_rate = sampled_rates[0][1]  # lowest sampled stratum
    bot_count = 0.0
    bot_tweets = 0.0
    for s in strata:
        if s["rate"] is None:
            s["rate"] = floor_rate
            s["floored"] = True
        bot_count += s["size"] * s["rate"]
        bot_tweets += s["tweets"] * s["rate"]
    return PopulationEstimate(
        bot_count=bot_count,
        bot_fraction=bot_count / population_size,
        bot_tweet_volume=bot_tweets,
        volume_fraction=bot_tweets / total_tweets if total_tweets else 0.0,
        strata=strata,
    )
