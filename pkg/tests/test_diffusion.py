"""Diffusion analytics: CCDFs, factions, sentiment tables, extrapolation."""

import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from spamscope.errors import ConfigError, DataError, EmptyInput
from spamscope.diffusion import (
    CcdfSeries,
    InsufficientStrata,
    TweetFeatureRow,
    assign_faction,
    build_interaction_matrix,
    ccdf,
    extrapolate_population,
    interaction_ccdfs,
    mentions_candidate,
    sentiment_conditioned_means,
    sentiment_volume_by_group,
)
from spamscope.ingest import TweetRecord, UserAggregate


# ---------------------------------------------------------------------------
# ccdf


def _ccdf_oracle(values):
    # O(n^2) counting oracle
    n = len(values)
    return {v: sum(1 for x in values if x >= v) / n for v in sorted(set(values))}


def test_ccdf_hand_example():
    series = ccdf([1, 1, 2, 3])
    assert series.as_dict() == {1: 1.0, 2: 0.5, 3: 0.25}


def test_ccdf_constant_sample():
    assert ccdf([7, 7, 7]).as_dict() == {7: 1.0}


def test_ccdf_empty_input():
    with pytest.raises(EmptyInput):
        ccdf([])


def test_ccdf_matches_counting_oracle(rng):
    values = [rng.randrange(50) for _ in range(1000)]
    assert ccdf(values).as_dict() == _ccdf_oracle(values)


@given(st.lists(st.integers(min_value=0, max_value=30), min_size=1, max_size=200))
def test_ccdf_monotone_and_anchored(values):
    series = ccdf(values)
    assert series.probs[0] == 1.0
    assert all(a >= b for a, b in zip(series.probs, series.probs[1:]))
    assert all(0 < p <= 1 for p in series.probs)
    assert series.as_dict() == _ccdf_oracle(values)


def test_ccdf_series_invariants_enforced():
    with pytest.raises(ValueError):
        CcdfSeries(values=(1, 2), probs=(0.5, 1.0))
    with pytest.raises(ValueError):
        CcdfSeries(values=(2, 1), probs=(1.0, 0.5))
    with pytest.raises(EmptyInput):
        CcdfSeries(values=(), probs=())


# ---------------------------------------------------------------------------
# interaction ccdfs


def _edge(i, src, dst, kind):
    return TweetRecord(
        tweet_id=f"t{i}", author_id=src, created_at=1_440_000_000 + i,
        text="x", hashtags=[], kind=kind, target_author_id=dst,
    )


LABELS = {"b1": "bot", "b2": "bot", "h1": "human", "h2": "human", "h3": "human"}


def _fixture_edges():
    rows = [
        ("b1", "b2", "reply"), ("b1", "h1", "reply"), ("b1", "b2", "reply"),
        ("h1", "h2", "reply"), ("h2", "h1", "reply"), ("h2", "h1", "reply"),
        ("h3", "b1", "reply"),
        ("h1", "x1", "reply"), ("x1", "h1", "reply"),  # unlabeled endpoints
        ("b2", "h1", "retweet"), ("h1", "b1", "retweet"), ("h2", "h3", "retweet"),
    ]
    return [_edge(i, s, d, k) for i, (s, d, k) in enumerate(rows)]


def test_matrix_matches_manual_edge_enumeration():
    matrix = build_interaction_matrix(_fixture_edges(), LABELS)
    assert matrix.edge_totals == {
        ("bot", "bot", "reply"): 2,
        ("bot", "human", "reply"): 1,
        ("human", "human", "reply"): 3,
        ("human", "bot", "reply"): 1,
        ("bot", "human", "retweet"): 1,
        ("human", "bot", "retweet"): 1,
        ("human", "human", "retweet"): 1,
    }
    assert matrix.excluded_edges == 2
    assert matrix.per_user_counts[("bot", "reply", "within")] == {"b1": 2}
    assert matrix.per_user_counts[("human", "reply", "within")] == {"h1": 1, "h2": 2}
    assert matrix.per_user_counts[("human", "reply", "total")] == {"h1": 1, "h2": 2, "h3": 1}
    # totals = within + across, per source group and kind
    for group in ("bot", "human"):
        for kind in ("reply", "retweet"):
            within = sum(matrix.per_user_counts.get((group, kind, "within"), {}).values())
            across = sum(matrix.per_user_counts.get((group, kind, "across"), {}).values())
            assert matrix.total(group, kind) == within + across


def test_interaction_ccdfs_from_fixture():
    series, matrix = interaction_ccdfs(_fixture_edges(), LABELS)
    assert series[("human", "reply", "total")].as_dict() == {1: 1.0, 2: 1 / 3}
    assert series[("bot", "reply", "within")].as_dict() == {2: 1.0}
    assert series[("bot", "retweet", "within")] is None  # flagged empty


def test_all_bot_to_bot_interactions():
    edges = [_edge(i, "b1", "b2", "reply") for i in range(5)]
    series, matrix = interaction_ccdfs(edges, LABELS)
    for scope in ("within", "across", "total"):
        assert series[("human", "reply", scope)] is None
    assert series[("bot", "reply", "within")].as_dict() == \
        series[("bot", "reply", "total")].as_dict()
    assert series[("bot", "reply", "across")] is None


# ---------------------------------------------------------------------------
# faction assignment


CLINTON_TAGS = ["hillaryclinton", "imwithher", "nevertrump", "hillary"]
TRUMP_TAGS = ["donaldtrump", "trump2016", "neverhillary", "trumppence16", "trump"]


def _agg_with_tags(counts):
    agg = UserAggregate(author_id="u")
    agg.tweets_posted = 1
    agg.hashtag_counts = Counter(counts)
    return agg


def test_majority_rule():
    agg = _agg_with_tags({"trump": 5, "trump2016": 4, "neverhillary": 3, "imwithher": 2})
    out = assign_faction(agg, CLINTON_TAGS, TRUMP_TAGS)
    assert out.faction == "trump"
    assert out.trump_matches == 3
    assert out.clinton_matches == 1


def test_no_faction_tags_in_top():
    agg = _agg_with_tags({"vape": 5, "news": 3})
    assert assign_faction(agg, CLINTON_TAGS, TRUMP_TAGS).faction == "none"


def test_matched_count_tie_is_none():
    agg = _agg_with_tags({"trump": 5, "hillary": 5})
    assert assign_faction(agg, CLINTON_TAGS, TRUMP_TAGS).faction == "none"


def test_top10_cut_and_lexicographic_tie():
    # ten filler tags with count 2 occupy the cut; the faction tag with
    # count 2 enters only by lexicographic order
    filler = {f"zz{i:02d}": 2 for i in range(10)}
    agg = _agg_with_tags({**filler, "hillary": 2})
    out = assign_faction(agg, CLINTON_TAGS, TRUMP_TAGS)
    assert out.faction == "clinton"  # "hillary" < "zz.." sorts into the cut
    assert "hillary" in out.top_hashtags


def test_counts_outside_top10_do_not_matter():
    base = {f"tag{i}": 100 - i for i in range(10)}
    agg1 = _agg_with_tags({**base, "trump": 1})
    agg2 = _agg_with_tags({**base, "trump": 1, "extra1": 1, "extra2": 1})
    out1 = assign_faction(agg1, CLINTON_TAGS, TRUMP_TAGS)
    out2 = assign_faction(agg2, CLINTON_TAGS, TRUMP_TAGS)
    assert out1.faction == out2.faction == "none"
    assert out1.top_hashtags == out2.top_hashtags


def test_hashtag_order_invariance():
    items = [("trump", 3), ("maga", 2), ("hillary", 1)]
    a = assign_faction(_agg_with_tags(dict(items)), CLINTON_TAGS, TRUMP_TAGS)
    b = assign_faction(_agg_with_tags(dict(reversed(items))), CLINTON_TAGS, TRUMP_TAGS)
    assert a == b


def test_overlapping_tag_lists_rejected():
    with pytest.raises(ConfigError):
        assign_faction(_agg_with_tags({}), ["shared"], ["shared"])


# ---------------------------------------------------------------------------
# sentiment volumes


TERMS = {"clinton": ["hillary", "imwithher"], "trump": ["donaldtrump", "maga"]}


def test_mentions_candidate_substring_rule():
    assert mentions_candidate("I am #ImWithHer tonight", TERMS["clinton"])
    assert not mentions_candidate("nothing here", TERMS["clinton"])


def test_symmetric_volumes_zero_difference():
    rows = []
    for s in (-2, 0, 3):
        rows.append(("trump", "bot", s, "go donaldtrump"))
        rows.append(("trump", "bot", s, "go hillary"))
    table, diffs = sentiment_volume_by_group(rows, TERMS)
    assert all(d == 0 for d in diffs.values())
    assert table[("trump", "bot", "trump", 3)] == 1
    assert table[("trump", "bot", "clinton", 3)] == 1


def test_volumes_match_brute_force_group_by(rng):
    factions = ["clinton", "trump", "none"]
    groups = ["bot", "human"]
    texts = ["love hillary", "maga now", "donaldtrump and hillary", "nothing"]
    rows = [
        (rng.choice(factions), rng.choice(groups), rng.randrange(-4, 5), rng.choice(texts))
        for _ in range(2000)
    ]
    table, diffs = sentiment_volume_by_group(rows, TERMS)
    # brute force: independent nested counting
    oracle = Counter()
    for faction, group, s, text in rows:
        if "hillary" in text or "imwithher" in text:
            oracle[(faction, group, "clinton", s)] += 1
        if "donaldtrump" in text or "maga" in text:
            oracle[(faction, group, "trump", s)] += 1
    for key, count in oracle.items():
        assert table[key] == count
    for (faction, group, s), d in diffs.items():
        expected = abs(
            oracle.get((faction, group, "clinton", s), 0)
            - oracle.get((faction, group, "trump", s), 0)
        )
        assert d == expected


def test_two_candidate_lists_required():
    with pytest.raises(ConfigError):
        sentiment_volume_by_group([], {"solo": ["x"]})


# ---------------------------------------------------------------------------
# conditioned means


def _row(s, rc, **features):
    base = dict(tweets_posted=0.0, retweets_received=0.0, friends=0.0, followers=0.0)
    base.update(features)
    return TweetFeatureRow(s=s, retweet_count=rc, **base)


def test_single_row_bucket_has_zero_se():
    table = sentiment_conditioned_means([_row(3, 0, tweets_posted=92_000.0)], "tweets_posted")
    cell = table[("retweeted_le1", 3)]
    assert cell == {"mean": 92_000.0, "se": 0.0, "n": 1}


def test_spreadsheet_oracle_fixture():
    rows = [
        _row(0, 0, friends=10.0), _row(0, 1, friends=20.0), _row(0, 5, friends=60.0),
        _row(-2, 2, friends=30.0), _row(-2, 9, friends=50.0),
    ]
    table = sentiment_conditioned_means(rows, "friends")
    low0 = table[("retweeted_le1", 0)]
    assert low0["n"] == 2
    assert low0["mean"] == 15.0
    # population stddev of [10, 20] is 5 -> SE = 5 / sqrt(2)
    assert low0["se"] == pytest.approx(5.0 / math.sqrt(2))
    high_m2 = table[("retweeted_gt1", -2)]
    assert high_m2["n"] == 2
    assert high_m2["mean"] == 40.0
    assert table[("retweeted_gt1", 0)] == {"mean": 60.0, "se": 0.0, "n": 1}


def test_extreme_scores_excluded():
    table = sentiment_conditioned_means([_row(4, 0, friends=1.0)], "friends")
    assert all(cell["n"] == 0 for cell in table.values())
    assert ("retweeted_le1", 4) not in table


def test_empty_buckets_flagged():
    table = sentiment_conditioned_means([], "followers")
    assert table[("retweeted_le1", 0)] == {"mean": None, "se": None, "n": 0}
    assert len(table) == 14  # 2 splits x 7 scores


def test_merge_equals_weighted_combination(rng):
    part_a = [_row(rng.randrange(-3, 4), rng.randrange(4), followers=float(rng.randrange(100)))
              for _ in range(300)]
    part_b = [_row(rng.randrange(-3, 4), rng.randrange(4), followers=float(rng.randrange(100)))
              for _ in range(200)]
    ta = sentiment_conditioned_means(part_a, "followers")
    tb = sentiment_conditioned_means(part_b, "followers")
    tall = sentiment_conditioned_means(part_a + part_b, "followers")
    for key, cell in tall.items():
        na, nb = ta[key]["n"], tb[key]["n"]
        assert cell["n"] == na + nb
        if cell["n"] == 0:
            continue
        acc = 0.0
        if na:
            acc += na * ta[key]["mean"]
        if nb:
            acc += nb * tb[key]["mean"]
        assert cell["mean"] == pytest.approx(acc / (na + nb))


def test_unknown_feature_rejected():
    with pytest.raises(ConfigError):
        sentiment_conditioned_means([], "shoe_size")


# ---------------------------------------------------------------------------
# extrapolation


def test_all_clean_sample_gives_zeros():
    counts = {f"u{i}": i + 1 for i in range(100)}
    labels = {f"u{i}": "human" for i in range(90, 100)}
    est = extrapolate_population(labels, counts)
    assert (est.bot_count, est.bot_fraction, est.bot_tweet_volume, est.volume_fraction) == \
        (0.0, 0.0, 0.0, 0.0)


def test_single_stratum_equals_plain_proportion():
    counts = {f"u{i:04d}": 1 + i for i in range(1000)}
    labels = {}
    for i in range(900, 1000):
        labels[f"u{i:04d}"] = "bot" if i % 4 == 0 else "human"
    n_bots = sum(1 for v in labels.values() if v == "bot")
    est = extrapolate_population(labels, counts, n_strata=1)
    assert est.bot_fraction == n_bots / len(labels)  # exact equality
    assert est.bot_count == 1000 * n_bots / len(labels)


def test_planted_population_recovered_within_two_points():
    # 20k users in 10 activity strata; bots concentrated in high activity
    rates = [0.10] * 6 + [0.12, 0.16, 0.24, 0.38]
    counts = {}
    truth = {}
    uid = 0
    for decile, rate in enumerate(rates):
        n_bots = int(rate * 2000)
        for j in range(2000):
            author = f"u{uid:05d}"
            counts[author] = 1 + uid // 100  # ascending activity
            truth[author] = "bot" if j < n_bots else "human"
            uid += 1
    true_fraction = sum(1 for v in truth.values() if v == "bot") / len(truth)
    assert true_fraction == 0.15
    # label the top 40% by activity (the estimator's sample)
    ranked = sorted(counts, key=lambda a: (-counts[a], a))
    sample = {a: truth[a] for a in ranked[: len(ranked) * 2 // 5]}
    est = extrapolate_population(sample, counts)
    assert abs(est.bot_fraction - true_fraction) <= 0.02
    assert any(s["floored"] for s in est.strata)


def test_undecided_counts_in_denominator_only():
    counts = {f"u{i}": 1 for i in range(10)}
    labels = {"u0": "bot", "u1": "undecided", "u2": "human", "u3": "undecided"}
    est = extrapolate_population(labels, counts, n_strata=1)
    assert est.bot_fraction == 0.25  # 1 bot of 4 sampled


def test_insufficient_strata():
    with pytest.raises(InsufficientStrata):
        extrapolate_population({}, {"u1": 5})
    with pytest.raises(InsufficientStrata):
        extrapolate_population({"ghost": "bot"}, {"u1": 5})
    with pytest.raises(InsufficientStrata):
        extrapolate_population({"u1": "bot"}, {})


def test_population_consistency_checks():
    counts = {"u1": 2, "u2": 3}
    with pytest.raises(DataError):
        extrapolate_population({"u1": "bot"}, counts, population_size=5)
    with pytest.raises(DataError):
        extrapolate_population({"u1": "bot"}, counts, total_tweets=99.0)
    est = extrapolate_population({"u2": "bot"}, counts, population_size=2, total_tweets=5.0)
    assert est.bot_fraction == 1.0
