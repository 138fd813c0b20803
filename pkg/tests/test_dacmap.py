"""DAC point formulas, quadrant taxonomy and the log-binned density map."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spamscope.errors import ConfigError, InsufficientData
from spamscope.dacmap import (
    DacDensityMap,
    DacPoint,
    DeltaRates,
    build_density,
    classify_quadrant,
    compute_deltas,
    dac_point,
    log_edges,
    map_users,
    quadrant_counts,
)
from spamscope.ingest import UserAggregate

DAY = 86400


def _agg(followers=(0, 0), friends=(0, 0), statuses=(0, 0), retweets_received=0,
         tweets_posted=5, days=10.0):
    agg = UserAggregate(author_id="u")
    agg.tweets_posted = tweets_posted
    agg.retweets_received = retweets_received
    agg.min_followers, agg.max_followers = followers
    agg.min_friends, agg.max_friends = friends
    agg.min_statuses, agg.max_statuses = statuses
    agg.account_created_at = 1_420_070_400
    agg.last_seen = agg.account_created_at + days * DAY
    return agg


# ---------------------------------------------------------------------------
# compute_deltas


def test_static_account_all_zero():
    d = compute_deltas(_agg())
    assert (d.follower_growth, d.friend_growth, d.retweet_rate, d.tweet_rate) == (0, 0, 0, 0)
    assert d.days == 10.0


def test_follower_growth_arithmetic():
    d = compute_deltas(_agg(followers=(100, 300), days=10.0))
    assert d.follower_growth == 20.0


def test_tweet_rate_sources():
    agg = _agg(statuses=(100, 140), tweets_posted=7, days=10.0)
    assert compute_deltas(agg, tweet_rate_source="snapshots").tweet_rate == 4.0
    assert compute_deltas(agg, tweet_rate_source="records").tweet_rate == 0.7
    # no snapshot statuses: fall back to in-dataset counts
    agg.min_statuses = agg.max_statuses = None
    assert compute_deltas(agg, tweet_rate_source="snapshots").tweet_rate == 0.7
    with pytest.raises(ConfigError):
        compute_deltas(agg, tweet_rate_source="guess")


def test_missing_extrema_rejected():
    agg = _agg()
    agg.max_followers = agg.min_followers = None
    with pytest.raises(InsufficientData):
        compute_deltas(agg)


def test_deltas_fixture_against_spreadsheet_oracle(rng):
    for _ in range(50):
        f0 = rng.randrange(1000)
        f1 = f0 + rng.randrange(500)
        fr0 = rng.randrange(1000)
        fr1 = fr0 + rng.randrange(500)
        s0 = rng.randrange(10_000)
        s1 = s0 + rng.randrange(300)
        rts = rng.randrange(200)
        days = rng.randrange(1, 300)
        agg = _agg(followers=(f0, f1), friends=(fr0, fr1), statuses=(s0, s1),
                   retweets_received=rts, days=float(days))
        d = compute_deltas(agg)
        # plain spreadsheet arithmetic
        assert d.follower_growth == (f1 - f0) / days
        assert d.friend_growth == (fr1 - fr0) / days
        assert d.retweet_rate == rts / days
        assert d.tweet_rate == (s1 - s0) / days


# ---------------------------------------------------------------------------
# dac_point and quadrants


def test_zero_deltas_map_to_unit_point():
    p = dac_point(DeltaRates(0, 0, 0, 0, days=10))
    assert (p.x, p.y) == (1.0, 1.0)
    assert p.quadrant == "influential"  # boundary goes to the >= side


def test_hand_evaluated_social_spam_bot():
    p = dac_point(DeltaRates(99, 0, 0, 99, days=10))
    assert p.x == 100.0
    assert p.y == 0.01
    assert p.quadrant == "social_spam_bot"


def test_hand_evaluated_hidden_influential():
    p = dac_point(DeltaRates(0, 99, 99, 0, days=10))
    assert p.x == 0.01
    assert p.y == 100.0
    assert p.quadrant == "hidden_influential"


def test_quadrant_rules():
    assert classify_quadrant(1.0, 1.0) == "influential"
    assert classify_quadrant(0.5, 0.2) == "traditional_spammer"
    assert classify_quadrant(1.0, 0.999999) == "social_spam_bot"
    assert classify_quadrant(0.999999, 1.0) == "hidden_influential"


@given(st.floats(min_value=1e-6, max_value=1e6),
       st.floats(min_value=1e-6, max_value=1e6))
def test_quadrant_total_partition(x, y):
    label = classify_quadrant(x, y)
    assert label in {"traditional_spammer", "social_spam_bot",
                     "influential", "hidden_influential"}
    # flips exactly at the boundaries
    if x < 1 and y < 1:
        assert label == "traditional_spammer"
    if x >= 1 and y >= 1:
        assert label == "influential"


def test_joint_rescaling_leaves_point_unchanged():
    # multiplying all four raw differences and t by the same factor keeps
    # every rate identical, hence the same (x, y) bit-for-bit
    for k in (2, 3, 7, 10):
        base = _agg(followers=(10, 25), friends=(5, 11), statuses=(40, 100),
                    retweets_received=9, days=3.0)
        scaled = _agg(
            followers=(10, 10 + 15 * k), friends=(5, 5 + 6 * k),
            statuses=(40, 40 + 60 * k), retweets_received=9 * k, days=3.0 * k,
        )
        p1 = dac_point(compute_deltas(base))
        p2 = dac_point(compute_deltas(scaled))
        assert p1.x == p2.x and p1.y == p2.y


def test_dac_point_validation():
    with pytest.raises(ValueError):
        DacPoint(x=-1.0, y=1.0, quadrant="influential")
    with pytest.raises(ValueError):
        DacPoint(x=2.0, y=2.0, quadrant="traditional_spammer")


# ---------------------------------------------------------------------------
# density map


def test_log_edges_exact_layout():
    edges = log_edges(1e-2, 1e2, 10)
    assert len(edges) == 41
    assert edges[0] == pytest.approx(1e-2)
    assert edges[-1] == pytest.approx(1e2)
    with pytest.raises(ConfigError):
        log_edges(1e-2, 3.7e1, 10)
    with pytest.raises(ConfigError):
        log_edges(0, 1e2, 10)


def test_single_point_density():
    dmap = build_density([DacPoint(1.5, 1.5, "influential")])
    assert np.count_nonzero(dmap.counts) == 1
    assert dmap.integral() == pytest.approx(1.0, abs=1e-12)
    assert dmap.clipped == 0


def test_uniform_points_in_one_cell():
    pts = [DacPoint(1.05, 1.05, "influential") for _ in range(100)]
    dmap = build_density(pts)
    i = np.searchsorted(dmap.x_edges, 1.05, side="right") - 1
    j = np.searchsorted(dmap.y_edges, 1.05, side="right") - 1
    area = (dmap.x_edges[i + 1] - dmap.x_edges[i]) * (dmap.y_edges[j + 1] - dmap.y_edges[j])
    assert dmap.counts[i, j] == 100
    assert dmap.density[i, j] == pytest.approx(1.0 / area)


def test_empty_input_flagged():
    dmap = build_density([])
    assert dmap.empty
    assert dmap.total == 0
    assert dmap.integral() == 0.0


def test_out_of_range_points_clipped_into_edge_bins(rng):
    pts = [DacPoint(1e-5, 1.0, "hidden_influential"),
           DacPoint(1e5, 1.0, "influential")]
    dmap = build_density(pts)
    assert dmap.clipped == 2
    assert dmap.counts[0].sum() == 1
    assert dmap.counts[-1].sum() == 1
    assert dmap.integral() == pytest.approx(1.0, abs=1e-12)


def test_density_against_brute_force_binning_oracle(rng):
    pts = []
    for _ in range(10_000):
        x = 10 ** rng.uniform(-2.5, 2.5)
        y = 10 ** rng.uniform(-2.5, 2.5)
        pts.append(DacPoint(x, y, classify_quadrant(x, y)))
    dmap = build_density(pts)
    # brute-force oracle: nested loops over cells
    x_edges, y_edges = dmap.x_edges, dmap.y_edges
    for i in (0, 7, 20, 39):
        for j in (0, 13, 39):
            n = 0
            for p in pts:
                px = min(max(p.x, x_edges[0]), x_edges[-1] * 0.999999999)
                py = min(max(p.y, y_edges[0]), y_edges[-1] * 0.999999999)
                if (x_edges[i] <= px < x_edges[i + 1] or (i == 39 and px >= x_edges[39])) and \
                   (y_edges[j] <= py < y_edges[j + 1] or (j == 39 and py >= y_edges[39])):
                    n += 1
            assert dmap.counts[i, j] == n
    assert dmap.integral() == pytest.approx(1.0, abs=1e-9)
    assert dmap.counts.sum() == 10_000


def test_density_permutation_invariant(rng):
    pts = []
    for _ in range(500):
        x = 10 ** rng.uniform(-1, 1)
        y = 10 ** rng.uniform(-1, 1)
        pts.append(DacPoint(x, y, classify_quadrant(x, y)))
    a = build_density(pts)
    shuffled = list(pts)
    rng.shuffle(shuffled)
    b = build_density(shuffled)
    assert np.array_equal(a.counts, b.counts)
    assert np.array_equal(a.density, b.density)


def test_iter_cells_row_major():
    dmap = build_density([DacPoint(1.0, 1.0, "influential")], bins_per_decade=1,
                         x_range=(1e-1, 1e1), y_range=(1e-1, 1e1))
    cells = list(dmap.iter_cells())
    assert len(cells) == 4
    assert cells[0][0] == pytest.approx(0.1)
    assert sum(c[4] for c in cells) == 1


# ---------------------------------------------------------------------------
# map_users


def test_map_users_skips_inactive_and_unmappable():
    good = _agg()
    good.author_id = "good"
    inactive = UserAggregate(author_id="inactive")
    no_snap = _agg()
    no_snap.author_id = "nosnap"
    no_snap.max_followers = no_snap.min_followers = None
    aggs = {a.author_id: a for a in (good, inactive, no_snap)}
    points, skipped = map_users(aggs)
    assert set(points) == {"good"}
    assert skipped == 2
    assert quadrant_counts(points.values())["influential"] == 1
