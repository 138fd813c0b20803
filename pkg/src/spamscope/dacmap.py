"""Dynamical activity-connectivity points, quadrants and density maps.

Each user becomes a point (x, y):

    x = (1 + follower_growth) / (1 + friend_growth)
    y = (1 + retweet_rate)    / (1 + tweet_rate)

where the four rates are per-day variations of the underlying counters over
the user's activity period. The unit offsets avoid zero divisions and keep
the map log-scalable. Quadrants around (1, 1) name the user taxonomy, with
the boundary assigned to the >= side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ConfigError, EmptyInput, InsufficientData
from .ingest import UserAggregate, activity_period_days

QUADRANT_TRADITIONAL_SPAMMER = "traditional_spammer"  # x < 1, y < 1
QUADRANT_SOCIAL_SPAM_BOT = "social_spam_bot"          # x >= 1, y < 1
QUADRANT_INFLUENTIAL = "influential"                  # x >= 1, y >= 1
QUADRANT_HIDDEN_INFLUENTIAL = "hidden_influential"    # x < 1, y >= 1

QUADRANTS = (
    QUADRANT_TRADITIONAL_SPAMMER,
    QUADRANT_SOCIAL_SPAM_BOT,
    QUADRANT_INFLUENTIAL,
    QUADRANT_HIDDEN_INFLUENTIAL,
)

TWEET_RATE_FROM_SNAPSHOTS = "snapshots"
TWEET_RATE_FROM_RECORDS = "records"

DEFAULT_BINS_PER_DECADE = 10
DEFAULT_RANGE = (1e-2, 1e2)


@dataclass(frozen=True)
class DeltaRates:
    """Per-day growth rates over a user's activity period (all >= 0)."""

    follower_growth: float
    friend_growth: float
    retweet_rate: float
    tweet_rate: float
    days: float

    def __post_init__(self):
        values = (self.follower_growth, self.friend_growth,
                  self.retweet_rate, self.tweet_rate)
        if any(v < 0 or not math.isfinite(v) for v in values):
            raise InsufficientData(f"negative or non-finite delta rates: {values}")
        if self.days <= 0:
            raise InsufficientData(f"activity period must be positive, got {self.days}")


@dataclass(frozen=True)
class DacPoint:
    x: float
    y: float
    quadrant: str

    def __post_init__(self):
        if self.x <= 0 or self.y <= 0:
            raise ValueError(f"DAC coordinates must be positive: ({self.x}, {self.y})")
        if self.quadrant != classify_quadrant(self.x, self.y):
            raise ValueError("quadrant label inconsistent with coordinates")


def compute_deltas(
    agg: UserAggregate,
    t_min: float = 1.0,
    tweet_rate_source: str = TWEET_RATE_FROM_SNAPSHOTS,
) -> DeltaRates:
    """Per-day counter variations for one user.

    Follower/friend variations come from snapshot extrema. The tweet-counter
    variation uses snapshot statuses extrema when available (falling back to
    in-dataset posted tweets), or in-dataset counts directly when
    ``tweet_rate_source`` is "records". Retweets received were folded by the
    aggregation mode already.
    """
    if tweet_rate_source not in (TWEET_RATE_FROM_SNAPSHOTS, TWEET_RATE_FROM_RECORDS):
        raise ConfigError(f"unknown tweet_rate_source {tweet_rate_source!r}")
    t = activity_period_days(agg, t_min=t_min)
    if agg.max_followers is None or agg.max_friends is None:
        raise InsufficientData(f"user {agg.author_id} has no profile snapshots")
    followers_diff = agg.max_followers - agg.min_followers
    friends_diff = agg.max_friends - agg.min_friends
    retweets_diff = agg.max_retweets_received - agg.min_retweets_received
    if tweet_rate_source == TWEET_RATE_FROM_SNAPSHOTS and agg.max_statuses is not None:
        tweets_diff = agg.max_statuses - agg.min_statuses
    else:
        tweets_diff = agg.tweets_posted
    return DeltaRates(
        follower_growth=followers_diff / t,
        friend_growth=friends_diff / t,
        retweet_rate=retweets_diff / t,
        tweet_rate=tweets_diff / t,
        days=t,
    )


def classify_quadrant(x: float, y: float) -> str:
    """Total partition of the positive quadrant around (1, 1)."""
    if x >= 1.0:
        return QUADRANT_INFLUENTIAL if y >= 1.0 else QUADRANT_SOCIAL_SPAM_BOT
    return QUADRANT_HIDDEN_INFLUENTIAL if y >= 1.0 else QUADRANT_TRADITIONAL_SPAMMER


def dac_point(d: DeltaRates) -> DacPoint:
    x = (1.0 + d.follower_growth) / (1.0 + d.friend_growth)
    y = (1.0 + d.retweet_rate) / (1.0 + d.tweet_rate)
    return DacPoint(x=x, y=y, quadrant=classify_quadrant(x, y))


# ---------------------------------------------------------------------------
# Log-binned joint density


@dataclass
class DacDensityMap:
    """Joint density over log-spaced cells; density is per linear unit area,
    so sum(density * cell_area) is exactly 1 for non-empty input."""

    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    total: int
    clipped: int
    empty: bool

    def integral(self) -> float:
        if self.empty:
            return 0.0
        dx = np.diff(self.x_edges)
        dy = np.diff(self.y_edges)
        return float(np.sum(self.density * np.outer(dx, dy)))

    def iter_cells(self):
        """Yield (x_low, x_high, y_low, y_high, count, density) row-major."""
        for i in range(len(self.x_edges) - 1):
            for j in range(len(self.y_edges) - 1):
                yield (
                    float(self.x_edges[i]), float(self.x_edges[i + 1]),
                    float(self.y_edges[j]), float(self.y_edges[j + 1]),
                    int(self.counts[i, j]), float(self.density[i, j]),
                )


def log_edges(lo: float, hi: float, bins_per_decade: int) -> np.ndarray:
    if not (0 < lo < hi):
        raise ConfigError(f"need 0 < lo < hi, got ({lo}, {hi})")
    decades = math.log10(hi / lo)
    n_bins = round(bins_per_decade * decades)
    if n_bins < 1 or abs(n_bins - bins_per_decade * decades) > 1e-9:
        raise ConfigError(
            f"range ({lo}, {hi}) is not a whole number of bins at "
            f"{bins_per_decade} bins/decade"
        )
    return lo * 10.0 ** (np.arange(n_bins + 1) / bins_per_decade)


def _bin_indices(values: np.ndarray, edges: np.ndarray):
    idx = np.searchsorted(edges, values, side="right") - 1
    clipped = (values < edges[0]) | (values > edges[-1])
    return np.clip(idx, 0, len(edges) - 2), clipped


def build_density(
    points: Iterable,
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE,
    x_range=DEFAULT_RANGE,
    y_range=DEFAULT_RANGE,
) -> DacDensityMap:
    """Count points into log cells and normalize to a linear-area density.

    Out-of-range points are clipped into the edge bins and tallied in
    ``clipped``. Empty input yields a map with the ``empty`` flag set.
    """
    x_edges = log_edges(x_range[0], x_range[1], bins_per_decade)
    y_edges = log_edges(y_range[0], y_range[1], bins_per_decade)
    pts = list(points)
    counts = np.zeros((len(x_edges) - 1, len(y_edges) - 1), dtype=np.int64)
    if not pts:
        return DacDensityMap(
            x_edges=x_edges, y_edges=y_edges, counts=counts,
            density=counts.astype(float), total=0, clipped=0, empty=True,
        )
    xs = np.array([p.x for p in pts], dtype=float)
    ys = np.array([p.y for p in pts], dtype=float)
    xi, x_clip = _bin_indices(xs, x_edges)
    yi, y_clip = _bin_indices(ys, y_edges)
    np.add.at(counts, (xi, yi), 1)
    area = np.outer(np.diff(x_edges), np.diff(y_edges))
    density = counts / (len(pts) * area)
    return DacDensityMap(
        x_edges=x_edges, y_edges=y_edges, counts=counts, density=density,
        total=len(pts), clipped=int(np.sum(x_clip | y_clip)), empty=False,
    )


def quadrant_counts(points: Iterable) -> dict:
    out = {q: 0 for q in QUADRANTS}
    for p in points:
        out[p.quadrant] += 1
    return out


def map_users(
    aggs,
    t_min: float = 1.0,
    tweet_rate_source: str = TWEET_RATE_FROM_SNAPSHOTS,
) -> tuple:
    """DAC points for every mappable active user.

    Returns (points_by_author, skipped) where skipped counts users without
    the observations the deltas need (including broken timelines).
    """
    from .ingest import InvalidTimeline

    points = {}
    skipped = 0
    values = aggs.values() if hasattr(aggs, "values") else aggs
    for agg in values:
        if not agg.is_active:
            skipped += 1
            continue
        try:
            deltas = compute_deltas(agg, t_min=t_min, tweet_rate_source=tweet_rate_source)
        except (InsufficientData, InvalidTimeline):
            skipped += 1
            continue
        points[agg.author_id] = dac_point(deltas)
    return points, skipped
