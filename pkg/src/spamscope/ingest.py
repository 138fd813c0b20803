"""Tweet archive ingestion and per-user aggregation.

Archives are newline-delimited JSON (optionally gzip-compressed), one tweet
event per line. A :class:`SchemaConfig` maps JSON field paths onto the
canonical record fields, so both the native flat layout and raw-API-style
dumps (nested user object, derived interaction kind) can be ingested.

Per-user aggregation is an associative, commutative fold: records and
profile snapshots may arrive in any order, across any number of shards, and
partial aggregates merge into the same result as a single sequential pass.
"""

from __future__ import annotations

import gzip
import json
import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator, Mapping, Optional

from .errors import ConfigError, DataError

SECONDS_PER_DAY = 86400.0

KIND_ORIGINAL = "original"
KIND_RETWEET = "retweet"
KIND_REPLY = "reply"
VALID_KINDS = (KIND_ORIGINAL, KIND_RETWEET, KIND_REPLY)

RETWEETS_FROM_EDGES = "dataset_edges"
RETWEETS_FROM_COUNTER = "platform_counter"


class MalformedRecord(DataError):
    """Line is not valid JSON or violates a record invariant."""


class OutOfWindow(DataError):
    """Record timestamp falls outside the configured collection window."""


class InvalidTimeline(DataError):
    """A user's last observed activity precedes their registration."""


# ---------------------------------------------------------------------------
# Schema configuration


DEFAULT_FIELDS = {
    "tweet_id": "tweet_id",
    "author_id": "author_id",
    "created_at": "created_at",
    "text": "text",
    "hashtags": "hashtags",
    "kind": "kind",
    "target_author_id": "target_author_id",
    "retweet_count": "retweet_count",
    "has_geo": "has_geo",
}

DEFAULT_PROFILE_FIELDS = {
    "followers": "user.followers",
    "friends": "user.friends",
    "statuses_total": "user.statuses",
    "account_created_at": "user.created_at",
    "is_default_profile": "user.default_profile",
    "screen_name": "user.screen_name",
}

TIMESTAMP_FORMATS = ("unix", "iso8601", "twitter")


@dataclass
class SchemaConfig:
    """Maps archive JSON paths to canonical record fields.

    ``fields`` and ``profile`` values are dot-separated paths into the line's
    JSON object. When ``fields`` lacks an explicit ``kind`` path, the kind is
    derived: a non-null value at ``retweet_target`` makes the record a
    retweet of that author, a non-null ``reply_target`` a reply; otherwise
    the record is an original. An empty ``profile`` mapping disables embedded
    snapshot extraction.
    """

    fields: dict = field(default_factory=lambda: dict(DEFAULT_FIELDS))
    profile: dict = field(default_factory=lambda: dict(DEFAULT_PROFILE_FIELDS))
    created_at_format: str = "unix"
    retweet_target: Optional[str] = None
    reply_target: Optional[str] = None
    window_start: Optional[float] = None
    window_end: Optional[float] = None

    def __post_init__(self):
        if self.created_at_format not in TIMESTAMP_FORMATS:
            raise ConfigError(
                f"created_at_format must be one of {TIMESTAMP_FORMATS}, "
                f"got {self.created_at_format!r}"
            )
        for required in ("tweet_id", "author_id", "created_at", "text"):
            if required not in self.fields:
                raise ConfigError(f"schema_config missing required field path: {required}")
        # Pre-split every dot path once; parsing is per-line hot code.
        self._paths = {k: tuple(v.split(".")) for k, v in self.fields.items() if v}
        self._profile_paths = {k: tuple(v.split(".")) for k, v in self.profile.items() if v}
        self._retweet_target = tuple(self.retweet_target.split(".")) if self.retweet_target else None
        self._reply_target = tuple(self.reply_target.split(".")) if self.reply_target else None

    @classmethod
    def from_dict(cls, raw: Mapping) -> "SchemaConfig":
        known = {
            "fields", "profile", "created_at_format",
            "retweet_target", "reply_target", "window_start", "window_end",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown schema_config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        if "fields" in kwargs:
            kwargs["fields"] = {**DEFAULT_FIELDS, **kwargs["fields"]}
        if "window_start" in kwargs and kwargs["window_start"] is not None:
            kwargs["window_start"] = float(kwargs["window_start"])
        if "window_end" in kwargs and kwargs["window_end"] is not None:
            kwargs["window_end"] = float(kwargs["window_end"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "SchemaConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read schema_config {path}: {exc}") from exc
        return cls.from_dict(raw)


def _lookup(obj, path: tuple):
    for key in path:
        if not isinstance(obj, dict) or key not in obj:
            return None
        obj = obj[key]
    return obj


def parse_timestamp(value, fmt: str) -> float:
    """Return UTC unix seconds for a raw timestamp value."""
    if value is None:
        raise ValueError("missing timestamp")
    if fmt == "unix":
        return float(value)
    if fmt == "iso8601":
        dt = datetime.fromisoformat(str(value).replace("Z", "+00:00"))
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    # Twitter REST style: "Wed Oct 10 20:19:24 +0000 2018"
    return datetime.strptime(str(value), "%a %b %d %H:%M:%S %z %Y").timestamp()


# ---------------------------------------------------------------------------
# Domain records


@dataclass(slots=True)
class ProfileSnapshot:
    """Author profile counters as observed at one instant."""

    author_id: str
    observed_at: float
    followers: int
    friends: int
    statuses_total: int
    account_created_at: float
    is_default_profile: bool = False
    screen_name: str = ""


@dataclass(slots=True)
class TweetRecord:
    """One parsed tweet event, with the embedded profile snapshot if any."""

    tweet_id: str
    author_id: str
    created_at: float
    text: str
    hashtags: list
    kind: str
    target_author_id: Optional[str] = None
    retweet_count: int = 0
    has_geo: bool = False
    profile: Optional[ProfileSnapshot] = None


def normalize_hashtag(tag: str) -> str:
    return tag.lstrip("#").lower()


def _extract_hashtags(raw) -> list:
    if raw is None:
        return []
    if not isinstance(raw, list):
        raise MalformedRecord(f"hashtags field is not a list: {raw!r}")
    tags = []
    for item in raw:
        if isinstance(item, dict):  # raw-API entities: [{"text": "Vape"}, ...]
            item = item.get("text", "")
        tag = normalize_hashtag(str(item))
        if tag:
            tags.append(tag)
    return tags


def parse_tweet_line(line: str, schema: SchemaConfig) -> TweetRecord:
    """Parse one archive line into a validated :class:`TweetRecord`.

    Raises :class:`MalformedRecord` for bad JSON, missing required fields or
    invariant violations, and :class:`OutOfWindow` when the timestamp falls
    outside the schema's collection window. Both are skippable by callers.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord("archive line is not a JSON object")

    paths = schema._paths
    tweet_id = _lookup(obj, paths["tweet_id"])
    author_id = _lookup(obj, paths["author_id"])
    text = _lookup(obj, paths["text"])
    if tweet_id is None or author_id is None or text is None:
        raise MalformedRecord("missing tweet_id, author_id or text")

    try:
        created_at = parse_timestamp(_lookup(obj, paths["created_at"]), schema.created_at_format)
    except (ValueError, TypeError) as exc:
        raise MalformedRecord(f"bad created_at: {exc}") from exc
    if schema.window_start is not None and created_at < schema.window_start:
        raise OutOfWindow(f"{created_at} before window start")
    if schema.window_end is not None and created_at > schema.window_end:
        raise OutOfWindow(f"{created_at} after window end")

    target = None
    kind_path = paths.get("kind")
    kind = _lookup(obj, kind_path) if kind_path else None
    if kind is not None:
        if kind not in VALID_KINDS:
            raise MalformedRecord(f"unknown interaction kind: {kind!r}")
        target_path = paths.get("target_author_id")
        raw_target = _lookup(obj, target_path) if target_path else None
        target = str(raw_target) if raw_target is not None else None
    else:
        rt = _lookup(obj, schema._retweet_target) if schema._retweet_target else None
        rp = _lookup(obj, schema._reply_target) if schema._reply_target else None
        if rt is not None:
            kind, target = KIND_RETWEET, str(rt)
        elif rp is not None:
            kind, target = KIND_REPLY, str(rp)
        else:
            kind = KIND_ORIGINAL
    if kind in (KIND_RETWEET, KIND_REPLY) and target is None:
        raise MalformedRecord(f"{kind} record lacks target_author_id")
    if kind == KIND_ORIGINAL and target is not None:
        raise MalformedRecord("original record must not carry target_author_id")

    hashtags_path = paths.get("hashtags")
    hashtags = _extract_hashtags(_lookup(obj, hashtags_path) if hashtags_path else None)

    rc_path = paths.get("retweet_count")
    raw_rc = _lookup(obj, rc_path) if rc_path else None
    try:
        retweet_count = int(raw_rc) if raw_rc is not None else 0
    except (TypeError, ValueError) as exc:
        raise MalformedRecord(f"bad retweet_count: {raw_rc!r}") from exc
    if retweet_count < 0:
        raise MalformedRecord(f"negative retweet_count: {retweet_count}")

    geo_path = paths.get("has_geo")
    has_geo = bool(_lookup(obj, geo_path)) if geo_path else False

    profile = _extract_profile(obj, schema, str(author_id), created_at)
    return TweetRecord(
        tweet_id=str(tweet_id),
        author_id=str(author_id),
        created_at=created_at,
        text=str(text),
        hashtags=hashtags,
        kind=kind,
        target_author_id=target,
        retweet_count=retweet_count,
        has_geo=has_geo,
        profile=profile,
    )


def _extract_profile(obj, schema: SchemaConfig, author_id: str, observed_at: float):
    paths = schema._profile_paths
    if not paths:
        return None
    followers = _lookup(obj, paths["followers"]) if "followers" in paths else None
    friends = _lookup(obj, paths["friends"]) if "friends" in paths else None
    statuses = _lookup(obj, paths["statuses_total"]) if "statuses_total" in paths else None
    created = _lookup(obj, paths["account_created_at"]) if "account_created_at" in paths else None
    if followers is None and friends is None and statuses is None:
        return None  # line carries no profile data
    try:
        account_created_at = parse_timestamp(created, schema.created_at_format)
    except (ValueError, TypeError) as exc:
        raise MalformedRecord(f"bad account_created_at: {exc}") from exc
    if observed_at < account_created_at:
        raise MalformedRecord("profile observed before account creation")
    default_raw = _lookup(obj, paths.get("is_default_profile", ())) if "is_default_profile" in paths else None
    name_raw = _lookup(obj, paths.get("screen_name", ())) if "screen_name" in paths else None
    snap = ProfileSnapshot(
        author_id=author_id,
        observed_at=observed_at,
        followers=int(followers or 0),
        friends=int(friends or 0),
        statuses_total=int(statuses or 0),
        account_created_at=account_created_at,
        is_default_profile=bool(default_raw),
        screen_name=str(name_raw) if name_raw is not None else "",
    )
    if snap.followers < 0 or snap.friends < 0 or snap.statuses_total < 0:
        raise MalformedRecord("negative profile counter")
    return snap


# ---------------------------------------------------------------------------
# Per-user aggregates


@dataclass
class UserAggregate:
    """Order-independent rollup of one user's records and snapshots.

    ``retweets_received`` counts either in-dataset retweet edges targeting
    the user or the sum of platform per-tweet counters over authored tweets,
    depending on the aggregation mode. Snapshot extrema stay ``None`` until
    a first profile snapshot is folded in.
    """

    author_id: str
    tweets_posted: int = 0
    originals_posted: int = 0
    retweets_made: int = 0
    replies_made: int = 0
    retweets_received: int = 0
    replies_received: int = 0
    geo_tweets: int = 0
    hashtag_counts: Counter = field(default_factory=Counter)
    first_seen: Optional[float] = None
    last_seen: Optional[float] = None
    account_created_at: Optional[float] = None
    min_followers: Optional[int] = None
    max_followers: Optional[int] = None
    min_friends: Optional[int] = None
    max_friends: Optional[int] = None
    min_statuses: Optional[int] = None
    max_statuses: Optional[int] = None
    latest_snapshot_at: Optional[float] = None
    is_default_profile: bool = False
    screen_name: str = ""

    @property
    def is_active(self) -> bool:
        """Snapshot-only / target-only aggregates are inactive."""
        return self.tweets_posted >= 1

    @property
    def geo_tweet_fraction(self) -> float:
        if self.tweets_posted == 0:
            return 0.0
        return self.geo_tweets / self.tweets_posted

    # Received-retweet extrema "across snapshots": the counter starts at
    # zero when observation begins, so min is 0 and max is the total.
    @property
    def min_retweets_received(self) -> int:
        return 0

    @property
    def max_retweets_received(self) -> int:
        return self.retweets_received


def _fold_record(agg: UserAggregate, rec: TweetRecord) -> None:
    agg.tweets_posted += 1
    if rec.kind == KIND_RETWEET:
        agg.retweets_made += 1
    elif rec.kind == KIND_REPLY:
        agg.replies_made += 1
    else:
        agg.originals_posted += 1
    if rec.has_geo:
        agg.geo_tweets += 1
    if rec.hashtags:
        agg.hashtag_counts.update(rec.hashtags)
    ts = rec.created_at
    if agg.first_seen is None or ts < agg.first_seen:
        agg.first_seen = ts
    if agg.last_seen is None or ts > agg.last_seen:
        agg.last_seen = ts


def _fold_snapshot(agg: UserAggregate, snap: ProfileSnapshot) -> None:
    if agg.min_followers is None or snap.followers < agg.min_followers:
        agg.min_followers = snap.followers
    if agg.max_followers is None or snap.followers > agg.max_followers:
        agg.max_followers = snap.followers
    if agg.min_friends is None or snap.friends < agg.min_friends:
        agg.min_friends = snap.friends
    if agg.max_friends is None or snap.friends > agg.max_friends:
        agg.max_friends = snap.friends
    if agg.min_statuses is None or snap.statuses_total < agg.min_statuses:
        agg.min_statuses = snap.statuses_total
    if agg.max_statuses is None or snap.statuses_total > agg.max_statuses:
        agg.max_statuses = snap.statuses_total
    if agg.account_created_at is None or snap.account_created_at < agg.account_created_at:
        agg.account_created_at = snap.account_created_at
    # Latest snapshot wins profile flags; ties broken on content so the
    # update stays commutative.
    key = (snap.observed_at, snap.screen_name, snap.is_default_profile)
    if agg.latest_snapshot_at is None or key > (
        agg.latest_snapshot_at, agg.screen_name, agg.is_default_profile
    ):
        agg.latest_snapshot_at = snap.observed_at
        agg.is_default_profile = snap.is_default_profile
        agg.screen_name = snap.screen_name


def merge_aggregates(a: UserAggregate, b: UserAggregate) -> UserAggregate:
    """Merge two partial aggregates for the same user (associative)."""
    if a.author_id != b.author_id:
        raise ValueError("cannot merge aggregates of different users")
    out = UserAggregate(author_id=a.author_id)
    out.tweets_posted = a.tweets_posted + b.tweets_posted
    out.originals_posted = a.originals_posted + b.originals_posted
    out.retweets_made = a.retweets_made + b.retweets_made
    out.replies_made = a.replies_made + b.replies_made
    out.retweets_received = a.retweets_received + b.retweets_received
    out.replies_received = a.replies_received + b.replies_received
    out.geo_tweets = a.geo_tweets + b.geo_tweets
    out.hashtag_counts = a.hashtag_counts + b.hashtag_counts

    def _min(x, y):
        if x is None:
            return y
        if y is None:
            return x
        return min(x, y)

    def _max(x, y):
        if x is None:
            return y
        if y is None:
            return x
        return max(x, y)

    out.first_seen = _min(a.first_seen, b.first_seen)
    out.last_seen = _max(a.last_seen, b.last_seen)
    out.account_created_at = _min(a.account_created_at, b.account_created_at)
    out.min_followers = _min(a.min_followers, b.min_followers)
    out.max_followers = _max(a.max_followers, b.max_followers)
    out.min_friends = _min(a.min_friends, b.min_friends)
    out.max_friends = _max(a.max_friends, b.max_friends)
    out.min_statuses = _min(a.min_statuses, b.min_statuses)
    out.max_statuses = _max(a.max_statuses, b.max_statuses)
    ka = (a.latest_snapshot_at, a.screen_name, a.is_default_profile) if a.latest_snapshot_at is not None else None
    kb = (b.latest_snapshot_at, b.screen_name, b.is_default_profile) if b.latest_snapshot_at is not None else None
    pick = a if (kb is None or (ka is not None and ka >= kb)) else b
    out.latest_snapshot_at = pick.latest_snapshot_at
    out.is_default_profile = pick.is_default_profile
    out.screen_name = pick.screen_name
    return out


def aggregate_users(
    records: Iterable[TweetRecord],
    snapshots: Iterable[ProfileSnapshot] = (),
    retweets_received_mode: str = RETWEETS_FROM_EDGES,
) -> dict:
    """Fold records and snapshots into per-user aggregates.

    Embedded profile snapshots on records are folded automatically; the
    ``snapshots`` stream covers archives that ship profiles separately.
    Unknown authors appearing only in snapshots (or only as interaction
    targets) get aggregates with ``is_active`` False.
    """
    if retweets_received_mode not in (RETWEETS_FROM_EDGES, RETWEETS_FROM_COUNTER):
        raise ConfigError(f"unknown retweets_received_mode: {retweets_received_mode!r}")
    aggs: dict = {}

    def _get(author_id: str) -> UserAggregate:
        agg = aggs.get(author_id)
        if agg is None:
            agg = UserAggregate(author_id=author_id)
            aggs[author_id] = agg
        return agg

    from_edges = retweets_received_mode == RETWEETS_FROM_EDGES
    for rec in records:
        agg = _get(rec.author_id)
        _fold_record(agg, rec)
        if rec.profile is not None:
            _fold_snapshot(agg, rec.profile)
        if from_edges:
            if rec.kind == KIND_RETWEET:
                _get(rec.target_author_id).retweets_received += 1
        else:
            agg.retweets_received += rec.retweet_count
        if rec.kind == KIND_REPLY:
            _get(rec.target_author_id).replies_received += 1
    for snap in snapshots:
        _fold_snapshot(_get(snap.author_id), snap)
    return aggs


def merge_aggregate_maps(maps: Iterable[dict]) -> dict:
    merged: dict = {}
    for part in maps:
        for author_id, agg in part.items():
            if author_id in merged:
                merged[author_id] = merge_aggregates(merged[author_id], agg)
            else:
                merged[author_id] = agg
    return merged


def activity_period_days(agg: UserAggregate, t_min: float = 1.0) -> float:
    """Days from registration to last observed activity, floored at t_min.

    Falls back to first_seen when no snapshot supplied the account creation
    time, and to the latest snapshot time when the user authored nothing.
    """
    created = agg.account_created_at if agg.account_created_at is not None else agg.first_seen
    last = agg.last_seen if agg.last_seen is not None else agg.latest_snapshot_at
    if created is None or last is None:
        raise InvalidTimeline(f"user {agg.author_id} has no timeline observations")
    if last < created:
        raise InvalidTimeline(
            f"user {agg.author_id} last seen {last} before account creation {created}"
        )
    return max(t_min, (last - created) / SECONDS_PER_DAY)


# ---------------------------------------------------------------------------
# Archive scanning


@dataclass
class IngestStats:
    accepted: int = 0
    malformed: int = 0
    out_of_window: int = 0

    def as_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "malformed": self.malformed,
            "out_of_window": self.out_of_window,
        }


def _open_archive(path):
    path = str(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, encoding="utf-8")


def iter_archive_lines(paths) -> Iterator[str]:
    for path in paths:
        with _open_archive(path) as fh:
            for line in fh:
                if line.strip():
                    yield line


def parse_archive(
    paths,
    schema: SchemaConfig,
    stats: Optional[IngestStats] = None,
) -> Iterator[TweetRecord]:
    """Stream valid records from archive files, counting skipped lines."""
    stats = stats if stats is not None else IngestStats()
    for line in iter_archive_lines(paths):
        try:
            rec = parse_tweet_line(line, schema)
        except OutOfWindow:
            stats.out_of_window += 1
            continue
        except MalformedRecord:
            stats.malformed += 1
            continue
        stats.accepted += 1
        yield rec


_WORKER_SCHEMA: Optional[SchemaConfig] = None
_WORKER_MODE: str = RETWEETS_FROM_EDGES
_WORKER_EMIT: bool = False


def _init_worker(schema: SchemaConfig, mode: str, emit: bool) -> None:
    global _WORKER_SCHEMA, _WORKER_MODE, _WORKER_EMIT
    _WORKER_SCHEMA = schema
    _WORKER_MODE = mode
    _WORKER_EMIT = emit


def _parse_chunk(lines):
    """Worker: fold one chunk into a partial aggregate.

    Returns plain strings and dict rows rather than record objects; those
    pickle cheaply back to the parent.
    """
    stats = IngestStats()
    records = []
    out_lines = []
    for line in lines:
        try:
            rec = parse_tweet_line(line, _WORKER_SCHEMA)
        except OutOfWindow:
            stats.out_of_window += 1
            continue
        except MalformedRecord:
            stats.malformed += 1
            continue
        stats.accepted += 1
        records.append(rec)
        if _WORKER_EMIT:
            out_lines.append(json.dumps(record_to_dict(rec), sort_keys=True))
    partial = aggregate_users(records, retweets_received_mode=_WORKER_MODE)
    rows = [aggregate_to_dict(partial[a]) for a in partial]
    return out_lines, rows, stats


def _chunked(iterable, size: int):
    chunk = []
    for item in iterable:
        chunk.append(item)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def ingest_archive(
    paths,
    schema: Optional[SchemaConfig] = None,
    workers: int = 1,
    retweets_received_mode: str = RETWEETS_FROM_EDGES,
    records_out=None,
    chunk_size: int = 32768,
):
    """Scan archives into per-user aggregates, optionally in parallel.

    Workers parse independent line chunks and build partial aggregates that
    merge through the associative fold, so the result is identical for any
    worker count. ``records_out`` names a file that receives the canonical
    accepted records as JSONL, in input order, regardless of worker count.

    Returns (aggregates, stats).
    """
    schema = schema or SchemaConfig()
    stats = IngestStats()
    if workers <= 1:
        sink = open(records_out, "w", encoding="utf-8", newline="\n") if records_out else None
        try:
            if sink is not None:
                def _tee(rs):
                    for rec in rs:
                        sink.write(json.dumps(record_to_dict(rec), sort_keys=True))
                        sink.write("\n")
                        yield rec
                records = _tee(parse_archive(paths, schema, stats))
            else:
                records = parse_archive(paths, schema, stats)
            aggs = aggregate_users(records, retweets_received_mode=retweets_received_mode)
        finally:
            if sink is not None:
                sink.close()
        return aggs, stats

    merged: dict = {}
    sink = open(records_out, "w", encoding="utf-8", newline="\n") if records_out else None
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(
            workers,
            initializer=_init_worker,
            initargs=(schema, retweets_received_mode, records_out is not None),
        ) as pool:
            for out_lines, rows, chunk_stats in pool.imap(
                _parse_chunk, _chunked(iter_archive_lines(paths), chunk_size)
            ):
                if sink is not None:
                    for line in out_lines:
                        sink.write(line)
                        sink.write("\n")
                for row in rows:
                    agg = aggregate_from_dict(row)
                    if agg.author_id in merged:
                        merged[agg.author_id] = merge_aggregates(merged[agg.author_id], agg)
                    else:
                        merged[agg.author_id] = agg
                stats.accepted += chunk_stats.accepted
                stats.malformed += chunk_stats.malformed
                stats.out_of_window += chunk_stats.out_of_window
    finally:
        if sink is not None:
            sink.close()
    return merged, stats


# ---------------------------------------------------------------------------
# Persistence (documented JSONL table, one row per user)


_AGG_SCALAR_FIELDS = (
    "tweets_posted", "originals_posted", "retweets_made", "replies_made",
    "retweets_received", "replies_received", "geo_tweets",
    "first_seen", "last_seen", "account_created_at",
    "min_followers", "max_followers", "min_friends", "max_friends",
    "min_statuses", "max_statuses", "latest_snapshot_at",
    "is_default_profile", "screen_name",
)


def aggregate_to_dict(agg: UserAggregate) -> dict:
    row = {"author_id": agg.author_id}
    for name in _AGG_SCALAR_FIELDS:
        row[name] = getattr(agg, name)
    row["hashtag_counts"] = dict(sorted(agg.hashtag_counts.items()))
    row["geo_tweet_fraction"] = agg.geo_tweet_fraction
    row["active"] = agg.is_active
    return row


def aggregate_from_dict(row: Mapping) -> UserAggregate:
    agg = UserAggregate(author_id=row["author_id"])
    for name in _AGG_SCALAR_FIELDS:
        setattr(agg, name, row[name])
    agg.hashtag_counts = Counter(row.get("hashtag_counts", {}))
    return agg


def write_aggregates(aggs: Mapping, path) -> None:
    """Write aggregates as JSONL, one user per line, sorted by author_id."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for author_id in sorted(aggs):
            fh.write(json.dumps(aggregate_to_dict(aggs[author_id]), sort_keys=True))
            fh.write("\n")


def load_aggregates(path) -> dict:
    aggs = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            agg = aggregate_from_dict(json.loads(line))
            aggs[agg.author_id] = agg
    return aggs


_RECORD_FIELDS = (
    "tweet_id", "author_id", "created_at", "text", "hashtags",
    "kind", "target_author_id", "retweet_count", "has_geo",
)


def record_to_dict(rec: TweetRecord) -> dict:
    return {name: getattr(rec, name) for name in _RECORD_FIELDS}


def record_from_dict(row: Mapping) -> TweetRecord:
    return TweetRecord(**{name: row[name] for name in _RECORD_FIELDS})


def write_records(records: Iterable[TweetRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), sort_keys=True))
            fh.write("\n")


def load_records(path) -> Iterator[TweetRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield record_from_dict(json.loads(line))
