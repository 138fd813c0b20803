"""Pipeline orchestration: config, per-stage artifacts, summary report.

Every stage reads and writes documented files under the run's output
directory, so any stage can be re-run standalone from the prior artifacts:

  records.jsonl            canonical accepted records, input order
  aggregates.jsonl         one JSON row per user (sorted by author_id)
  ingest_stats.json        accepted / malformed / out-of-window counts
  sentiment.csv            tweet_id,pos,neg,s
  sentiment_histogram.csv  s,count
  spam_audit.json          keywords, per-round audit trail
  spam_tweets.csv          tweet_id (sorted)
  active_spammers.csv      author_id,spam_tweets
  spam_timeline.csv        day,count,cumulative (spam tweets only)
  model.json               trained logistic model (when training ran)
  bot_scores.csv           author_id,score,label,reason
  dac_points.csv           author_id,x,y,quadrant
  dac_grid.csv             x_bin_low,x_bin_high,y_bin_low,y_bin_high,count,density
  interaction_ccdfs.csv    group,kind,scope,value,p
  factions.csv             author_id,faction,clinton_matches,trump_matches
  sentiment_volume.csv     faction,group,candidate,s,volume
  sentiment_volume_diff.csv faction,group,s,abs_diff
  conditioned_means.csv    feature,split,s,mean,se,n
  extrapolation.json       population estimate plus strata table
  timeline.csv             day,count,cumulative (all tweets)
  summary.json             per-stage counts for the whole run

Outputs are byte-deterministic for a fixed config and seed: rows are
sorted, JSON keys are sorted, and no wall-clock values are emitted.
"""

from __future__ import annotations

import csv
import importlib.resources
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional

from . import botmeter, dacmap, diffusion, sentiment, spamfilter
from .errors import ConfigError, DataError
from .ingest import (
    RETWEETS_FROM_COUNTER,
    RETWEETS_FROM_EDGES,
    SchemaConfig,
    ingest_archive,
    load_aggregates,
    load_records,
    write_aggregates,
)

DAY = 86400

STAGES = ("ingest", "sentiment", "spamfilter", "botscore", "dacmap", "diffusion", "timeline")

DEFAULT_FACTION_TERMS = {
    "clinton": ["hillaryclinton", "imwithher", "nevertrump", "hillary"],
    "trump": ["donaldtrump", "trump2016", "neverhillary", "trumppence16", "trump"],
}


def default_lexicon_path() -> str:
    return str(importlib.resources.files("spamscope").joinpath("data/default_lexicon.txt"))


def default_stopwords_path() -> str:
    return str(importlib.resources.files("spamscope").joinpath("data/stopwords.txt"))


@dataclass
class RunConfig:
    """Validated run configuration; see README for the JSON layout."""

    input_paths: list
    out_dir: str
    schema: SchemaConfig = field(default_factory=SchemaConfig)
    lexicon_path: Optional[str] = None
    stopwords_path: Optional[str] = None
    model_path: Optional[str] = None
    labels_path: Optional[str] = None
    annotation_paths: list = field(default_factory=list)
    faction_terms: dict = field(default_factory=lambda: dict(DEFAULT_FACTION_TERMS))
    bot_threshold: float = 0.5
    bot_band: float = 0.05
    top_n: int = 250
    top_k: int = 1000
    bins_per_decade: int = 10
    x_range: tuple = (1e-2, 1e2)
    y_range: tuple = (1e-2, 1e2)
    t_min: float = 1.0
    tweet_rate_source: str = dacmap.TWEET_RATE_FROM_SNAPSHOTS
    retweets_received_mode: str = RETWEETS_FROM_EDGES
    freq_mode: str = spamfilter.FREQ_TOKENS
    train: botmeter.TrainConfig = field(default_factory=botmeter.TrainConfig)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not self.input_paths:
            raise ConfigError("input_paths must name at least one archive")
        for path in self.input_paths:
            if not os.path.exists(path):
                raise ConfigError(f"input archive not found: {path}")
        for name in ("lexicon_path", "stopwords_path", "model_path", "labels_path"):
            value = getattr(self, name)
            if value is not None and not os.path.exists(value):
                raise ConfigError(f"{name} not found: {value}")
        for path in self.annotation_paths:
            if not os.path.exists(path):
                raise ConfigError(f"annotation file not found: {path}")
        if self.retweets_received_mode not in (RETWEETS_FROM_EDGES, RETWEETS_FROM_COUNTER):
            raise ConfigError(f"unknown retweets_received_mode {self.retweets_received_mode!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.top_k < 1 or self.top_n < 1:
            raise ConfigError("top_k and top_n must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str = ".") -> "RunConfig":
        raw = dict(raw)

        def _resolve(p):
            return p if p is None or os.path.isabs(p) else os.path.join(base_dir, p)

        schema_raw = raw.pop("schema_config", None)
        if isinstance(schema_raw, str):
            schema = SchemaConfig.from_file(_resolve(schema_raw))
        elif isinstance(schema_raw, dict):
            schema = SchemaConfig.from_dict(schema_raw)
        elif schema_raw is None:
            schema = SchemaConfig()
        else:
            raise ConfigError("schema_config must be a path or an object")
        train_raw = raw.pop("train", {})
        known = {
            "input_paths", "out_dir", "lexicon_path", "stopwords_path",
            "model_path", "labels_path", "annotation_paths", "faction_terms",
            "bot_threshold", "bot_band", "top_n", "top_k", "bins_per_decade",
            "x_range", "y_range", "t_min", "tweet_rate_source",
            "retweets_received_mode", "freq_mode", "seed", "workers",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("input_paths", "annotation_paths"):
            if key in raw:
                raw[key] = [_resolve(p) for p in raw[key]]
        for key in ("lexicon_path", "stopwords_path", "model_path", "labels_path", "out_dir"):
            if raw.get(key) is not None:
                raw[key] = _resolve(raw[key])
        for key in ("x_range", "y_range"):
            if key in raw:
                raw[key] = tuple(raw[key])
        try:
            return cls(schema=schema, train=botmeter.TrainConfig(**train_raw), **raw)
        except TypeError as exc:
            raise ConfigError(f"bad run config: {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))

    def artifact(self, name: str) -> str:
        return os.path.join(self.out_dir, name)


def _write_csv(path, header: Iterable[str], rows: Iterable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        writer.writerows(rows)


def _read_csv(path) -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _fmt(value) -> str:
    """Stable CSV cell for optional floats."""
    return "" if value is None else repr(value)


# ---------------------------------------------------------------------------
# Stages


def stage_ingest(cfg: RunConfig) -> dict:
    os.makedirs(cfg.out_dir, exist_ok=True)
    aggs, stats = ingest_archive(
        cfg.input_paths,
        cfg.schema,
        workers=cfg.workers,
        retweets_received_mode=cfg.retweets_received_mode,
        records_out=cfg.artifact("records.jsonl"),
    )
    write_aggregates(aggs, cfg.artifact("aggregates.jsonl"))
    payload = stats.as_dict()
    payload["users"] = len(aggs)
    payload["active_users"] = sum(1 for a in aggs.values() if a.is_active)
    _write_json(cfg.artifact("ingest_stats.json"), payload)
    return payload


def _load_lexicon(cfg: RunConfig):
    return sentiment.load_lexicon(cfg.lexicon_path or default_lexicon_path())


def stage_sentiment(cfg: RunConfig) -> dict:
    lexicon = _load_lexicon(cfg)
    rows = []
    scores = []
    for rec in load_records(cfg.artifact("records.jsonl")):
        sc = sentiment.score_tweet(rec.text, lexicon)
        scores.append(sc)
        rows.append((rec.tweet_id, sc.pos, sc.neg, sc.s))
    rows.sort(key=lambda r: r[0])
    _write_csv(cfg.artifact("sentiment.csv"), ("tweet_id", "pos", "neg", "s"), rows)
    hist = sentiment.sentiment_histogram(scores)
    _write_csv(
        cfg.artifact("sentiment_histogram.csv"),
        ("s", "count"),
        [(s, hist[s]) for s in range(-4, 5)],
    )
    return {"scored": len(rows), "histogram": {str(s): hist[s] for s in hist}}


def _token_config(cfg: RunConfig) -> spamfilter.TokenPipelineConfig:
    stopwords = spamfilter.load_stopwords(cfg.stopwords_path or default_stopwords_path())
    return spamfilter.TokenPipelineConfig(stopwords=stopwords)


def stage_spamfilter(cfg: RunConfig) -> dict:
    token_config = _token_config(cfg)
    annotations = (
        spamfilter.load_annotations(cfg.annotation_paths) if cfg.annotation_paths else set()
    )
    tweets = {}
    authors = {}
    times = {}
    for rec in load_records(cfg.artifact("records.jsonl")):
        tweets[rec.tweet_id] = rec.text
        authors[rec.tweet_id] = rec.author_id
        times[rec.tweet_id] = rec.created_at
    partition = spamfilter.run_iterative_filter(
        tweets, annotations, config=token_config, top_n=cfg.top_n, freq_mode=cfg.freq_mode
    )
    _write_json(cfg.artifact("spam_audit.json"), partition.as_dict())
    _write_csv(
        cfg.artifact("spam_tweets.csv"), ("tweet_id",),
        [(tid,) for tid in sorted(partition.spam_tweet_ids)],
    )
    spammers = spamfilter.active_spammers(partition, authors)
    per_author = {}
    for tid in partition.spam_tweet_ids:
        per_author[authors[tid]] = per_author.get(authors[tid], 0) + 1
    _write_csv(
        cfg.artifact("active_spammers.csv"), ("author_id", "spam_tweets"),
        [(a, per_author[a]) for a in sorted(spammers)],
    )
    spam_times = [times[tid] for tid in partition.spam_tweet_ids]
    _write_csv(
        cfg.artifact("spam_timeline.csv"), ("day", "count", "cumulative"),
        emit_timeline_rows(spam_times),
    )
    return {
        "spam_keywords": len(partition.spam_keywords),
        "spam_tweets": len(partition.spam_tweet_ids),
        "residual_tweets": len(partition.residual_tweet_ids),
        "removal_rounds": partition.removal_rounds,
        "active_spammers": len(spammers),
    }


def stage_botscore(cfg: RunConfig) -> dict:
    aggs = load_aggregates(cfg.artifact("aggregates.jsonl"))
    active = {a: agg for a, agg in aggs.items() if agg.is_active}
    as_of = cfg.schema.window_end
    if as_of is None:
        as_of = max((agg.last_seen for agg in active.values()), default=None)

    features = {}
    for author_id in sorted(active):
        try:
            features[author_id] = botmeter.extract_features(
                active[author_id], as_of=as_of, t_min=cfg.t_min
            )
        except DataError:
            continue

    trained = False
    model = None
    if cfg.model_path:
        model = botmeter.LogisticModel.load(cfg.model_path)
    elif cfg.labels_path:
        labels = botmeter.load_labels(cfg.labels_path)
        labeled = [
            (features[a], labels[a]) for a in sorted(labels) if a in features
        ]
        if labeled:
            model = botmeter.train(labeled, cfg.train)
            model.save(cfg.artifact("model.json"))
            trained = True
    else:
        raise ConfigError("botscore needs model_path or labels_path")

    top = botmeter.rank_and_sample_top_k(active, cfg.top_k) if active else []
    rows = []
    counts = {"bot": 0, "human": 0, "undecided": 0}
    for agg in top:
        fv = features.get(agg.author_id)
        if fv is None or model is None:
            # unscorable accounts mirror suspended/deleted ones: undecided
            reason = "insufficient_data" if fv is None else "no_model"
            rows.append((agg.author_id, "", "undecided", reason))
            counts["undecided"] += 1
            continue
        value = botmeter.score(fv, model)
        label = botmeter.classify(value, cfg.bot_threshold, cfg.bot_band)
        rows.append((agg.author_id, repr(value), label, ""))
        counts[label] += 1
    rows.sort(key=lambda r: r[0])
    _write_csv(
        cfg.artifact("bot_scores.csv"), ("author_id", "score", "label", "reason"), rows
    )
    return {"scored": len(rows), "trained": trained, **counts}


def stage_dacmap(cfg: RunConfig) -> dict:
    aggs = load_aggregates(cfg.artifact("aggregates.jsonl"))
    points, skipped = dacmap.map_users(
        aggs, t_min=cfg.t_min, tweet_rate_source=cfg.tweet_rate_source
    )
    _write_csv(
        cfg.artifact("dac_points.csv"), ("author_id", "x", "y", "quadrant"),
        [(a, repr(p.x), repr(p.y), p.quadrant) for a, p in sorted(points.items())],
    )
    dmap = dacmap.build_density(
        points.values(),
        bins_per_decade=cfg.bins_per_decade,
        x_range=cfg.x_range,
        y_range=cfg.y_range,
    )
    _write_csv(
        cfg.artifact("dac_grid.csv"),
        ("x_bin_low", "x_bin_high", "y_bin_low", "y_bin_high", "count", "density"),
        [
            (repr(xl), repr(xh), repr(yl), repr(yh), n, repr(d))
            for xl, xh, yl, yh, n, d in dmap.iter_cells()
        ],
    )
    quadrants = dacmap.quadrant_counts(points.values())
    return {
        "mapped_users": len(points),
        "skipped_users": skipped,
        "clipped_points": dmap.clipped,
        "quadrants": quadrants,
    }


def _load_bot_labels(cfg: RunConfig) -> dict:
    labels = {}
    for row in _read_csv(cfg.artifact("bot_scores.csv")):
        labels[row["author_id"]] = row["label"]
    return labels


def stage_diffusion(cfg: RunConfig) -> dict:
    aggs = load_aggregates(cfg.artifact("aggregates.jsonl"))
    active = {a: agg for a, agg in aggs.items() if agg.is_active}
    labels = _load_bot_labels(cfg)
    records = list(load_records(cfg.artifact("records.jsonl")))

    series, matrix = diffusion.interaction_ccdfs(records, labels)
    ccdf_rows = []
    for (group, kind, scope), s in sorted(series.items()):
        if s is None:
            continue
        for value, p in zip(s.values, s.probs):
            ccdf_rows.append((group, kind, scope, repr(value), repr(p)))
    _write_csv(
        cfg.artifact("interaction_ccdfs.csv"),
        ("group", "kind", "scope", "value", "p"), ccdf_rows,
    )

    factions = {}
    faction_rows = []
    for author_id in sorted(active):
        out = diffusion.assign_faction(
            active[author_id], cfg.faction_terms["clinton"], cfg.faction_terms["trump"]
        )
        factions[author_id] = out.faction
        faction_rows.append(
            (author_id, out.faction, out.clinton_matches, out.trump_matches)
        )
    _write_csv(
        cfg.artifact("factions.csv"),
        ("author_id", "faction", "clinton_matches", "trump_matches"), faction_rows,
    )

    scores = {row["tweet_id"]: int(row["s"]) for row in _read_csv(cfg.artifact("sentiment.csv"))}
    volume_rows = []
    feature_rows = []
    unlabeled_tweets = 0
    for rec in records:
        s = scores.get(rec.tweet_id)
        if s is None:
            continue
        group = labels.get(rec.author_id)
        if group in diffusion.GROUPS:
            volume_rows.append((factions.get(rec.author_id, "none"), group, s, rec.text))
        else:
            unlabeled_tweets += 1
        agg = active.get(rec.author_id)
        if agg is not None and agg.max_friends is not None:
            feature_rows.append(diffusion.TweetFeatureRow(
                s=s,
                retweet_count=rec.retweet_count,
                tweets_posted=float(agg.tweets_posted),
                retweets_received=float(agg.retweets_received),
                friends=float(agg.max_friends),
                followers=float(agg.max_followers),
            ))

    volumes, diffs = diffusion.sentiment_volume_by_group(volume_rows, cfg.faction_terms)
    _write_csv(
        cfg.artifact("sentiment_volume.csv"),
        ("faction", "group", "candidate", "s", "volume"),
        [(f, g, c, s, v) for (f, g, c, s), v in sorted(volumes.items())],
    )
    _write_csv(
        cfg.artifact("sentiment_volume_diff.csv"),
        ("faction", "group", "s", "abs_diff"),
        [(f, g, s, d) for (f, g, s), d in sorted(diffs.items())],
    )

    means_rows = []
    for feature in diffusion.CONDITIONED_FEATURES:
        table = diffusion.sentiment_conditioned_means(feature_rows, feature)
        for (split, s), cell in sorted(table.items()):
            means_rows.append((
                feature, split, s, _fmt(cell["mean"]), _fmt(cell["se"]), cell["n"],
            ))
    _write_csv(
        cfg.artifact("conditioned_means.csv"),
        ("feature", "split", "s", "mean", "se", "n"), means_rows,
    )

    tweet_counts = {a: agg.tweets_posted for a, agg in active.items()}
    try:
        estimate = diffusion.extrapolate_population(labels, tweet_counts)
        extrapolation = {
            "bot_count": estimate.bot_count,
            "bot_fraction": estimate.bot_fraction,
            "bot_tweet_volume": estimate.bot_tweet_volume,
            "volume_fraction": estimate.volume_fraction,
            "strata": estimate.strata,
        }
    except diffusion.InsufficientStrata as exc:
        extrapolation = {"error": str(exc)}
    _write_json(cfg.artifact("extrapolation.json"), extrapolation)

    faction_counts = {}
    for f in factions.values():
        faction_counts[f] = faction_counts.get(f, 0) + 1
    return {
        "ccdf_series": sum(1 for s in series.values() if s is not None),
        "excluded_edges": matrix.excluded_edges,
        "unlabeled_scored_tweets": unlabeled_tweets,
        "factions": faction_counts,
        "extrapolation": extrapolation,
    }


def emit_timeline_rows(timestamps: Iterable[float]) -> list:
    """Calendar-day volume rows (UTC), zero-filled, with a cumulative column."""
    stamps = sorted(timestamps)
    if not stamps:
        return []
    per_day = {}
    for ts in stamps:
        day = int(ts // DAY)
        per_day[day] = per_day.get(day, 0) + 1
    rows = []
    cumulative = 0
    for day in range(min(per_day), max(per_day) + 1):
        count = per_day.get(day, 0)
        cumulative += count
        iso = datetime.fromtimestamp(day * DAY, tz=timezone.utc).date().isoformat()
        rows.append((iso, count, cumulative))
    return rows


def emit_timeline(records, granularity: str = "day") -> list:
    """Tweet volume per UTC calendar day plus a monotone cumulative count."""
    if granularity != "day":
        raise ConfigError(f"unsupported timeline granularity {granularity!r}")
    return emit_timeline_rows(rec.created_at for rec in records)


def stage_timeline(cfg: RunConfig) -> dict:
    rows = emit_timeline(load_records(cfg.artifact("records.jsonl")))
    _write_csv(cfg.artifact("timeline.csv"), ("day", "count", "cumulative"), rows)
    return {"days": len(rows), "total": rows[-1][2] if rows else 0}


def run_pipeline(cfg: RunConfig) -> dict:
    """Execute every stage in order and write summary.json."""
    summary = {}
    summary["ingest"] = stage_ingest(cfg)
    summary["sentiment"] = stage_sentiment(cfg)
    summary["spamfilter"] = stage_spamfilter(cfg)
    summary["botscore"] = stage_botscore(cfg)
    summary["dacmap"] = stage_dacmap(cfg)
    summary["diffusion"] = stage_diffusion(cfg)
    summary["timeline"] = stage_timeline(cfg)
    # worker count must never show up here: reports are byte-identical
    # across parallelism settings
    summary["config"] = {"seed": cfg.seed}
    _write_json(cfg.artifact("summary.json"), summary)
    return summary


STAGE_FUNCS = {
    "ingest": stage_ingest,
    "sentiment": stage_sentiment,
    "spamfilter": stage_spamfilter,
    "botscore": stage_botscore,
    "dacmap": stage_dacmap,
    "diffusion": stage_diffusion,
    "timeline": stage_timeline,
}
