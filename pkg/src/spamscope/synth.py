"""Synthetic archive generation with planted archetypes and labels.

Every generated user is constructed to land inside their archetype's DAC
quadrant with a safety margin, and to carry bot- or human-like profile
features matching their planted label. Received retweets are realized as
per-tweet platform counters, so any archetype mix is self-consistent; the
matching run config therefore pins ``retweets_received_mode`` to
``platform_counter``.

Output is deterministic for a fixed spec and seed: byte-identical archives,
labels and annotations.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field
from typing import Optional

from .dacmap import classify_quadrant
from .errors import ConfigError
from .spamfilter import TokenPipelineConfig, normalize_text

DAY = 86400

ARCH_TRADITIONAL = "traditional_spammer"
ARCH_SOCIAL = "social_spam_bot"
ARCH_INFLUENTIAL = "influential"
ARCH_HIDDEN = "hidden_influential"
ARCH_COMMON = "common_human"

ARCHETYPES = (ARCH_TRADITIONAL, ARCH_SOCIAL, ARCH_INFLUENTIAL, ARCH_HIDDEN, ARCH_COMMON)

# quadrant each archetype is planted into (commons sit bottom-left too)
TARGET_QUADRANT = {
    ARCH_TRADITIONAL: "traditional_spammer",
    ARCH_SOCIAL: "social_spam_bot",
    ARCH_INFLUENTIAL: "influential",
    ARCH_HIDDEN: "hidden_influential",
    ARCH_COMMON: "traditional_spammer",
}

BOT_ARCHETYPES = {ARCH_TRADITIONAL, ARCH_SOCIAL}

COLLECTION_START = 1_420_070_400  # 2015-01-01T00:00Z

# per-archetype generation parameters; ranges are inclusive-ish bounds fed
# to random.uniform / randint
DEFAULT_PARAMS = {
    ARCH_TRADITIONAL: {
        "posts": (30, 80),
        "x_log10": (-1.4, -0.4),
        "y_log10": (-1.6, -0.4),
        "friend_growth": (2.0, 25.0),
        "followers_start": (20, 800),
        "friends_start": (200, 2500),
        "age_days": (5, 60),
        "default_profile_p": 0.9,
        "geo_p": 0.01,
        "retweet_share": (0.5, 0.85),
        "reply_share": (0.0, 0.1),
    },
    ARCH_SOCIAL: {
        "posts": (25, 70),
        "x_log10": (0.4, 1.4),
        "y_log10": (-1.6, -0.4),
        "friend_growth": (0.5, 6.0),
        "followers_start": (100, 2000),
        "friends_start": (100, 1500),
        "age_days": (10, 90),
        "default_profile_p": 0.75,
        "geo_p": 0.02,
        "retweet_share": (0.45, 0.8),
        "reply_share": (0.0, 0.15),
    },
    ARCH_INFLUENTIAL: {
        "posts": (4, 16),
        "x_log10": (0.4, 1.3),
        "y_log10": (0.35, 1.2),
        "friend_growth": (0.2, 3.0),
        "followers_start": (5000, 80_000),
        "friends_start": (200, 2000),
        "age_days": (400, 2500),
        "default_profile_p": 0.02,
        "geo_p": 0.35,
        "retweet_share": (0.0, 0.15),
        "reply_share": (0.05, 0.25),
    },
    ARCH_HIDDEN: {
        "posts": (3, 10),
        "x_log10": (-1.3, -0.4),
        "y_log10": (0.35, 1.2),
        "friend_growth": (2.0, 15.0),
        "followers_start": (500, 6000),
        "friends_start": (500, 6000),
        "age_days": (300, 2000),
        "default_profile_p": 0.05,
        "geo_p": 0.3,
        "retweet_share": (0.0, 0.2),
        "reply_share": (0.05, 0.3),
    },
    ARCH_COMMON: {
        "posts": (2, 9),
        "x_log10": (-0.9, -0.08),
        "y_log10": (-1.0, -0.08),
        "friend_growth": (0.5, 8.0),
        "followers_start": (50, 2000),
        "friends_start": (80, 2500),
        "age_days": (150, 2200),
        "default_profile_p": 0.06,
        "geo_p": 0.4,
        "retweet_share": (0.1, 0.4),
        "reply_share": (0.1, 0.3),
    },
}

# planted bots hiding in the common crowd keep common-quadrant dynamics but
# carry bot-like profile features
COMMON_BOT_OVERRIDES = {
    "default_profile_p": 0.9,
    "geo_p": 0.0,
    "age_days": (5, 50),
    "retweet_share": (0.5, 0.9),
}

_FIRST_NAMES = (
    "alex", "sam", "jordan", "taylor", "casey", "riley", "maria", "laura",
    "james", "emma", "liam", "sofia", "noah", "olivia", "ethan", "ava",
)
_LAST_NAMES = (
    "smith", "jones", "garcia", "miller", "davis", "lopez", "wilson",
    "moore", "clark", "hall", "young", "king", "wright", "scott",
)

SPAM_KEYWORDS = (
    "win", "dvd", "movies", "giveaway", "deals", "horror",
    "bluray", "ebay", "gameofthrones", "movie",
)
_SPAM_FILLER = ("enter", "click", "follow", "free", "code", "coupon", "sale", "now")
_TOPIC_WORDS = (
    "vape", "ecig", "tobacco", "smoke", "cigar", "juice", "cloud",
    "flavor", "shop", "news", "study", "health",
)
_POSITIVE_WORDS = ("great", "love", "good", "amazing", "happy", "nice")
_NEGATIVE_WORDS = ("bad", "awful", "hate", "terrible", "sad", "worst")
_CLINTON_TAGS = ("hillaryclinton", "imwithher", "nevertrump", "hillary")
_TRUMP_TAGS = ("donaldtrump", "trump2016", "neverhillary", "trumppence16", "trump")


@dataclass
class SynthSpec:
    """Counts per archetype plus knobs shared across the population."""

    counts: dict
    duration_days: float = 30.0
    planted_bot_fraction: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.counts) - set(ARCHETYPES)
        if unknown:
            raise ConfigError(f"unknown archetypes: {sorted(unknown)}")
        if any(n < 0 for n in self.counts.values()):
            raise ConfigError("archetype counts must be non-negative")
        if not 0.0 <= self.planted_bot_fraction <= 1.0:
            raise ConfigError("planted_bot_fraction must lie in [0, 1]")
        if self.duration_days <= 0:
            raise ConfigError("duration_days must be positive")

    @classmethod
    def from_dict(cls, raw: dict) -> "SynthSpec":
        known = {"counts", "duration_days", "planted_bot_fraction", "params"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown synth spec keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_file(cls, path) -> "SynthSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _params_for(spec: SynthSpec, archetype: str, bot_in_common: bool) -> dict:
    params = dict(DEFAULT_PARAMS[archetype])
    params.update(spec.params.get(archetype, {}))
    if bot_in_common:
        params.update(COMMON_BOT_OVERRIDES)
    return params


def _human_name(rng: random.Random) -> str:
    name = rng.choice(_FIRST_NAMES) + "_" + rng.choice(_LAST_NAMES)
    if rng.random() < 0.5:
        name += str(rng.randint(1, 99))
    return name


def _bot_name(rng: random.Random) -> str:
    alphabet = string.ascii_lowercase + string.digits
    return "".join(rng.choice(alphabet) for _ in range(10))


def _spread(total: int, parts: int, rng: random.Random) -> list:
    """Split ``total`` into ``parts`` non-negative integers summing to it."""
    if parts == 0:
        return []
    base = total // parts
    out = [base] * parts
    for i in rng.sample(range(parts), total - base * parts):
        out[i] += 1
    return out


@dataclass
class _PlannedUser:
    author_id: str
    archetype: str
    is_bot: bool
    screen_name: str
    default_profile: bool
    geo_p: float
    account_created_at: int
    tweet_times: list
    followers_path: list
    friends_path: list
    statuses_path: list
    retweet_counts: list
    n_retweets_made: int
    n_replies_made: int
    leaning: str


def _plan_user(
    rng: random.Random,
    author_id: str,
    archetype: str,
    is_bot: bool,
    params: dict,
    duration_days: float,
) -> _PlannedUser:
    n_posts = rng.randint(*params["posts"])
    n_posts = max(2, n_posts)  # a delta needs two observations

    # activity timeline inside the collection window, account older than it
    window = int(duration_days * DAY)
    times = sorted(rng.sample(range(window), min(n_posts, window)))
    while len(times) < n_posts:  # tiny windows: reuse seconds
        times.append(times[-1])
    span_start = COLLECTION_START
    tweet_times = [span_start + t for t in times]
    age_extra = rng.randint(*params["age_days"])
    account_created_at = span_start - age_extra * DAY
    t_days = (tweet_times[-1] - account_created_at) / DAY

    # solve integer counter paths hitting the target quadrant
    x_target = 10.0 ** rng.uniform(*params["x_log10"])
    y_target = 10.0 ** rng.uniform(*params["y_log10"])

    friend_growth = rng.uniform(*params["friend_growth"])
    if x_target < 1.0:
        # keep the follower delta solvable: x(1+dF) >= 1
        friend_growth = max(friend_growth, (1.0 / x_target - 1.0) * 1.1 + 0.2)
    friends_delta = max(0, round(friend_growth * t_days))
    followers_delta = max(0, round((x_target * (1.0 + friends_delta / t_days) - 1.0) * t_days))

    statuses_delta = n_posts - 1  # counter advances once per captured post
    received = max(0, round((y_target * (1.0 + statuses_delta / t_days) - 1.0) * t_days))

    # nudge across rounding so the realized point lands in the quadrant
    target_quadrant = TARGET_QUADRANT[archetype]
    for _ in range(1000):
        x_real = (1.0 + followers_delta / t_days) / (1.0 + friends_delta / t_days)
        y_real = (1.0 + received / t_days) / (1.0 + statuses_delta / t_days)
        if classify_quadrant(x_real, y_real) == target_quadrant:
            break
        if (x_real >= 1.0) != (x_target >= 1.0):
            followers_delta += 1 if x_target >= 1.0 else -1
            followers_delta = max(0, followers_delta)
            if x_target < 1.0 and followers_delta == 0 and x_real >= 1.0:
                friends_delta += 1
        if (y_real >= 1.0) != (y_target >= 1.0):
            received += 1 if y_target >= 1.0 else -1
            received = max(0, received)
            if y_target < 1.0 and received == 0 and y_real >= 1.0:
                statuses_delta += 1
    else:
        raise ConfigError(
            f"could not realize archetype {archetype} at x={x_target}, y={y_target}"
        )

    followers_start = rng.randint(*params["followers_start"])
    friends_start = rng.randint(*params["friends_start"])
    statuses_start = statuses_delta + rng.randint(n_posts, n_posts * 40)

    def _path(start: int, delta: int) -> list:
        return [start + round(delta * i / (n_posts - 1)) for i in range(n_posts)]

    retweet_counts = _spread(received, n_posts, rng)
    n_retweets_made = round(rng.uniform(*params["retweet_share"]) * n_posts)
    n_replies_made = round(rng.uniform(*params["reply_share"]) * n_posts)
    n_retweets_made = min(n_retweets_made, n_posts)
    n_replies_made = min(n_replies_made, n_posts - n_retweets_made)

    leaning = rng.choices(["trump", "clinton", "none"], weights=[3, 2, 5])[0]
    return _PlannedUser(
        author_id=author_id,
        archetype=archetype,
        is_bot=is_bot,
        screen_name=_bot_name(rng) if is_bot else _human_name(rng),
        default_profile=rng.random() < params["default_profile_p"],
        geo_p=params["geo_p"],
        account_created_at=account_created_at,
        tweet_times=tweet_times,
        followers_path=_path(followers_start, followers_delta),
        friends_path=_path(friends_start, friends_delta),
        statuses_path=_path(statuses_start, statuses_delta),
        retweet_counts=retweet_counts,
        n_retweets_made=n_retweets_made,
        n_replies_made=n_replies_made,
        leaning=leaning,
    )


def _tweet_text(rng: random.Random, user: _PlannedUser) -> tuple:
    """Return (text, hashtags) matching the user's archetype voice."""
    hashtags = []
    words = []
    if user.is_bot and rng.random() < 0.75:
        words.append(rng.choice(SPAM_KEYWORDS))
        words.append(rng.choice(_SPAM_FILLER))
        words.append(rng.choice(SPAM_KEYWORDS))
        if rng.random() < 0.5:
            words.append(rng.choice(_POSITIVE_WORDS))
        hashtags.append(rng.choice(_TOPIC_WORDS))
    else:
        words.append(rng.choice(_TOPIC_WORDS))
        words.append(rng.choice(_TOPIC_WORDS))
        roll = rng.random()
        if roll < 0.3:
            if rng.random() < 0.2:
                words.append("really")
            words.append(rng.choice(_POSITIVE_WORDS))
        elif roll < 0.5:
            if rng.random() < 0.2:
                words.append("really")
            words.append(rng.choice(_NEGATIVE_WORDS))
        elif roll < 0.55:
            words.append("not")
            words.append(rng.choice(_POSITIVE_WORDS))
        if rng.random() < 0.15:
            words.append(rng.choice(SPAM_KEYWORDS))
    if user.leaning == "trump" and rng.random() < 0.6:
        hashtags.append(rng.choice(_TRUMP_TAGS))
    elif user.leaning == "clinton" and rng.random() < 0.6:
        hashtags.append(rng.choice(_CLINTON_TAGS))
    text = " ".join(words + ["#" + h for h in hashtags])
    return text, hashtags


def generate_fixture(
    spec: SynthSpec,
    seed: int,
    archive_path,
    labels_path,
    annotations_path=None,
):
    """Write a deterministic synthetic archive and its ground-truth labels.

    Returns a manifest dict with per-archetype user counts and totals. When
    ``annotations_path`` is given, an adjudicated two-annotator spam-stem
    file covering the planted spam keywords is written alongside.
    """
    rng = random.Random(seed)
    users = []
    idx = 0
    for archetype in ARCHETYPES:
        count = spec.counts.get(archetype, 0)
        n_hidden_bots = (
            round(count * spec.planted_bot_fraction) if archetype == ARCH_COMMON else 0
        )
        for j in range(count):
            bot_in_common = archetype == ARCH_COMMON and j < n_hidden_bots
            is_bot = archetype in BOT_ARCHETYPES or bot_in_common
            params = _params_for(spec, archetype, bot_in_common)
            users.append(
                _plan_user(rng, f"u{idx:06d}", archetype, is_bot, params, spec.duration_days)
            )
            idx += 1

    # retweet/reply targets cycle over other users so edges stay in-population
    records = []
    tid = 0
    for u_pos, user in enumerate(users):
        n_posts = len(user.tweet_times)
        kinds = (
            ["retweet"] * user.n_retweets_made
            + ["reply"] * user.n_replies_made
            + ["original"] * (n_posts - user.n_retweets_made - user.n_replies_made)
        )
        rng.shuffle(kinds)
        for i, ts in enumerate(user.tweet_times):
            kind = kinds[i] if len(users) > 1 else "original"
            target = None
            if kind != "original":
                step = 1 + (tid % (len(users) - 1))
                target = users[(u_pos + step) % len(users)].author_id
            text, hashtags = _tweet_text(rng, user)
            records.append({
                "tweet_id": f"t{tid:07d}",
                "author_id": user.author_id,
                "created_at": ts,
                "text": text,
                "hashtags": hashtags,
                "kind": kind,
                "target_author_id": target,
                "retweet_count": user.retweet_counts[i],
                "has_geo": rng.random() < user.geo_p,
                "user": {
                    "followers": user.followers_path[i],
                    "friends": user.friends_path[i],
                    "statuses": user.statuses_path[i],
                    "created_at": user.account_created_at,
                    "default_profile": user.default_profile,
                    "screen_name": user.screen_name,
                },
            })
            tid += 1

    records.sort(key=lambda r: (r["created_at"], r["tweet_id"]))
    with open(archive_path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True))
            fh.write("\n")

    with open(labels_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("author_id,label,archetype,quadrant\n")
        for user in users:
            fh.write(
                f"{user.author_id},{'bot' if user.is_bot else 'human'},"
                f"{user.archetype},{TARGET_QUADRANT[user.archetype]}\n"
            )

    if annotations_path is not None:
        write_spam_annotations(annotations_path)

    by_archetype = {}
    for user in users:
        by_archetype[user.archetype] = by_archetype.get(user.archetype, 0) + 1
    return {
        "users": len(users),
        "tweets": len(records),
        "bots": sum(1 for u in users if u.is_bot),
        "by_archetype": by_archetype,
    }


def write_spam_annotations(path) -> None:
    """Two concurring annotators over the stems of the planted keywords."""
    pipeline = TokenPipelineConfig()
    stems = sorted({normalize_text(kw, pipeline)[0] for kw in SPAM_KEYWORDS})
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("stem,annotator_id,is_spam\n")
        for annotator in ("ann1", "ann2"):
            for stem in stems:
                fh.write(f"{stem},{annotator},true\n")
