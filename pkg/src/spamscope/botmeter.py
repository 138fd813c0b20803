"""Interpretable bot-signal features and a trainable logistic scorer.

The feature set is the small, interpretable family of account signals:
default profile, missing geo metadata, posting rate, retweet share,
follower/friend balance, account age, and username character entropy.
Accounts are scored with a z-score-normalized logistic model and labeled
bot/human/undecided around the 0.5 threshold with a configurable dead band.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DataError, InsufficientData
from .ingest import UserAggregate, activity_period_days

FEATURE_ORDER = (
    "default_profile",
    "geo_absence",
    "tweets_per_day",
    "retweet_ratio",
    "follower_friend_ratio",
    "account_age_days",
    "username_randomness",
)

LABEL_BOT = "bot"
LABEL_HUMAN = "human"
LABEL_UNDECIDED = "undecided"

DEFAULT_THRESHOLD = 0.5
DEFAULT_BAND = 0.05

# scores are clipped into the open interval so downstream ratios stay finite
_SCORE_EPS = 1e-12


class EmptyName(DataError):
    """Username entropy is undefined for an empty name."""


class ModelMismatch(DataError):
    """Model and feature vector disagree on dimensionality or order."""


class DegenerateData(DataError):
    """Training set does not contain both classes."""


class NonFinite(DataError):
    """Training diverged into NaN/inf parameters."""


@dataclass(frozen=True)
class BotFeatureVector:
    default_profile: float
    geo_absence: float
    tweets_per_day: float
    retweet_ratio: float
    follower_friend_ratio: float
    account_age_days: float
    username_randomness: float

    def __post_init__(self):
        values = self.as_array()
        if not np.all(np.isfinite(values)):
            raise DataError(f"non-finite feature values: {values}")
        if not (0.0 <= self.geo_absence <= 1.0 and 0.0 <= self.retweet_ratio <= 1.0):
            raise DataError("geo_absence and retweet_ratio must lie in [0, 1]")
        if self.follower_friend_ratio <= 0 or self.account_age_days <= 0:
            raise DataError("ratio and age features must be positive")
        if self.tweets_per_day < 0 or self.username_randomness < 0:
            raise DataError("rate and entropy features must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_ORDER], dtype=float)


def username_randomness(name: str) -> float:
    """Shannon entropy of the name's character distribution, in bits."""
    if not name:
        raise EmptyName("username entropy needs a non-empty name")
    counts = Counter(name)
    n = len(name)
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def extract_features(
    agg: UserAggregate,
    as_of: Optional[float] = None,
    t_min: float = 1.0,
) -> BotFeatureVector:
    """Build the feature vector for one active user.

    ``as_of`` anchors the account age (defaults to the user's last observed
    activity; the pipeline passes the collection window end so ages are
    comparable across users).
    """
    if agg.tweets_posted < 1:
        raise InsufficientData(f"user {agg.author_id} authored no tweets")
    if agg.max_followers is None or agg.max_friends is None:
        raise InsufficientData(f"user {agg.author_id} has no profile snapshots")
    if agg.account_created_at is None:
        raise InsufficientData(f"user {agg.author_id} has no account creation time")
    if not agg.screen_name:
        raise InsufficientData(f"user {agg.author_id} has no screen name")
    t = activity_period_days(agg, t_min=t_min)
    if as_of is None:
        as_of = agg.last_seen if agg.last_seen is not None else agg.latest_snapshot_at
    age = max(t_min, (as_of - agg.account_created_at) / 86400.0)
    return BotFeatureVector(
        default_profile=1.0 if agg.is_default_profile else 0.0,
        geo_absence=1.0 - agg.geo_tweet_fraction,
        tweets_per_day=agg.tweets_posted / t,
        retweet_ratio=agg.retweets_made / agg.tweets_posted,
        follower_friend_ratio=(1.0 + agg.max_followers) / (1.0 + agg.max_friends),
        account_age_days=age,
        username_randomness=username_randomness(agg.screen_name),
    )


# ---------------------------------------------------------------------------
# Logistic model


@dataclass
class LogisticModel:
    feature_order: tuple
    weights: np.ndarray
    bias: float
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        self.feature_order = tuple(self.feature_order)
        self.weights = np.asarray(self.weights, dtype=float)
        self.means = np.asarray(self.means, dtype=float)
        self.stds = np.asarray(self.stds, dtype=float)
        n = len(self.feature_order)
        if not (self.weights.shape == self.means.shape == self.stds.shape == (n,)):
            raise ModelMismatch("weights/normalization shape disagrees with feature order")
        if not (np.all(np.isfinite(self.weights)) and np.isfinite(self.bias)):
            raise ModelMismatch("model parameters must be finite")
        if np.any(self.stds <= 0):
            raise ModelMismatch("normalization stddevs must be positive")

    def normalize(self, x: np.ndarray) -> np.ndarray:
        return (x - self.means) / self.stds

    def to_dict(self) -> dict:
        return {
            "feature_order": list(self.feature_order),
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "normalization": {
                "means": self.means.tolist(),
                "stds": self.stds.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "LogisticModel":
        return cls(
            feature_order=tuple(raw["feature_order"]),
            weights=raw["weights"],
            bias=float(raw["bias"]),
            means=raw["normalization"]["means"],
            stds=raw["normalization"]["stds"],
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "LogisticModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def score(features: BotFeatureVector, model: LogisticModel) -> float:
    """Bot likelihood in the open interval (0, 1)."""
    if model.feature_order != FEATURE_ORDER:
        raise ModelMismatch(
            f"model trained on {model.feature_order}, expected {FEATURE_ORDER}"
        )
    z = model.normalize(features.as_array())
    raw = float(sigmoid(np.dot(model.weights, z) + model.bias))
    return min(1.0 - _SCORE_EPS, max(_SCORE_EPS, raw))


def classify(
    score_value: float,
    threshold: float = DEFAULT_THRESHOLD,
    band: float = DEFAULT_BAND,
) -> str:
    """Threshold rule with a symmetric undecided band around it."""
    if score_value > threshold + band:
        return LABEL_BOT
    if score_value < threshold - band:
        return LABEL_HUMAN
    return LABEL_UNDECIDED


# ---------------------------------------------------------------------------
# Training


@dataclass
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 2000
    l2: float = 1e-3
    seed: int = 0
    init_scale: float = 1e-3  # magnitude of the seeded random init


def loss_and_gradient(weights, bias, X, y, l2=0.0):
    """L2-regularized mean log-loss and its analytic gradient.

    ``X`` is the (already normalized) m-by-n design matrix. The bias is not
    regularized. Uses the log-sum-exp form so the loss stays finite for
    extreme margins.
    """
    weights = np.asarray(weights, dtype=float)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    m = X.shape[0]
    z = X @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    loss += l2 / (2.0 * m) * float(np.dot(weights, weights))
    p = sigmoid(z)
    grad_w = X.T @ (p - y) / m + (l2 / m) * weights
    grad_b = float(np.mean(p - y))
    return loss, grad_w, grad_b


def train(
    labeled: Sequence,
    config: Optional[TrainConfig] = None,
) -> LogisticModel:
    """Fit the logistic model with full-batch gradient descent.

    ``labeled`` is a sequence of (BotFeatureVector, label) with labels in
    {0, 1}. Deterministic for a fixed config: the only randomness is the
    seeded near-zero init, and the full-batch updates need no shuffling.
    """
    config = config or TrainConfig()
    if len(labeled) < 2:
        raise DegenerateData("need at least two labeled examples")
    X_raw = np.array([fv.as_array() for fv, _ in labeled], dtype=float)
    y = np.array([int(label) for _, label in labeled], dtype=float)
    if set(np.unique(y)) != {0.0, 1.0}:
        raise DegenerateData("training labels must include both classes")

    means = X_raw.mean(axis=0)
    stds = X_raw.std(axis=0)
    stds[stds == 0.0] = 1.0  # constant features carry no signal; keep z finite
    X = (X_raw - means) / stds

    rng = np.random.default_rng(config.seed)
    weights = rng.uniform(-1.0, 1.0, size=X.shape[1]) * config.init_scale
    bias = 0.0
    for epoch in range(config.epochs):
        loss, grad_w, grad_b = loss_and_gradient(weights, bias, X, y, config.l2)
        if not (math.isfinite(loss) and np.all(np.isfinite(grad_w))):
            raise NonFinite(f"training diverged at epoch {epoch}: loss={loss}")
        weights = weights - config.learning_rate * grad_w
        bias = bias - config.learning_rate * grad_b
    if not (np.all(np.isfinite(weights)) and math.isfinite(bias)):
        raise NonFinite("training produced non-finite parameters")
    return LogisticModel(
        feature_order=FEATURE_ORDER,
        weights=weights,
        bias=bias,
        means=means,
        stds=stds,
    )


def training_accuracy(model: LogisticModel, labeled: Sequence) -> float:
    hits = sum(
        1
        for fv, label in labeled
        if (score(fv, model) > DEFAULT_THRESHOLD) == bool(label)
    )
    return hits / len(labeled)


# ---------------------------------------------------------------------------
# Activity ranking


def rank_and_sample_top_k(aggs, k: int) -> list:
    """Top-k user aggregates by tweets_posted, ties by author_id ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pool = aggs.values() if hasattr(aggs, "values") else aggs
    ranked = sorted(pool, key=lambda a: (-a.tweets_posted, a.author_id))
    return ranked[:k]


# ---------------------------------------------------------------------------
# Label files: CSV (author_id, label) with label in {bot, human} or {1, 0}


def load_labels(path) -> dict:
    import csv

    labels = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"author_id", "label"} <= set(reader.fieldnames):
            raise DataError(f"labels file {path} must have columns author_id,label")
        for row in reader:
            raw = row["label"].strip().lower()
            if raw in ("1", "bot", "true"):
                labels[row["author_id"]] = 1
            elif raw in ("0", "human", "false"):
                labels[row["author_id"]] = 0
            else:
                raise DataError(f"unknown label {row['label']!r} in {path}")
    return labels
