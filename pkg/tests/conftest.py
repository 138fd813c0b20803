import json
import random
from pathlib import Path

import pytest

from spamscope.ingest import SchemaConfig

DAY = 86400
DATA_DIR = Path(__file__).parent / "data"
FIXTURE_SEED = 20160921


def bundled_fixture_spec():
    from spamscope.synth import SynthSpec

    return SynthSpec.from_file(DATA_DIR / "fixture_synth_spec.json")


def generate_bundled_fixture(tmp_path):
    """The 10k-tweet synthetic archive every end-to-end test runs on."""
    from spamscope.synth import generate_fixture

    tmp_path.mkdir(parents=True, exist_ok=True)
    archive = tmp_path / "archive.jsonl"
    labels = tmp_path / "labels.csv"
    annotations = tmp_path / "annotations.csv"
    generate_fixture(bundled_fixture_spec(), FIXTURE_SEED, archive, labels, annotations)
    return archive, labels, annotations


def bundled_run_config(tmp_path, out_dir, workers=1, **overrides):
    from spamscope.pipeline import RunConfig

    archive, labels, annotations = generate_bundled_fixture(tmp_path)
    base = dict(
        input_paths=[str(archive)],
        out_dir=str(out_dir),
        labels_path=str(labels),
        annotation_paths=[str(annotations)],
        retweets_received_mode="platform_counter",
        top_k=800,
        workers=workers,
    )
    base.update(overrides)
    return RunConfig(**base)


def make_line(
    tweet_id="t1",
    author_id="u1",
    created_at=1_440_000_000,
    text="hello world",
    hashtags=(),
    kind="original",
    target_author_id=None,
    retweet_count=0,
    has_geo=False,
    user=None,
):
    obj = {
        "tweet_id": tweet_id,
        "author_id": author_id,
        "created_at": created_at,
        "text": text,
        "hashtags": list(hashtags),
        "kind": kind,
        "target_author_id": target_author_id,
        "retweet_count": retweet_count,
        "has_geo": has_geo,
    }
    if user is not None:
        obj["user"] = user
    return json.dumps(obj)


def make_user(
    followers=10,
    friends=5,
    statuses=100,
    created_at=1_400_000_000,
    default_profile=False,
    screen_name="someone",
):
    return {
        "followers": followers,
        "friends": friends,
        "statuses": statuses,
        "created_at": created_at,
        "default_profile": default_profile,
        "screen_name": screen_name,
    }


@pytest.fixture
def schema():
    return SchemaConfig()


@pytest.fixture
def rng():
    return random.Random(20160921)
