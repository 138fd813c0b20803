"""Sentiment scorer: spec examples, rule order, and fuzz properties."""

from collections import Counter

import pytest
from hypothesis import given, strategies as st

from spamscope.errors import ConfigError
from spamscope.sentiment import (
    RangeError,
    SentimentLexicon,
    SentimentScore,
    classify,
    load_lexicon,
    save_lexicon,
    score_tweet,
    sentiment_histogram,
)


@pytest.fixture
def micro():
    return SentimentLexicon(
        term_polarity={"good": 2, "love": 3, "great": 4, "bad": -2, "awful": -4},
        boosters={"really": 1, "slightly": -1},
        negators={"not", "never"},
        emoticon_polarity={":)": 2, ":(": -2},
    )


def test_empty_text_is_neutral(micro):
    assert score_tweet("", micro) == SentimentScore(1, 1)
    assert score_tweet("", micro).s == 0


def test_range_extremes_by_construction(micro):
    assert score_tweet("great", micro) == SentimentScore(5, 1)
    assert score_tweet("awful", micro) == SentimentScore(1, 5)
    assert score_tweet("great", micro).s == 4
    assert score_tweet("awful", micro).s == -4


def test_booster_amplifies_next_term(micro):
    # hand-applied rule order: really(+1) boosts good(2) to 3 -> pos = 4
    score = score_tweet("really good", micro)
    assert (score.pos, score.neg, score.s) == (4, 1, 3)


def test_negator_flips_next_term(micro):
    # not flips good(+2) to -2 -> neg = 3
    score = score_tweet("not good", micro)
    assert (score.pos, score.neg, score.s) == (1, 3, -2)


def test_negator_reaches_past_one_token(micro):
    # window of two tokens: "not really good" flips the boosted term
    score = score_tweet("not really good", micro)
    assert (score.pos, score.neg, score.s) == (1, 4, -3)
    # out of window: three tokens away, no flip
    score = score_tweet("not x y good", micro)
    assert (score.pos, score.neg) == (3, 1)


def test_max_aggregation_not_sum(micro):
    assert score_tweet("good good good", micro) == SentimentScore(3, 1)
    assert score_tweet("good love", micro) == SentimentScore(4, 1)
    assert score_tweet("good awful", micro) == SentimentScore(3, 5)


def test_booster_clamps_at_five(micro):
    assert score_tweet("really great", micro) == SentimentScore(5, 1)


def test_diminisher_can_silence_a_weak_term(micro):
    lex = SentimentLexicon(term_polarity={"ok": 1}, boosters={"slightly": -1})
    assert score_tweet("slightly ok", lex) == SentimentScore(1, 1)


def test_punctuation_and_case_stripped(micro):
    assert score_tweet("GOOD!!!", micro) == SentimentScore(3, 1)
    assert score_tweet("#good", micro) == SentimentScore(3, 1)


def test_repeated_letter_collapse(micro):
    assert score_tweet("loooove", micro) == SentimentScore(4, 1)
    assert score_tweet("looooveee this", micro) == SentimentScore(4, 1)


def test_emoticons_match_raw_tokens(micro):
    assert score_tweet("meh :)", micro) == SentimentScore(3, 1)
    assert score_tweet("meh :(", micro) == SentimentScore(1, 3)


def test_unknown_tokens_contribute_nothing(micro):
    assert score_tweet("lorem ipsum dolor", micro) == SentimentScore(1, 1)


def test_classify_paper_rule():
    assert classify(0) == "neutral"
    assert classify(-4) == "negative"
    assert classify(1) == "positive"
    with pytest.raises(RangeError):
        classify(5)
    with pytest.raises(RangeError):
        classify(-5)


def test_histogram_trivial_cases(micro):
    empty = sentiment_histogram([])
    assert set(empty) == set(range(-4, 5))
    assert all(v == 0 for v in empty.values())
    tens = sentiment_histogram([score_tweet("zzz", micro)] * 10)
    assert tens[0] == 10
    assert sum(tens.values()) == 10


def test_histogram_matches_per_tweet_oracle(micro):
    # independent oracle: score each tweet, tally with a Counter
    vocab = ["good", "bad", "really", "not", "love", "awful", "xyz", ":)", "great"]
    texts = []
    state = 12345
    for i in range(1000):
        state = (state * 1103515245 + 12345) % (1 << 31)
        k = 1 + state % 4
        words = []
        for j in range(k):
            state = (state * 1103515245 + 12345) % (1 << 31)
            words.append(vocab[state % len(vocab)])
        texts.append(" ".join(words))
    scores = [score_tweet(t, micro) for t in texts]
    oracle = Counter(sc.s for sc in scores)
    hist = sentiment_histogram(scores)
    assert sum(hist.values()) == 1000
    for s in range(-4, 5):
        assert hist[s] == oracle.get(s, 0)


TOKENS = ["good", "bad", "really", "not", "never", "love", "awful",
          "great", "slightly", "zzz", ":)", ":(", "!!!", "WIN"]


@given(st.lists(st.sampled_from(TOKENS), max_size=12))
def test_score_contract_fuzz(words):
    lex = SentimentLexicon(
        term_polarity={"good": 2, "love": 3, "great": 4, "bad": -2, "awful": -4},
        boosters={"really": 1, "slightly": -1},
        negators={"not", "never"},
        emoticon_polarity={":)": 2, ":(": -2},
    )
    score = score_tweet(" ".join(words), lex)
    assert 1 <= score.pos <= 5
    assert 1 <= score.neg <= 5
    assert score.s == score.pos - score.neg
    assert -4 <= score.s <= 4


@given(st.lists(st.sampled_from(TOKENS), max_size=10))
def test_appending_positive_term_monotone(words):
    lex = SentimentLexicon(
        term_polarity={"good": 2, "love": 3, "great": 4, "bad": -2, "awful": -4},
        boosters={"really": 1, "slightly": -1},
        negators={"not", "never"},
        emoticon_polarity={":)": 2, ":(": -2},
    )
    text = " ".join(words)
    base = score_tweet(text, lex)
    # guard: no live negator or booster may reach the appended token
    tail = words[-2:]
    if any(w in ("not", "never", "really", "slightly") for w in tail):
        return
    extended = score_tweet(text + " love", lex)
    assert extended.pos >= base.pos
    assert extended.neg == base.neg


def test_zero_hit_texts_are_exactly_neutral(micro):
    for text in ["", "   ", "the and or", "12345 67890"]:
        assert score_tweet(text, micro) == SentimentScore(1, 1)


def test_lexicon_rejects_zero_strength():
    with pytest.raises(ConfigError):
        SentimentLexicon(term_polarity={"meh": 0})
    with pytest.raises(ConfigError):
        SentimentLexicon(term_polarity={"meh": 5})


def test_lexicon_roundtrip(tmp_path, micro):
    path = tmp_path / "lex.txt"
    save_lexicon(micro, path)
    loaded = load_lexicon(path)
    assert loaded.term_polarity == micro.term_polarity
    assert loaded.boosters == micro.boosters
    assert loaded.negators == micro.negators
    assert loaded.emoticon_polarity == micro.emoticon_polarity


def test_default_lexicon_loads():
    from spamscope.pipeline import default_lexicon_path

    lex = load_lexicon(default_lexicon_path())
    assert lex.term_polarity["good"] == 2
    assert "not" in lex.negators
