import heapq
import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drifters import alignment as al
from drifters.platform import World

POLES = ("#voteblue", "#votered")


def toy_vectors(seed=0, dim=8):
    g = np.random.default_rng(seed)
    words = list(POLES) + [f"#t{i}" for i in range(20)]
    return al.HashtagVectors(words, g.normal(size=(len(words), dim)))


def synthetic_corpus(n=3000, seed=1):
    """Two camps of hashtags that co-occur with their own pole."""
    rng = random.Random(seed)
    left = ["#voteblue"] + [f"#l{i}" for i in range(6)]
    right = ["#votered"] + [f"#r{i}" for i in range(6)]
    neutral = [f"#n{i}" for i in range(6)]
    out = []
    for _ in range(n):
        camp = left if rng.random() < 0.5 else right
        s = rng.sample(camp, 2)
        if rng.random() < 0.3:
            s.append(rng.choice(neutral))
        out.append(s)
    return out


# -- axis -----------------------------------------------------------------------------
def test_poles_are_anchored_exactly():
    ax = al.AxisModel(toy_vectors())
    assert ax.scores["#voteblue"] == -1.0
    assert ax.scores["#votered"] == 1.0
    assert ax.project(ax.vectors["#voteblue"]) == -1.0
    assert ax.project(ax.vectors["#votered"]) == 1.0


@given(st.floats(-50, 50), st.floats(0.01, 100), st.integers(0, 1000))
def test_scores_invariant_to_translation_and_scale(shift, scale, seed):
    v = toy_vectors(seed)
    moved = al.HashtagVectors(v.words, scale * v.matrix + shift)
    a, b = al.AxisModel(v), al.AxisModel(moved)
    for w in v.words:
        assert abs(a.scores[w] - b.scores[w]) <= 1e-10


def test_scores_are_clipped_to_unit_interval():
    ax = al.AxisModel(toy_vectors(3))
    assert all(-1.0 <= s <= 1.0 for s in ax.scores.values())
    mm = al.AxisModel(toy_vectors(3), scaling="minmax")
    assert min(mm.scores.values()) == -1.0 and max(mm.scores.values()) == 1.0


def test_axis_errors():
    v = toy_vectors()
    with pytest.raises(al.AlignmentError):
        al.AxisModel(v, pole_left="#missing")
    same = al.HashtagVectors(["#voteblue", "#votered"], np.ones((2, 3)))
    with pytest.raises(al.AlignmentError):
        al.AxisModel(same)
    with pytest.raises(al.AlignmentError):
        al.AxisModel(v, scaling="weird")


def test_skipgram_separates_camps():
    vec = al.train_hashtag_vectors(synthetic_corpus(), dim=16, epochs=3, seed=0)
    ax = al.AxisModel(vec)
    left = np.mean([ax.scores[f"#l{i}"] for i in range(6)])
    right = np.mean([ax.scores[f"#r{i}"] for i in range(6)])
    neutral = np.mean([ax.scores[f"#n{i}"] for i in range(6)])
    assert left < neutral < right
    assert right - left > 0.5


def test_skipgram_is_seed_deterministic(tmp_path):
    a = al.train_hashtag_vectors(synthetic_corpus(500), dim=8, epochs=1, seed=5)
    b = al.train_hashtag_vectors(synthetic_corpus(500), dim=8, epochs=1, seed=5)
    assert np.array_equal(a.matrix, b.matrix)
    a.save(tmp_path / "v.txt")
    c = al.HashtagVectors.load(tmp_path / "v.txt")
    assert c.words == a.words and np.array_equal(c.matrix, a.matrix)


def test_skipgram_requires_poles():
    with pytest.raises(al.AlignmentError):
        al.train_hashtag_vectors([["#a", "#b"]] * 10)


# -- domains and links ------------------------------------------------------------------
def test_domain_lookup_normalizes_and_counts_malformed():
    ds = al.DomainScores({"Left.example": -0.9, "right.example": 0.7})
    assert al.score_link(ds, "https://www.left.example/story") == -0.9
    assert al.score_link(ds, "unknown.example") is None
    assert al.score_link(ds, "not a domain") is None
    assert ds.malformed["not a domain"] == 1
    with pytest.raises(al.AlignmentError):
        al.DomainScores({"x.example": 1.5})


def test_domain_table_round_trip(tmp_path):
    ds = al.DomainScores({"a.example": -0.25, "b.example": 0.5})
    ds.save(tmp_path / "d.tsv")
    assert al.DomainScores.load(tmp_path / "d.tsv").scores == ds.scores


# -- tweets, calibration and windows ----------------------------------------------------
def closed_world(seed=0, n_accounts=8, n_tweets=400):
    """Viewer following every other account; tweets with known tags and links."""
    rng = random.Random(seed)
    w = World(seed=seed)
    accts = [w.create_account() for _ in range(n_accounts)]
    viewer = accts[0]
    for a in accts[1:]:
        w.follow(viewer, a)
    vec = toy_vectors(seed)
    tags = vec.words
    doms = {f"d{i}.example": rng.uniform(-1, 1) for i in range(10)}
    for t in range(n_tweets):
        w.advance(t)
        author = rng.choice(accts)
        w.post_tweet(author, hashtags=rng.sample(tags, rng.randint(0, 3)),
                     links=rng.sample(sorted(doms), rng.randint(0, 2)))
    models = al.AlignmentModels(al.AxisModel(vec), al.DomainScores(doms))
    return w, viewer, accts, models


def test_calibration_identity():
    w, viewer, accts, models = closed_world(1)
    ref = w.user_timeline(accts[3], 200)
    models.calibration = al.calibrate(models, ref)
    for m in al.METHODS:
        s, n = al.calibrated_mean(ref, m, models)
        assert n > 0
        assert abs(s) <= 1e-12
        raw = [al.score_tweet(t, m, models) for t in ref]
        raw = [x for x in raw if x is not None]
        assert abs(models.calibration.offset(m) - math.fsum(raw) / len(raw)) <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_home_score_equals_brute_force_window_mean(seed):
    w, viewer, accts, models = closed_world(seed)
    models.calibration = al.Calibration(0.05, -0.1)
    rep = al.account_scores(w, viewer, models, "hashtag")
    # brute force: newest 50 tweets of all friends, per-tweet mean of tag scores
    all_friend_tweets = [t for t in w.tweets if t.author in w.friends(viewer)]
    window = heapq.nlargest(al.HOME_WINDOW, all_friend_tweets, key=lambda t: t.id)
    vals = []
    for t in window:
        sc = [models.axis.scores[h] for h in t.hashtags if h in models.axis.scores]
        if sc:
            vals.append(sum(sc) / len(sc) - (-0.1))
    assert rep.s_h == math.fsum(vals) / len(vals)
    assert rep.coverage["home"] == len(vals)


def test_score_tweet_none_without_entities(small_world):
    w, ids = small_world
    models = al.AlignmentModels(al.AxisModel(toy_vectors()), al.DomainScores({"left.example": -1.0}))
    t = w.tweets[w.post_tweet(ids[0], text="plain")]
    assert al.score_tweet(t, "hashtag", models) is None
    assert al.score_tweet(t, "link", models) is None
    assert al.score_tweet(w.tweets[0], "link", models) == -1.0
    with pytest.raises(al.AlignmentError):
        al.score_tweet(t, "vibes", models)


def test_forward_fill_and_bias_test():
    assert al.forward_fill([None, 1.0, None, float("nan"), 2.0]) == [None, 1.0, 1.0, 1.0, 2.0]
    res = al.newsfeed_bias_test([0.1, 0.2, None, 0.4], [0.0, 0.1, 0.3, 0.2])
    assert res.n == (3,)
    with pytest.raises(al.AlignmentError):
        al.newsfeed_bias_test([None, 0.1], [0.2, None])
