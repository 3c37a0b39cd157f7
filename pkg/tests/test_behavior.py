import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize
from scipy.stats import chisquare

from drifters import behavior as bh
from drifters.platform import MINUTES_PER_DAY, World
from drifters.worldgen import generate_world, scenario_config


def powerlaw_mle(samples, lo, hi):
    """Exponent maximizing the truncated power-law likelihood on [lo, hi]."""
    logs = np.log(samples).sum()
    n = len(samples)

    def nll(a):
        e = 1.0 - a
        z = math.log(hi / lo) if abs(e) < 1e-12 else math.log((hi**e - lo**e) / e)
        return a * logs + n * z

    return optimize.minimize_scalar(nll, bounds=(0.01, 3.0), method="bounded").x


# -- selection -------------------------------------------------------------------
def test_action_and_source_frequencies_match_table():
    cfg = bh.BehaviorConfig()
    rng = random.Random(7)
    n = 100_000
    actions = Counter()
    sources = {a: Counter() for a in bh.ACTIONS}
    for _ in range(n):
        a = bh.draw_action(rng, cfg)
        actions[a] += 1
        sources[a][bh.select_source(rng, cfg, a)] += 1
    obs = [actions[a] for a in bh.ACTIONS]
    exp = [n * bh.DEFAULT_ACTION_PROBS[a] for a in bh.ACTIONS]
    assert chisquare(obs, exp).pvalue > 0.01
    for a in bh.ACTIONS:
        table = bh.DEFAULT_SOURCE_PROBS[a]
        assert set(sources[a]) <= set(table)
        if len(table) == 1:
            continue
        keys = list(table)
        tot = sum(sources[a].values())
        assert chisquare([sources[a][k] for k in keys], [tot * table[k] for k in keys]).pvalue > 0.01


def test_probability_order_does_not_change_draws():
    base = bh.BehaviorConfig()
    shuffled = bh.BehaviorConfig(
        action_probs=dict(reversed(list(base.action_probs.items()))),
        source_probs={a: dict(sorted(s.items())) for a, s in reversed(list(base.source_probs.items()))},
    )
    r1, r2 = random.Random(3), random.Random(3)
    for _ in range(500):
        a1, a2 = bh.draw_action(r1, base), bh.draw_action(r2, shuffled)
        assert a1 == a2
        assert bh.select_source(r1, base, a1) == bh.select_source(r2, shuffled, a2)


@pytest.mark.parametrize("bad", [
    {"action_probs": {"like": 1.0}},
    {"action_probs": {**bh.DEFAULT_ACTION_PROBS, "like": 0.5}},
    {"source_probs": {**bh.DEFAULT_SOURCE_PROBS, "like": {"nowhere": 1.0}}},
    {"source_probs": {**bh.DEFAULT_SOURCE_PROBS, "reply": {"mention_timeline": 0.5}}},
    {"alpha": 0.0},
    {"min_interval": 500.0},
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        bh.BehaviorConfig(**bad)


# -- timing -----------------------------------------------------------------------
def test_interval_samples_are_capped_and_fit_the_exponent():
    cfg = bh.BehaviorConfig()
    scale = bh.resolve_scale(cfg)
    rng = random.Random(11)
    xs = np.array([bh.next_interval(rng, cfg, scale) for _ in range(100_000)])
    assert xs.max() <= 7 * 60
    assert xs.min() >= cfg.min_interval * scale
    a_hat = powerlaw_mle(xs, cfg.min_interval * scale, cfg.max_sleep * scale)
    assert abs(a_hat - 0.9) <= 0.05


def test_truncated_mean_matches_quadrature():
    from scipy.integrate import quad

    for alpha in (0.5, 0.9, 1.0, 1.7):
        num = quad(lambda t: t ** (1 - alpha), 1, 420)[0]
        den = quad(lambda t: t ** (-alpha), 1, 420)[0]
        assert bh.truncated_power_law_mean(alpha, 1, 420) == pytest.approx(num / den, rel=1e-9)


def test_scale_targets_band_midpoint_and_rejects_infeasible_band():
    cfg = bh.BehaviorConfig()
    scale = bh.calibrate_interval_scale(cfg)
    mean = bh.truncated_power_law_mean(cfg.alpha, cfg.min_interval, cfg.max_sleep)
    assert cfg.awake_minutes / (scale * mean) == pytest.approx(25.0)
    with pytest.raises(bh.BehaviorError):
        bh.scale_for_rate(mean, (1.0, 2.0), cfg.awake_minutes)


@given(st.floats(0, 10 * MINUTES_PER_DAY))
def test_no_wake_during_sleep(t):
    cfg = bh.BehaviorConfig()
    out = bh.push_past_sleep(t, cfg)
    assert out >= t
    assert not cfg.sleep_start <= out % MINUTES_PER_DAY < cfg.sleep_end


def test_dry_run_realizes_target_rate():
    world = generate_world(scenario_config("paper-like", 300), seed=5)
    seed_acct = world.meta.seeds["Center"]
    cfg = bh.BehaviorConfig()
    st_ = bh.initialize_drifter(world, seed_acct, random.Random(2), cfg, start=0)
    per_day = []
    for day in range(100):
        world.advance(day * MINUTES_PER_DAY)
        per_day.append(len(bh.run_drifter_day(world, st_, cfg)))
    assert 20 <= np.mean(per_day) <= 30


# -- constraints -------------------------------------------------------------------
def test_constraint_sweep():
    cfg = bh.BehaviorConfig()
    for friends in range(301):
        for followers in range(301):
            f_ok = bh.follow_allowed(cfg, friends, followers)
            u_ok = bh.unfollow_allowed(cfg, friends)
            assert f_ok or u_ok
            assert f_ok == (friends < followers + 113)
            assert u_ok == (friends >= 50)
            for action in ("follow", "unfollow"):
                out = bh.apply_constraints(action, cfg, friends, followers)
                assert out in ("follow", "unfollow")
                assert (bh.follow_allowed if out == "follow" else
                        lambda c, fr, fo: bh.unfollow_allowed(c, fr))(cfg, friends, followers)


def _drifter_with_friends(n_friends=60):
    w = World(seed=0)
    others = [w.create_account() for _ in range(n_friends + 1)]
    me = w.create_account(automation_score=1.0)
    for o in others:
        w.follow(me, o)
    rng = random.Random(4)
    return w, bh.DrifterState(me, "Center", others[0], 0.0, 1.0, rng)


def test_initial_friend_never_unfollowed():
    w, d = _drifter_with_friends()
    cfg = bh.BehaviorConfig()
    for _ in range(10_000):
        ev = bh.execute_action(w, d, "unfollow", "friends", cfg)
        assert ev.target != d.initial_friend
        assert w.is_following(d.account, d.initial_friend)
        w.follow(d.account, ev.target)


def test_unfollow_weights_favor_recent_friends():
    w, d = _drifter_with_friends(10)
    cands, weights = bh.unfollow_weights(w, d, bh.BehaviorConfig())
    assert d.initial_friend not in cands
    assert weights == sorted(weights)
    assert cands[0] == w.friends_latest(d.account, 1)[0]


def test_actions_respect_sources(small_world):
    w, ids = small_world
    d = bh.DrifterState(ids[0], "Center", ids[1], 0.0, 1.0, random.Random(0))
    cfg = bh.BehaviorConfig()
    with pytest.raises(bh.BehaviorError):
        bh.execute_action(w, d, "reply", "trends", cfg)
    ev = bh.execute_action(w, d, "reply", "mention_timeline", cfg)
    assert ev.skipped and ev.outcome == "skip:empty_source"
    ev = bh.execute_action(w, d, "like", "home_timeline", cfg)
    assert not ev.skipped
    assert w.tweets[ev.target].author != ids[0]
    ev = bh.execute_action(w, d, "tweet", "random_quotes", cfg)
    assert w.tweets[ev.target].text in bh.QUOTES


def test_reply_answers_oldest_unreplied_mention(small_world):
    w, ids = small_world
    me = ids[2]
    t0 = w.post_tweet(me, text="hello")
    r1 = w.post_tweet(ids[3], "reply", t0)
    r2 = w.post_tweet(ids[4], "reply", t0)
    d = bh.DrifterState(me, "Center", ids[1], 0.0, 1.0, random.Random(0))
    cfg = bh.BehaviorConfig()
    ev = bh.execute_action(w, d, "reply", "mention_timeline", cfg)
    assert w.tweets[ev.target].ref == r1
    ev = bh.execute_action(w, d, "reply", "mention_timeline", cfg)
    assert w.tweets[ev.target].ref == r2
    ev = bh.execute_action(w, d, "reply", "mention_timeline", cfg)
    assert ev.skipped


def test_initialize_drifter_follows_seed_and_ten_more():
    world = generate_world(scenario_config("paper-like", 300), seed=1)
    s = world.meta.seeds["Left"]
    st_ = bh.initialize_drifter(world, s, random.Random(0), group="Left")
    friends = world.friends(st_.account)
    assert len(friends) == 11
    assert next(iter(friends)) == s
    assert st_.initial_friend == s
