"""Synthetic population and background activity with known ground truth.

Agents get a latent alignment drawn from a Beta mixture, an automation score,
a low-credibility sharing propensity and an activity rate. The follow graph is
grown by preferential attachment reweighted by side homophily, and five news
seed accounts with alignment-matched follower bases act as drifter anchors.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

import numpy as np

from drifters.platform import MINUTES_PER_DAY, World

BACKGROUND_ACTIONS = ("post", "retweet", "like", "reply", "explore")
BIN_EDGES = (-0.6, -0.2, 0.2, 0.6)
DRIFTER_LABEL_WINDOW = 20


class ConfigError(ValueError):
    pass


@dataclass
class SeedAccountSpec:
    label: str
    theta: float
    popularity: int  # total followers
    within_group_popularity: float  # share of same-bin agents following the seed
    activity_rate: float = 10.0  # posts per day
    n_friends: int = 20


@dataclass
class LowCredCurve:
    """Two logistic arms: propensity rises toward ``left_level``/``right_level``
    as alignment moves past ``midpoint`` on either side."""

    base: float = 0.01
    left_level: float = 0.03
    right_level: float = 0.15
    midpoint: float = 0.3
    steepness: float = 30.0

    def __call__(self, theta: float) -> float:
        def sig(x):
            return 1.0 / (1.0 + math.exp(-self.steepness * (x - self.midpoint)))

        p = self.base + (self.right_level - self.base) * sig(theta) + (self.left_level - self.base) * sig(-theta)
        return min(max(p, 0.0), 1.0)


@dataclass
class WorldConfig:
    n_agents: int = 2000
    # Beta mixture on [0, 1], mapped to [-1, 1]
    mixture_weights: tuple[float, float, float] = (0.4, 0.2, 0.4)
    left_beta: tuple[float, float] = (2.0, 8.0)
    center_beta: tuple[float, float] = (8.0, 8.0)
    right_beta: tuple[float, float] = (8.0, 2.0)
    partisan_threshold: float = 0.3
    homophily: float = 0.99
    mean_friends: float = 20.0
    followback_base: float = 0.1
    followback_partisan_boost: float = 0.5
    bot_followback: float = 0.6
    bot_fraction: float = 0.1
    bot_activity_factor: float = 2.0
    lowcred: LowCredCurve = field(default_factory=LowCredCurve)
    activity_mean: float = 2.0  # background actions per agent per day
    activity_sigma: float = 0.75
    action_mix: dict[str, float] = field(default_factory=lambda: {
        "post": 0.5, "retweet": 0.25, "like": 0.15, "reply": 0.05, "explore": 0.05})
    link_prob: float = 0.6
    hashtag_count_probs: tuple[float, ...] = (0.3, 0.35, 0.25, 0.1)
    n_side_hashtags: int = 40
    n_neutral_hashtags: int = 40
    n_side_domains: int = 40
    n_neutral_domains: int = 30
    n_lowcred_domains: int = 15
    non_english_fraction: float = 0.05
    seeds: list[SeedAccountSpec] = field(default_factory=lambda: paper_seed_specs(2000))

    def __post_init__(self):
        self.mixture_weights = tuple(self.mixture_weights)
        self.hashtag_count_probs = tuple(self.hashtag_count_probs)
        if isinstance(self.lowcred, dict):
            self.lowcred = LowCredCurve(**self.lowcred)
        self.seeds = [s if isinstance(s, SeedAccountSpec) else SeedAccountSpec(**s) for s in self.seeds]
        self.validate()

    def validate(self) -> None:
        probs = {
            "homophily": self.homophily, "followback_base": self.followback_base,
            "bot_fraction": self.bot_fraction, "link_prob": self.link_prob,
            "bot_followback": self.bot_followback, "non_english_fraction": self.non_english_fraction,
        }
        for name, p in probs.items():
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        if self.followback_base + self.followback_partisan_boost > 1.0 or self.followback_partisan_boost < 0:
            raise ConfigError("followback_base + followback_partisan_boost must lie in [0, 1]")
        if self.n_agents < 1:
            raise ConfigError("n_agents must be positive")
        if abs(sum(self.mixture_weights) - 1.0) > 1e-9 or min(self.mixture_weights) < 0:
            raise ConfigError("mixture_weights must be a probability vector")
        if abs(sum(self.action_mix.values()) - 1.0) > 1e-9 or set(self.action_mix) != set(BACKGROUND_ACTIONS):
            raise ConfigError(f"action_mix must be a probability vector over {BACKGROUND_ACTIONS}")
        if abs(sum(self.hashtag_count_probs) - 1.0) > 1e-9:
            raise ConfigError("hashtag_count_probs must sum to 1")
        for lvl in (self.lowcred.base, self.lowcred.left_level, self.lowcred.right_level):
            if not 0.0 <= lvl <= 1.0:
                raise ConfigError("low-credibility levels must lie in [0, 1]")
        if len(self.seeds) != 5:
            raise ConfigError("exactly five seed accounts are required")
        thetas = [s.theta for s in self.seeds]
        if thetas != sorted(thetas):
            raise ConfigError("seed accounts must be ordered left to right")
        for s in self.seeds:
            if s.popularity > self.n_agents:
                raise ConfigError(f"seed {s.label}: popularity {s.popularity} exceeds n_agents {self.n_agents}")
            if not 0.0 <= s.within_group_popularity <= 1.0:
                raise ConfigError(f"seed {s.label}: within_group_popularity must lie in [0, 1]")


# Supp. Table 1 bold rows: followers (millions) and share of same-bin active accounts
_PAPER_SEEDS = (
    ("Left", -0.8, 1.2, 0.20),
    ("CLeft", -0.4, 16.4, 0.43),
    ("Center", 0.0, 4.1, 0.14),
    ("CRight", 0.4, 18.1, 0.22),
    ("Right", 0.8, 1.5, 0.61),
)


def paper_seed_specs(n_agents: int) -> list[SeedAccountSpec]:
    """Seeds scaled to ``n_agents``: a 15-25% follower base ordered like the real accounts."""
    top = max(f for _, _, f, _ in _PAPER_SEEDS)
    out = []
    for label, theta, followers_m, share in _PAPER_SEEDS:
        frac = 0.15 + 0.10 * followers_m / top
        out.append(SeedAccountSpec(label, theta, int(round(frac * n_agents)), share))
    return out


def symmetric_seed_specs(n_agents: int) -> list[SeedAccountSpec]:
    return [SeedAccountSpec(label, theta, int(round(0.2 * n_agents)), 0.3)
            for label, theta, _, _ in _PAPER_SEEDS]


SCENARIOS = ("paper-like", "symmetric-control", "no-homophily")


def scenario_config(name: str, n_agents: int = 2000, **overrides) -> WorldConfig:
    if name == "paper-like":
        cfg = WorldConfig(n_agents=n_agents, seeds=paper_seed_specs(n_agents))
    elif name == "symmetric-control":
        cfg = WorldConfig(
            n_agents=n_agents,
            homophily=0.0,
            followback_partisan_boost=0.0,
            followback_base=0.3,
            bot_followback=0.3,
            lowcred=LowCredCurve(base=0.05, left_level=0.05, right_level=0.05),
            seeds=symmetric_seed_specs(n_agents),
        )
    elif name == "no-homophily":
        cfg = WorldConfig(n_agents=n_agents, homophily=0.0, seeds=paper_seed_specs(n_agents))
    else:
        raise ConfigError(f"unknown scenario {name!r}; choose from {SCENARIOS}")
    return replace(cfg, **overrides) if overrides else cfg


# -- vocabulary -------------------------------------------------------------
@dataclass
class Vocab:
    left_tags: list[str]
    right_tags: list[str]
    neutral_tags: list[str]
    left_domains: list[str]
    right_domains: list[str]
    neutral_domains: list[str]
    left_lowcred: list[str]
    right_lowcred: list[str]
    domain_scores: dict[str, float]
    seed_domains: dict[str, str]

    @property
    def lowcred_domains(self) -> list[str]:
        return self.left_lowcred + self.right_lowcred


def build_vocab(config: WorldConfig, rng: np.random.Generator) -> Vocab:
    left_tags = ["#voteblue"] + [f"#blue{i:02d}" for i in range(1, config.n_side_hashtags)]
    right_tags = ["#votered"] + [f"#red{i:02d}" for i in range(1, config.n_side_hashtags)]
    neutral_tags = [f"#topic{i:02d}" for i in range(config.n_neutral_hashtags)]
    left_domains = [f"leftnews{i:02d}.com" for i in range(config.n_side_domains)]
    right_domains = [f"rightnews{i:02d}.com" for i in range(config.n_side_domains)]
    neutral_domains = [f"news{i:02d}.com" for i in range(config.n_neutral_domains)]
    left_lowcred = [f"leftfake{i:02d}.net" for i in range(config.n_lowcred_domains)]
    right_lowcred = [f"rightfake{i:02d}.net" for i in range(config.n_lowcred_domains)]
    scores: dict[str, float] = {}
    for d in left_domains:
        scores[d] = -float(rng.uniform(0.3, 1.0))
    for d in right_domains:
        scores[d] = float(rng.uniform(0.3, 1.0))
    for d in neutral_domains:
        scores[d] = float(rng.uniform(-0.2, 0.2))
    for d in left_lowcred:
        scores[d] = -float(rng.uniform(0.6, 1.0))
    for d in right_lowcred:
        scores[d] = float(rng.uniform(0.6, 1.0))
    seed_domains = {}
    for s in config.seeds:
        dom = f"{s.label.lower()}-daily.com"
        seed_domains[s.label] = dom
        scores[dom] = float(s.theta)
    return Vocab(left_tags, right_tags, neutral_tags, left_domains, right_domains,
                 neutral_domains, left_lowcred, right_lowcred, scores, seed_domains)


def _zipf_cum(n: int, s: float = 1.0) -> list[float]:
    w = [1.0 / (i + 1) ** s for i in range(n)]
    total = sum(w)
    acc, out = 0.0, []
    for x in w:
        acc += x / total
        out.append(acc)
    out[-1] = 1.0
    return out


class ContentModel:
    """Draws hashtags and link domains conditioned on an author's alignment."""

    def __init__(self, config: WorldConfig, vocab: Vocab):
        self.config = config
        self.vocab = vocab
        self._tag_cum = {n: _zipf_cum(n) for n in {len(vocab.left_tags), len(vocab.neutral_tags)}}
        self._dom_cum = {n: _zipf_cum(n, 0.8) for n in {len(vocab.left_domains), len(vocab.neutral_domains),
                                                          len(vocab.left_lowcred)}}
        self._k_cum = list(np.cumsum(config.hashtag_count_probs))

    @staticmethod
    def _pick(rng: random.Random, items: list[str], cum: list[float]) -> str:
        x = rng.random()
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[mid] > x:
                hi = mid
            else:
                lo = mid + 1
        return items[lo]

    def hashtags(self, rng: random.Random, theta: float) -> list[str]:
        x = rng.random()
        k = 0
        while k < len(self._k_cum) - 1 and x >= self._k_cum[k]:
            k += 1
        v = self.vocab
        side = v.right_tags if theta > 0 else v.left_tags
        out = []
        for _ in range(k):
            pool = side if rng.random() < abs(theta) else v.neutral_tags
            tag = self._pick(rng, pool, self._tag_cum[len(pool)])
            if tag not in out:
                out.append(tag)
        return out

    def link(self, rng: random.Random, theta: float, propensity: float) -> list[str]:
        if rng.random() >= self.config.link_prob:
            return []
        v = self.vocab
        right = theta > 0 or (theta == 0 and rng.random() < 0.5)
        if rng.random() < propensity:
            pool = v.right_lowcred if right else v.left_lowcred
        elif rng.random() < abs(theta):
            pool = v.right_domains if right else v.left_domains
        else:
            pool = v.neutral_domains
        return [self._pick(rng, pool, self._dom_cum[len(pool)])]


# -- generation ---------------------------------------------------------------
@dataclass
class Population:
    """Ground-truth bookkeeping attached to a generated world as ``world.meta``."""

    config: WorldConfig
    vocab: Vocab
    content: ContentModel
    agents: list[int]
    seeds: dict[str, int]
    labels: dict[int, int]  # agent -> -1 / 0 / +1 side label
    followback: dict[int, float]
    drifters: set[int] = field(default_factory=set)


def side_label(theta: float, threshold: float) -> int:
    if theta > threshold:
        return 1
    if theta < -threshold:
        return -1
    return 0


def homophily_weight(a: int, b: int, h: float) -> float:
    """Weight for label ``a`` following (or engaging with) label ``b``; labels are -1, 0, +1.

    Side preference is a partisan trait: partisans weight other labels by 1-h,
    center accounts weight everyone equally.
    """
    if a == 0 or a == b:
        return 1.0
    return 1.0 - h


def bin_of(theta: float) -> int:
    """Index of the five political bins (Left .. Right) containing ``theta``."""
    i = 0
    while i < len(BIN_EDGES) and theta >= BIN_EDGES[i]:
        i += 1
    return i


def sample_alignment(config: WorldConfig, rng: np.random.Generator, n: int) -> np.ndarray:
    comp = rng.choice(3, size=n, p=config.mixture_weights)
    params = (config.left_beta, config.center_beta, config.right_beta)
    x = np.empty(n)
    for k, (a, b) in enumerate(params):
        idx = comp == k
        x[idx] = rng.beta(a, b, size=int(idx.sum()))
    return 2.0 * x - 1.0


def alignment_cdf(config: WorldConfig, theta):
    """CDF of the configured alignment mixture on [-1, 1]."""
    from scipy.stats import beta

    x = (np.asarray(theta) + 1.0) / 2.0
    params = (config.left_beta, config.center_beta, config.right_beta)
    return sum(w * beta.cdf(x, a, b) for w, (a, b) in zip(config.mixture_weights, params))


def followback_probability(config: WorldConfig, theta: float, automation: float) -> float:
    p = config.followback_base + config.followback_partisan_boost * abs(theta)
    if automation > 0.5:
        p = max(p, config.bot_followback)
    return min(p, 1.0)


def generate_world(config: WorldConfig, seed: int, world: World | None = None) -> World:
    """Populate ``world`` (or a fresh one) with agents, seeds and a follow graph."""
    config.validate()
    ss = np.random.SeedSequence(seed)
    gen_rng = np.random.default_rng(ss.spawn(1)[0])
    world = world if world is not None else World(seed=seed)
    n = config.n_agents
    vocab = build_vocab(config, gen_rng)
    content = ContentModel(config, vocab)

    theta = np.clip(sample_alignment(config, gen_rng, n), -1.0, 1.0)
    is_bot = gen_rng.random(n) < config.bot_fraction
    automation = np.where(is_bot, 0.5 + 0.5 * gen_rng.beta(2, 2, n), 0.5 * gen_rng.beta(1.5, 6, n))
    automation = np.where(is_bot, np.maximum(automation, 0.5 + 1e-9), np.minimum(automation, 0.5))
    act = np.exp(gen_rng.normal(math.log(config.activity_mean) - config.activity_sigma**2 / 2,
                                config.activity_sigma, n))
    act = np.where(is_bot, act * config.bot_activity_factor, act)
    lang = np.where(gen_rng.random(n) < config.non_english_fraction, "es", "en")
    m_out = np.maximum(1, np.round(np.exp(gen_rng.normal(math.log(config.mean_friends) - 0.245, 0.7, n))))

    agents = []
    labels = {}
    fb = {}
    for i in range(n):
        t = float(theta[i])
        a = world.create_account(
            automation_score=float(automation[i]), alignment=t,
            low_cred_propensity=config.lowcred(t), activity_rate=float(act[i]),
            language=str(lang[i]), label="agent",
        )
        agents.append(a)
        labels[a] = side_label(t, config.partisan_threshold)
        fb[a] = followback_probability(config, t, float(automation[i]))

    pop = Population(config, vocab, content, agents, {}, labels, fb)
    world.meta = pop

    # preferential attachment with homophily reweighting; new agents follow older ones
    lab = np.array([labels[a] for a in agents])
    h = config.homophily
    wmat = np.array([[homophily_weight(x, y, h) for y in (-1, 0, 1)] for x in (-1, 0, 1)])
    indeg = np.zeros(n)
    ids = np.array(agents)
    for i in range(1, n):
        w = (indeg[:i] + 1.0) * wmat[lab[i] + 1, lab[:i] + 1]
        k = int(min(m_out[i], np.count_nonzero(w)))
        if k == 0:
            continue
        targets = gen_rng.choice(i, size=k, replace=False, p=w / w.sum())
        for j in sorted(targets.tolist()):
            world.follow(int(ids[i]), int(ids[j]))
            indeg[j] += 1
            if gen_rng.random() < fb[int(ids[j])] * (1.0 if is_bot[j] else wmat[lab[j] + 1, lab[i] + 1]):
                world.follow(int(ids[j]), int(ids[i]))
                indeg[i] += 1

    # seed news accounts with alignment-matched follower bases
    bins = np.array([bin_of(t) for t in theta])
    for b, spec in enumerate(config.seeds):
        sid = world.create_account(alignment=spec.theta, activity_rate=spec.activity_rate,
                                   language="en", label=f"seed:{spec.label}")
        pop.seeds[spec.label] = sid
        in_bin = np.flatnonzero(bins == b)
        n_within = int(round(spec.within_group_popularity * len(in_bin)))
        if n_within > spec.popularity:
            raise ConfigError(f"seed {spec.label}: {n_within} within-bin followers exceed popularity {spec.popularity}")
        chosen = set(gen_rng.choice(in_bin, size=n_within, replace=False).tolist()) if n_within else set()
        rest = np.array([i for i in range(n) if i not in chosen and bins[i] != b])
        n_rest = min(spec.popularity - n_within, len(rest))
        if n_rest > 0:
            w = np.exp(-np.abs(theta[rest] - spec.theta) / 0.4)
            chosen |= set(gen_rng.choice(rest, size=n_rest, replace=False, p=w / w.sum()).tolist())
        for i in sorted(chosen):
            world.follow(int(ids[i]), sid)
        # seeds follow a handful of same-bin English accounts
        friend_pool = [i for i in in_bin.tolist() if lang[i] == "en"]
        k = min(spec.n_friends, len(friend_pool))
        for i in sorted(gen_rng.choice(friend_pool, size=k, replace=False).tolist()) if k else []:
            world.follow(sid, int(ids[i]))

    world.observers.append(_followback_observer)
    return world


def _followback_observer(op: str, world: World, follower: int, friend: int) -> None:
    pop: Population = world.meta
    p = pop.followback.get(friend)
    if p is None or world.is_following(friend, follower):
        return
    if world.accounts[friend].automation_score <= 0.5:
        # humans follow back along the same side preference as they follow
        p *= homophily_weight(pop.labels[friend], _label_of(world, follower), pop.config.homophily)
    if world.rng.random() < p:
        world.follow(friend, follower)


# -- background activity ------------------------------------------------------
def plan_background(world: World, start: int, duration: int) -> list[tuple[int, int, int]]:
    """Sorted (tick, agent, action index) triples for agent activity in [start, start+duration)."""
    if duration <= 0:
        return []
    pop: Population = world.meta
    rng = np.random.default_rng(world.rng.getrandbits(64))
    agents = np.array(pop.agents)
    rates = np.array([world.accounts[a].activity_rate for a in pop.agents])
    counts = rng.poisson(rates * duration / MINUTES_PER_DAY)
    total = int(counts.sum())
    who = np.repeat(agents, counts)
    ticks = start + rng.integers(0, duration, size=total)
    probs = [pop.config.action_mix[a] for a in BACKGROUND_ACTIONS]
    kinds = rng.choice(len(BACKGROUND_ACTIONS), size=total, p=probs)
    order = np.lexsort((who, ticks))
    return list(zip(ticks[order].tolist(), who[order].tolist(), kinds[order].tolist()))


def plan_seed_posts(world: World, start: int, duration: int) -> list[tuple[int, int, int]]:
    pop: Population = world.meta
    rng = np.random.default_rng(world.rng.getrandbits(64))
    out = []
    for sid in pop.seeds.values():
        k = rng.poisson(world.accounts[sid].activity_rate * duration / MINUTES_PER_DAY)
        out.extend((int(t), sid, 0) for t in start + rng.integers(0, duration, size=k))
    out.sort()
    return out


def _recent_friend_tweet(world: World, agent: int, rng: random.Random, tries: int = 5):
    friends = world.friends(agent)
    if not friends:
        return None
    pool = tuple(friends)
    pop: Population = world.meta
    h = pop.config.homophily
    me = pop.labels.get(agent, 0)
    cands, weights = [], []
    for _ in range(min(tries, len(pool))):
        f = pool[int(rng.random() * len(pool))]
        tl = world._timeline[f]
        if tl:
            tw = world.tweets[tl[-1 - int(rng.random() * min(3, len(tl)))]]
            if tw.kind == "retweet":
                tw = world.tweets[tw.ref]
            if tw.author != agent:
                cands.append(tw)
                weights.append(homophily_weight(me, side_label(tw.lean, pop.config.partisan_threshold), h))
    if not cands:
        return None
    return cands[_choose(rng, weights)]


def _choose(rng: random.Random, weights: list[float]) -> int:
    x = rng.random() * sum(weights)
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if x < acc:
            return i
    return len(weights) - 1


def post_content(world: World, account: int, rng: random.Random) -> int:
    pop: Population = world.meta
    acct = world.accounts[account]
    if acct.label.startswith("seed:"):
        tags = pop.content.hashtags(rng, acct.alignment)
        links = [pop.vocab.seed_domains[acct.label[5:]]]
    else:
        tags = pop.content.hashtags(rng, acct.alignment)
        links = pop.content.link(rng, acct.alignment, acct.low_cred_propensity)
    return world.post_tweet(account, "original", hashtags=tags, links=links, text=" ".join(tags + links))


def execute_background(world: World, agent: int, kind: int) -> bool:
    """Perform one background action; returns False when nothing was done."""
    rng = world.rng
    action = BACKGROUND_ACTIONS[kind]
    if action == "post":
        post_content(world, agent, rng)
        return True
    if action == "explore":
        return _explore_follow(world, agent, rng)
    tw = _recent_friend_tweet(world, agent, rng)
    if tw is None:
        return False
    if action == "retweet":
        if world.has_retweeted(agent, tw.id):
            return False
        world.post_tweet(agent, "retweet", tw.id)
    elif action == "like":
        return world.like(agent, tw.id)
    elif action == "reply":
        world.post_tweet(agent, "reply", tw.id, text="reply")
    return True


def _explore_follow(world: World, agent: int, rng: random.Random) -> bool:
    pop: Population = world.meta
    friends = world.friends(agent)
    if not friends:
        return False
    pool = tuple(friends)
    f = pool[int(rng.random() * len(pool))]
    fof = world.friends(f)
    if not fof:
        return False
    cand_pool = tuple(fof)
    c = cand_pool[int(rng.random() * len(cand_pool))]
    if c == agent or c in friends:
        return False
    lab_c = pop.labels[c] if c in pop.labels else _label_of(world, c)
    w = homophily_weight(pop.labels.get(agent, 0), lab_c, pop.config.homophily)
    if rng.random() >= w:
        return False
    return world.follow(agent, c)


def _label_of(world: World, account: int) -> int:
    pop: Population = world.meta
    if account in pop.drifters:
        # drifters have no latent alignment; others judge them by what they post
        recent = world.user_timeline(account, DRIFTER_LABEL_WINDOW)
        if not recent:
            return 0
        lean = sum(t.lean for t in recent) / len(recent)
        return side_label(lean, pop.config.partisan_threshold)
    return side_label(world.accounts[account].alignment, pop.config.partisan_threshold)


def background_events(world: World, start: int, duration: int) -> list[tuple[int, int, int]]:
    """Merged, time-ordered plan of agent actions and seed posts (seed kind=0 means post)."""
    plan = plan_background(world, start, duration) + plan_seed_posts(world, start, duration)
    plan.sort()
    return plan


def background_step(world: World, duration: int) -> int:
    """Run background activity for ``duration`` minutes from the current clock."""
    start = world.clock
    done = 0
    for tick, agent, kind in background_events(world, start, duration):
        world.advance(tick)
        if execute_background(world, agent, kind):
            done += 1
    if duration > 0:
        world.advance(start + duration - 1)
    return done


def hashtag_corpus(world: World, n_sentences: int, seed: int) -> list[list[str]]:
    """Synthetic training corpus: hashtag sets of simulated posts, one sentence per post."""
    pop: Population = world.meta
    rng = random.Random(seed)
    authors = pop.agents + list(pop.seeds.values())
    weights = [world.accounts[a].activity_rate for a in authors]
    out = []
    for a in rng.choices(authors, weights=weights, k=n_sentences):
        tags = pop.content.hashtags(rng, world.accounts[a].alignment)
        if tags:
            out.append(tags)
    return out
