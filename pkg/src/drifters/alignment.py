"""Political alignment scoring of hashtags, links, tweets and accounts.

Hashtags are embedded with skip-gram negative sampling (hashtags of one tweet
form one sentence) and projected on the axis between two pole hashtags. Links
are scored by looking their domain up in a domain-score table. Tweet scores
average the scoreable entities; account scores average calibrated tweet
scores over a timeline window.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from drifters.platform import Tweet, World, normalize_domain, normalize_hashtag
from drifters.stats import TestResult, ttest_paired

METHODS = ("hashtag", "link")
VECTORS_MAGIC = "drifters-vectors"
VECTORS_VERSION = 1

HOME_WINDOW = 50
USER_WINDOW = 20
FRIENDS_WINDOW = 500


class AlignmentError(ValueError):
    pass


# -- embeddings ----------------------------------------------------------------
@dataclass
class HashtagVectors:
    words: list[str]
    matrix: np.ndarray
    min_count: int = 5
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.shape[0] != len(self.words):
            raise AlignmentError("one vector per word required")
        self.index = {w: i for i, w in enumerate(self.words)}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, tag: str) -> bool:
        return tag in self.index

    def __getitem__(self, tag: str) -> np.ndarray:
        return self.matrix[self.index[tag]]

    def cosine(self, a: str, b: str) -> float:
        u, v = self[a], self[b]
        return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{VECTORS_MAGIC} {VECTORS_VERSION} {len(self.words)} {self.dim} {self.min_count}\n")
            for w, row in zip(self.words, self.matrix):
                fh.write(w + " " + " ".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "HashtagVectors":
        with open(path, encoding="utf-8") as fh:
            head = fh.readline().split()
            if len(head) != 5 or head[0] != VECTORS_MAGIC:
                raise AlignmentError(f"{path}: not a vector table")
            if int(head[1]) != VECTORS_VERSION:
                raise AlignmentError(f"{path}: unsupported version {head[1]}")
            count, dim, min_count = int(head[2]), int(head[3]), int(head[4])
            words, rows = [], []
            for line in fh:
                parts = line.split()
                if len(parts) != dim + 1:
                    raise AlignmentError(f"{path}: bad row for {parts[:1]}")
                words.append(parts[0])
                rows.append([float(x) for x in parts[1:]])
        if len(words) != count:
            raise AlignmentError(f"{path}: header says {count} rows, found {len(words)}")
        return cls(words, np.array(rows).reshape(count, dim), min_count)


def train_hashtag_vectors(
    corpus: Iterable[Sequence[str]],
    dim: int = 32,
    min_count: int = 5,
    epochs: int = 5,
    seed: int = 0,
    negative: int = 5,
    lr: float = 0.025,
    batch_size: int = 64,
    poles: tuple[str, str] = ("#voteblue", "#votered"),
) -> HashtagVectors:
    """Skip-gram with negative sampling; every hashtag pair of a sentence is a (center, context) pair."""
    sentences = [[normalize_hashtag(h) for h in s] for s in corpus]
    if not sentences:
        raise AlignmentError("empty corpus")
    counts = Counter(h for s in sentences for h in s)
    for p in poles:
        if counts[p] < min_count:
            raise AlignmentError(f"pole {p} occurs {counts[p]} times, below min_count={min_count}")
    words = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
    index = {w: i for i, w in enumerate(words)}
    pairs = []
    for s in sentences:
        ids = [index[h] for h in dict.fromkeys(s) if h in index]
        for i in ids:
            for j in ids:
                if i != j:
                    pairs.append((i, j))
    rng = np.random.default_rng(seed)
    V = len(words)
    w_in = (rng.random((V, dim)) - 0.5) / dim
    w_out = np.zeros((V, dim))
    if not pairs:
        return HashtagVectors(words, w_in, min_count)
    pairs = np.array(pairs, dtype=np.int64)
    freq = np.array([counts[w] for w in words], dtype=float) ** 0.75
    noise_cum = np.cumsum(freq / freq.sum())
    total_steps = epochs * math.ceil(len(pairs) / batch_size)
    step = 0
    for _ in range(epochs):
        order = rng.permutation(len(pairs))
        for start in range(0, len(pairs), batch_size):
            alpha = lr * max(1e-4, 1.0 - step / total_steps)
            step += 1
            batch = pairs[order[start:start + batch_size]]
            c, o = batch[:, 0], batch[:, 1]
            negs = np.searchsorted(noise_cum, rng.random((len(batch), negative)))
            negs = np.minimum(negs, V - 1)
            v = w_in[c]
            u_pos = w_out[o]
            u_neg = w_out[negs]
            g_pos = _sigmoid(np.einsum("bd,bd->b", v, u_pos)) - 1.0
            g_neg = _sigmoid(np.einsum("bd,bkd->bk", v, u_neg))
            grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", g_neg, u_neg)
            np.add.at(w_out, o, -alpha * g_pos[:, None] * v)
            np.add.at(w_out, negs.ravel(), -alpha * (g_neg[:, :, None] * v[:, None, :]).reshape(-1, dim))
            np.add.at(w_in, c, -alpha * grad_v)
    return HashtagVectors(words, w_in, min_count)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30, 30)))


# -- axis projection -------------------------------------------------------------
@dataclass
class AxisModel:
    """Projection on the pole axis, rescaled so the left pole is -1 and the right pole +1.

    ``scaling="minmax"`` instead maps the extreme projections over the whole
    table to -1 and +1.
    """

    vectors: HashtagVectors
    pole_left: str = "#voteblue"
    pole_right: str = "#votered"
    scaling: str = "pole"
    axis: np.ndarray = field(init=False, repr=False)
    lo: float = field(init=False)
    hi: float = field(init=False)
    scores: dict[str, float] = field(init=False, repr=False)

    def __post_init__(self):
        for p in (self.pole_left, self.pole_right):
            if p not in self.vectors:
                raise AlignmentError(f"pole {p} missing from the vector table")
        self.axis = self.vectors[self.pole_right] - self.vectors[self.pole_left]
        norm = float(np.linalg.norm(self.axis))
        if norm == 0.0:
            raise AlignmentError("zero-length axis: poles share a vector")
        self.axis = self.axis / norm
        proj = self.vectors.matrix @ self.axis
        if self.scaling == "pole":
            self.lo = float(self.vectors[self.pole_left] @ self.axis)
            self.hi = float(self.vectors[self.pole_right] @ self.axis)
        elif self.scaling == "minmax":
            self.lo, self.hi = float(proj.min()), float(proj.max())
        else:
            raise AlignmentError(f"unknown scaling {self.scaling!r}")
        self.scores = {w: self.rescale(float(p)) for w, p in zip(self.vectors.words, proj)}
        if self.scaling == "pole":
            self.scores[self.pole_left] = -1.0
            self.scores[self.pole_right] = 1.0

    def rescale(self, proj: float) -> float:
        return min(1.0, max(-1.0, 2.0 * (proj - self.lo) / (self.hi - self.lo) - 1.0))

    def project(self, vec: np.ndarray) -> float:
        return self.rescale(float(np.asarray(vec) @ self.axis))


def score_hashtag(vectors: HashtagVectors, axis_model: AxisModel, hashtag: str) -> float | None:
    tag = normalize_hashtag(hashtag)
    if tag not in vectors:
        return None
    if vectors is axis_model.vectors:
        return axis_model.scores[tag]
    return axis_model.project(vectors[tag])


# -- domain scores ----------------------------------------------------------------
@dataclass
class DomainScores:
    scores: dict[str, float]
    malformed: Counter = field(default_factory=Counter)

    def __post_init__(self):
        clean = {}
        for d, s in self.scores.items():
            s = float(s)
            if not -1.0 <= s <= 1.0:
                raise AlignmentError(f"domain score for {d} outside [-1, 1]: {s}")
            clean[normalize_domain(d)] = s
        self.scores = clean

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("domain\tscore\n")
            for d in sorted(self.scores):
                fh.write(f"{d}\t{self.scores[d]!r}\n")

    @classmethod
    def load(cls, path: str | Path) -> "DomainScores":
        scores = {}
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                parts = line.rstrip("\n").split("\t")
                if i == 0 and parts[0] == "domain":
                    continue
                if len(parts) != 2:
                    raise AlignmentError(f"{path}:{i + 1}: expected two columns")
                scores[parts[0]] = float(parts[1])
        return cls(scores)


def _well_formed(domain: str) -> bool:
    return bool(domain) and "." in domain and not any(ch.isspace() for ch in domain) \
        and not domain.startswith(".") and not domain.endswith(".")


def score_link(domain_scores: DomainScores, url_domain: str) -> float | None:
    d = normalize_domain(url_domain)
    if not _well_formed(d):
        domain_scores.malformed[url_domain] += 1
        return None
    return domain_scores.scores.get(d)


# -- tweets and calibration -----------------------------------------------------------
@dataclass
class Calibration:
    s_c_link: float = 0.0
    s_c_hashtag: float = 0.0
    reference: str = ""

    def offset(self, method: str) -> float:
        return self.s_c_link if method == "link" else self.s_c_hashtag


@dataclass
class AlignmentModels:
    axis: AxisModel
    domains: DomainScores
    calibration: Calibration = field(default_factory=Calibration)

    @property
    def vectors(self) -> HashtagVectors:
        return self.axis.vectors


def score_tweet(tweet: Tweet, method: str, models: AlignmentModels) -> float | None:
    """Mean score of the tweet's scoreable entities; None if there are none."""
    if method == "hashtag":
        table = models.axis.scores
        vals = [table[h] for h in tweet.hashtags if h in table]
    elif method == "link":
        vals = [s for s in (score_link(models.domains, d) for d in tweet.links) if s is not None]
    else:
        raise AlignmentError(f"unknown method {method!r}")
    if not vals:
        return None
    return sum(vals) / len(vals)


def calibrate(models: AlignmentModels, reference_tweets: Sequence[Tweet], reference: str = "") -> Calibration:
    """Raw mean tweet score of a center reference set, per method."""
    offsets = {}
    for method in METHODS:
        vals = [s for s in (score_tweet(t, method, models) for t in reference_tweets) if s is not None]
        if not vals:
            raise AlignmentError(f"no scoreable reference tweets for the {method} method")
        offsets[method] = math.fsum(vals) / len(vals)
    return Calibration(offsets["link"], offsets["hashtag"], reference)


def calibrated_mean(tweets: Iterable[Tweet], method: str, models: AlignmentModels) -> tuple[float | None, int]:
    """(1/N) * sum(t_i - s_c) over scoreable tweets, with N."""
    sc = models.calibration.offset(method)
    vals = [s - sc for s in (score_tweet(t, method, models) for t in tweets) if s is not None]
    if not vals:
        return None, 0
    return math.fsum(vals) / len(vals), len(vals)


# -- account level -----------------------------------------------------------------------
@dataclass
class AlignmentReport:
    method: str
    s_h: float | None
    s_u: float | None
    s_f: float | None
    coverage: dict[str, int]

    @property
    def bias(self) -> float | None:
        if self.s_h is None or self.s_f is None:
            return None
        return self.s_h - self.s_f


def account_scores(world: World, account: int, models: AlignmentModels, method: str,
                   rng: random.Random | None = None, home: list[Tweet] | None = None) -> AlignmentReport:
    """Home-timeline, own-timeline and friends' alignment for one account at the current clock."""
    if home is None:
        home = world.curate_home_timeline(account, HOME_WINDOW, rng=rng)
    s_h, n_h = calibrated_mean(home, method, models)
    s_u, n_u = calibrated_mean(world.user_timeline(account, USER_WINDOW), method, models)
    s_f, n_f = calibrated_mean(world.friend_tweets(account, FRIENDS_WINDOW), method, models)
    return AlignmentReport(method, s_h, s_u, s_f, {"home": n_h, "user": n_u, "friends": n_f})


def forward_fill(values: Sequence[float | None]) -> list[float | None]:
    out, last = [], None
    for v in values:
        if v is not None and not (isinstance(v, float) and math.isnan(v)):
            last = v
        out.append(last)
    return out


def newsfeed_bias_test(s_h: Sequence[float | None], s_f: Sequence[float | None]) -> TestResult:
    """Paired two-sided t-test of home-timeline vs friends' alignment over days with both values."""
    pairs = [(h, f) for h, f in zip(s_h, s_f) if h is not None and f is not None]
    if len(pairs) < 2:
        raise AlignmentError(f"need at least 2 paired observations, got {len(pairs)}")
    h, f = zip(*pairs)
    return ttest_paired(h, f)
