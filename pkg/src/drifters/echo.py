"""Echo-chamber metrics on sampled ego networks.

An ego network is approximated by sampling up to 100 neighbors from the
latest friends and followers and linking every sampled pair connected in
either direction. Transitivity is normalized by the mean transitivity of
configuration-model shuffles that keep the degree sequence.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from drifters.platform import World
from drifters.stats import TestResult, mean_se, ttest_two_sample

EGO_NODES = 100
EGO_FRIENDS = 200
EGO_FOLLOWERS = 200
N_SHUFFLES = 30


@dataclass
class EgoSample:
    ego: int
    nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> list[int]:
        adj = self.adjacency()
        return [len(adj[v]) for v in self.nodes]


@dataclass
class EgoMetrics:
    density: float | None
    transitivity: float | None
    normalized_transitivity: float | None
    n_shuffles: int = N_SHUFFLES
    null_transitivity: float | None = None
    n_nodes: int = 0
    n_edges: int = 0
    max_degree_deviation: int = 0
    flag: str = ""


def sample_ego_network(world: World, ego: int, rng: random.Random, n_nodes: int = EGO_NODES,
                       friends_window: int = EGO_FRIENDS, followers_window: int = EGO_FOLLOWERS) -> EgoSample:
    pool = list(dict.fromkeys(world.friends_latest(ego, friends_window) + world.followers_latest(ego, followers_window)))
    pool = [v for v in pool if v != ego]
    nodes = pool if len(pool) <= n_nodes else rng.sample(pool, n_nodes)
    nodes = tuple(sorted(nodes))
    edges = set()
    for u, v in itertools.combinations(nodes, 2):
        if world.is_following(u, v) or world.is_following(v, u):
            edges.add((u, v))
    return EgoSample(ego, nodes, frozenset(edges))


def graph_from_edges(edges: Iterable[tuple[int, int]], nodes: Iterable[int] = ()) -> EgoSample:
    norm = {(min(u, v), max(u, v)) for u, v in edges if u != v}
    all_nodes = set(nodes) | {x for e in norm for x in e}
    return EgoSample(-1, tuple(sorted(all_nodes)), frozenset(norm))


def density(sample: EgoSample) -> float | None:
    n = len(sample.nodes)
    if n < 2:
        return None
    return len(sample.edges) / (n * (n - 1) / 2)


def _triangles_and_triples(adj: Mapping[int, set[int]]) -> tuple[int, int]:
    triangles = 0
    for u, nbrs in adj.items():
        for v in nbrs:
            if v > u:
                triangles += sum(1 for w in adj[v] & nbrs if w > v)
    triples = sum(len(n) * (len(n) - 1) // 2 for n in adj.values())
    return triangles, triples


def _transitivity_adj(adj: Mapping[int, set[int]]) -> float:
    tri, triples = _triangles_and_triples(adj)
    return 3.0 * tri / triples if triples else 0.0


def transitivity(sample: EgoSample) -> float | None:
    """3 x triangles / connected triples; 0 when no connected triple exists."""
    if len(sample.nodes) < 3:
        return None
    return _transitivity_adj(sample.adjacency())


@dataclass
class Shuffle:
    edges: list[tuple[int, int]]
    max_degree_deviation: int
    fallback_edges: int = 0
    dropped_edges: int = 0  # only for non-graphical degree sequences


def configuration_shuffle(degrees: Sequence[int], rng: random.Random, max_swaps: int | None = None) -> Shuffle:
    """Stub-matching configuration model made simple by replacing bad edges.

    Self-loops and parallel edges are first rewired by random double swaps
    with another edge (never increasing the number of bad edges), which keep
    every degree. Any that survive ``max_swaps`` attempts are
    replaced by a random absent edge, preferring endpoints left short of
    their target degree.
    """
    if sum(degrees) % 2:
        raise ValueError("degree sequence must have an even sum")
    n = len(degrees)
    stubs = [v for v, d in enumerate(degrees) for _ in range(d)]
    rng.shuffle(stubs)
    edges = [_norm(stubs[i], stubs[i + 1]) for i in range(0, len(stubs), 2)]
    count = Counter(edges)
    m = len(edges)

    pos: dict[tuple[int, int], list[int]] = {}
    for i, e in enumerate(edges):
        pos.setdefault(e, []).append(i)

    def is_bad(k):
        return count[k] > 0 and (k[0] == k[1] or count[k] > 1)

    def cost(keys):
        return sum(count[k] if k[0] == k[1] else max(0, count[k] - 1) for k in keys)

    bad_keys = {k for k in count if is_bad(k)}
    attempts = 0
    max_swaps = 200 * max(m, 1) if max_swaps is None else max_swaps
    while bad_keys and attempts < max_swaps and m > 1:
        attempts += 1
        keys_now = sorted(bad_keys)
        k = keys_now[int(rng.random() * len(keys_now))]
        i = pos[k][int(rng.random() * len(pos[k]))]
        j = int(rng.random() * m)
        if j == i:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        e1, e2 = _norm(a, c), _norm(b, d)
        old1, old2 = edges[i], edges[j]
        keys = {old1, old2, e1, e2}
        before = cost(keys)
        for old in (old1, old2):
            count[old] -= 1
        count[e1] += 1
        count[e2] += 1
        if cost(keys) > before:
            # uphill move: undo
            count[e1] -= 1
            count[e2] -= 1
            count[old1] += 1
            count[old2] += 1
            continue
        edges[i], edges[j] = e1, e2
        pos[old1].remove(i)
        pos[old2].remove(j)
        pos.setdefault(e1, []).append(i)
        pos.setdefault(e2, []).append(j)
        for key in keys:
            if is_bad(key):
                bad_keys.add(key)
            else:
                bad_keys.discard(key)
    count = +count
    bad = bool(bad_keys)

    fallback = dropped = 0
    if bad:
        deg = Counter()
        good = []
        seen = set()
        for i, e in enumerate(edges):
            if e[0] != e[1] and e not in seen:
                seen.add(e)
                good.append(e)
        for u, v in good:
            deg[u] += 1
            deg[v] += 1
        for _ in range(m - len(good)):
            short = [v for v in range(n) if deg[v] < degrees[v]]
            pair = _random_absent(seen, short, short, rng) or _random_absent(seen, short, range(n), rng) \
                or _random_absent(seen, range(n), range(n), rng)
            if pair is None:
                dropped = m - len(good)  # complete graph; edge count cannot be kept
                break
            seen.add(pair)
            good.append(pair)
            deg[pair[0]] += 1
            deg[pair[1]] += 1
            fallback += 1
        edges = good
    final = Counter()
    for u, v in edges:
        final[u] += 1
        final[v] += 1
    dev = max((abs(final[v] - degrees[v]) for v in range(n)), default=0)
    return Shuffle(edges, dev, fallback, dropped)


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def _random_absent(present: set, left: Iterable[int], right: Iterable[int], rng: random.Random):
    left, right = list(left), list(right)
    cands = [_norm(u, v) for u in left for v in right if u != v and _norm(u, v) not in present]
    if not cands:
        return None
    cands = sorted(set(cands))
    return cands[int(rng.random() * len(cands))]


@dataclass
class NormalizedTransitivity:
    value: float | None
    observed: float | None
    null_mean: float | None
    degree_deviations: list[int] = field(default_factory=list)
    flag: str = ""


def normalized_transitivity(sample: EgoSample, n_shuffles: int = N_SHUFFLES,
                            rng: random.Random | None = None) -> NormalizedTransitivity:
    rng = rng or random.Random(0)
    observed = transitivity(sample)
    if observed is None:
        return NormalizedTransitivity(None, None, None, flag="too_few_nodes")
    degrees = sample.degrees()
    total = 0.0
    devs = []
    for _ in range(n_shuffles):
        sh = configuration_shuffle(degrees, rng)
        assert len(sh.edges) + sh.dropped_edges == len(sample.edges), "edge count changed"
        adj = {v: set() for v in range(len(degrees))}
        for u, v in sh.edges:
            adj[u].add(v)
            adj[v].add(u)
        total += _transitivity_adj(adj)
        devs.append(sh.max_degree_deviation)
    null_mean = total / n_shuffles
    if null_mean == 0.0:
        return NormalizedTransitivity(None, observed, 0.0, devs, flag="null_transitivity_zero")
    return NormalizedTransitivity(observed / null_mean, observed, null_mean, devs)


def ego_metrics(sample: EgoSample, n_shuffles: int = N_SHUFFLES, rng: random.Random | None = None) -> EgoMetrics:
    nt = normalized_transitivity(sample, n_shuffles, rng)
    return EgoMetrics(
        density=density(sample),
        transitivity=nt.observed,
        normalized_transitivity=nt.value,
        n_shuffles=n_shuffles,
        null_transitivity=nt.null_mean,
        n_nodes=len(sample.nodes),
        n_edges=len(sample.edges),
        max_degree_deviation=max(nt.degree_deviations, default=0),
        flag=nt.flag,
    )


def write_edge_list(sample: EgoSample, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in sorted(sample.edges):
            fh.write(f"{u}\t{v}\n")


ECHO_FIELDS = ("density", "transitivity", "normalized_transitivity")


def group_echo_summary(metrics: Mapping[str, Sequence[EgoMetrics]]) -> tuple[dict, list[dict]]:
    """Per-group mean and standard error of each metric, plus pairwise two-sided t-tests."""
    summary: dict[str, dict[str, tuple[float | None, float | None]]] = {}
    for group, items in metrics.items():
        if not items:
            raise ValueError(f"group {group} has no samples")
        summary[group] = {}
        for name in ECHO_FIELDS:
            vals = [getattr(m, name) for m in items if getattr(m, name) is not None]
            summary[group][name] = mean_se(vals) if vals else (None, None)
    tests = []
    for g1, g2 in itertools.combinations(metrics, 2):
        for name in ECHO_FIELDS:
            x = [getattr(m, name) for m in metrics[g1] if getattr(m, name) is not None]
            y = [getattr(m, name) for m in metrics[g2] if getattr(m, name) is not None]
            res: TestResult | None = ttest_two_sample(x, y) if len(x) >= 2 and len(y) >= 2 else None
            tests.append({"metric": name, "group_a": g1, "group_b": g2, "result": res})
    return summary, tests
