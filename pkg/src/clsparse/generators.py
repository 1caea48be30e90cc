"""Seeded random graph generators with ground-truth partitions.

All generators are deterministic per seed: a single PCG64 stream drives
each instance and draws are consumed in a fixed documented order (block
pairs in lexicographic order for the block models, stub phases in
sequence for the LFR-style benchmark). Vertices are numbered
cluster-contiguously, so indicator matrices come out block structured.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .graph import Graph, Partition

__all__ = [
    "HierSbmConfig",
    "LfrConfig",
    "SbmConfig",
    "HIER_PRESETS",
    "SBM_PRESETS",
    "generate_hier_sbm",
    "generate_lfr",
    "generate_sbm",
    "random_connected_graph",
    "random_partition",
]

# Plain-SBM probability presets (intra, inter). The probability ratio is the
# knob the experiments sweep; these two ends are the ones named in the text.
SBM_PRESETS: dict[str, tuple[float, float]] = {
    "strong": (0.5, 0.005),
    "weak": (0.5, 0.1),
}

# Hierarchical presets: (p_intra_sub, p_inter_sub, p_inter_top).
HIER_PRESETS: dict[str, tuple[float, float, float]] = {
    "strong": (0.5, 0.10, 0.005),
    "moderate": (0.35, 0.08, 0.015),
    "weak": (0.20, 0.06, 0.025),
}


@dataclass(frozen=True)
class SbmConfig:
    cluster_sizes: tuple[int, ...]
    p_intra: float
    p_inter: float
    seed: int

    def __post_init__(self):
        if not self.cluster_sizes:
            raise ValueError("at least one cluster required")
        if any(s < 1 for s in self.cluster_sizes):
            raise ValueError(f"cluster sizes must be positive: {self.cluster_sizes}")
        for name, p in (("p_intra", self.p_intra), ("p_inter", self.p_inter)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} not in [0,1]")


@dataclass(frozen=True)
class HierSbmConfig:
    n_top: int
    n_sub_per_top: int
    nodes_per_sub: int
    p_intra_sub: float
    p_inter_sub: float
    p_inter_top: float
    seed: int

    def __post_init__(self):
        if min(self.n_top, self.n_sub_per_top, self.nodes_per_sub) < 1:
            raise ValueError("all hierarchy dimensions must be positive")
        for name in ("p_intra_sub", "p_inter_sub", "p_inter_top"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} not in [0,1]")
        if not self.p_intra_sub >= self.p_inter_sub >= self.p_inter_top:
            warnings.warn(
                "hierarchy probabilities are not ordered "
                "p_intra_sub >= p_inter_sub >= p_inter_top; "
                "the planted structure may be meaningless",
                stacklevel=2,
            )


@dataclass(frozen=True)
class LfrConfig:
    n: int
    tau1: float
    tau2: float
    mu: float
    avg_degree: float
    max_degree: int
    min_community: int
    max_community: int
    seed: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n={self.n} too small")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu={self.mu} not in [0,1]")
        if self.tau1 <= 1.0 or self.tau2 <= 0.0:
            raise ValueError("power-law exponents must satisfy tau1 > 1, tau2 > 0")
        if not 1 <= self.avg_degree <= self.max_degree:
            raise ValueError("need 1 <= avg_degree <= max_degree")
        if not 1 <= self.min_community <= self.max_community <= self.n:
            raise ValueError("need 1 <= min_community <= max_community <= n")


def _block_model(
    sizes: list[int], prob_of_block_pair, rng: np.random.Generator
) -> list[tuple[int, int, float]]:
    """Sample a block model; blocks visited in (i, j) lexicographic order."""
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    edges: list[tuple[int, int, float]] = []
    nb = len(sizes)
    for i in range(nb):
        for j in range(i, nb):
            p = prob_of_block_pair(i, j)
            if i == j:
                s = sizes[i]
                iu, iv = np.triu_indices(s, k=1)
                if len(iu) == 0:
                    continue
                mask = rng.random(len(iu)) < p if p > 0 else np.zeros(len(iu), bool)
                us = iu[mask] + offsets[i]
                vs = iv[mask] + offsets[i]
            else:
                si, sj = sizes[i], sizes[j]
                mask = (
                    rng.random(si * sj) < p if p > 0 else np.zeros(si * sj, bool)
                )
                flat = np.flatnonzero(mask)
                us = flat // sj + offsets[i]
                vs = flat % sj + offsets[j]
            edges.extend((int(u), int(v), 1.0) for u, v in zip(us, vs))
    return edges


def generate_sbm(cfg: SbmConfig) -> tuple[Graph, Partition]:
    """Planted-partition model: unit-weight edges, independent per pair."""
    sizes = list(cfg.cluster_sizes)
    rng = np.random.default_rng(cfg.seed)
    edges = _block_model(
        sizes, lambda i, j: cfg.p_intra if i == j else cfg.p_inter, rng
    )
    n = sum(sizes)
    assignment = tuple(
        c for c, s in enumerate(sizes) for _ in range(s)
    )
    return Graph.from_edges(n, edges), Partition(assignment=assignment, k=len(sizes))


def generate_hier_sbm(cfg: HierSbmConfig) -> tuple[Graph, Partition, Partition]:
    """Two-level block model; returns the graph with both partition levels.

    A pair's probability is chosen by the finest level it shares: same sub
    cluster, same top cluster but different sub, or different top.
    """
    n_sub = cfg.n_top * cfg.n_sub_per_top
    sizes = [cfg.nodes_per_sub] * n_sub

    def prob(i: int, j: int) -> float:
        if i == j:
            return cfg.p_intra_sub
        if i // cfg.n_sub_per_top == j // cfg.n_sub_per_top:
            return cfg.p_inter_sub
        return cfg.p_inter_top

    rng = np.random.default_rng(cfg.seed)
    edges = _block_model(sizes, prob, rng)
    n = n_sub * cfg.nodes_per_sub
    sub_assign = tuple(b for b in range(n_sub) for _ in range(cfg.nodes_per_sub))
    top_assign = tuple(b // cfg.n_sub_per_top for b in sub_assign)
    return (
        Graph.from_edges(n, edges),
        Partition(assignment=top_assign, k=cfg.n_top),
        Partition(assignment=sub_assign, k=n_sub),
    )


def _truncated_powerlaw_mean(a: float, b: float, tau: float) -> float:
    """Mean of the continuous power law with density ~ x^-tau on [a, b]."""
    if abs(tau - 2.0) < 1e-12:
        return math.log(b / a) / (1.0 / a - 1.0 / b)
    t1, t2 = 1.0 - tau, 2.0 - tau
    return (t1 / t2) * (b**t2 - a**t2) / (b**t1 - a**t1)


def _sample_truncated_powerlaw(
    rng: np.random.Generator, size: int, a: float, b: float, tau: float
) -> np.ndarray:
    u = rng.random(size)
    t1 = 1.0 - tau
    return (a**t1 + u * (b**t1 - a**t1)) ** (1.0 / t1)


def _degree_sequence(rng: np.random.Generator, cfg: LfrConfig) -> np.ndarray:
    """Power-law degrees with the lower cutoff tuned to hit the target mean."""
    b = float(cfg.max_degree)
    target = float(cfg.avg_degree)
    lo, hi = 1.0, b
    if _truncated_powerlaw_mean(lo, b, cfg.tau1) >= target:
        a = lo
    else:
        for _ in range(200):
            mid = (lo + hi) / 2.0
            if _truncated_powerlaw_mean(mid, b, cfg.tau1) < target:
                lo = mid
            else:
                hi = mid
        a = (lo + hi) / 2.0
    raw = _sample_truncated_powerlaw(rng, cfg.n, a, b, cfg.tau1)
    degrees = np.clip(np.rint(raw).astype(int), 1, cfg.max_degree)
    return degrees


def _community_sizes(rng: np.random.Generator, cfg: LfrConfig, retries: int = 50) -> list[int]:
    """Power-law community sizes summing exactly to n."""
    for _ in range(retries):
        sizes: list[int] = []
        while sum(sizes) < cfg.n:
            raw = _sample_truncated_powerlaw(
                rng, 1, float(cfg.min_community), float(cfg.max_community), cfg.tau2
            )[0]
            sizes.append(int(np.clip(round(raw), cfg.min_community, cfg.max_community)))
        excess = sum(sizes) - cfg.n
        if excess == 0:
            return sizes
        # shave the excess off the largest community if it stays legal
        big = max(range(len(sizes)), key=lambda i: sizes[i])
        if sizes[big] - excess >= cfg.min_community:
            sizes[big] -= excess
            return sizes
    raise ValueError(
        f"could not draw community sizes summing to n={cfg.n} "
        f"within [{cfg.min_community},{cfg.max_community}] after {retries} retries"
    )


def _pair_stubs(
    rng: np.random.Generator,
    stubs: np.ndarray,
    reject,
    existing: set[tuple[int, int]],
    max_rounds: int = 100,
) -> list[tuple[int, int]]:
    """Configuration-model matching with rejection; leftovers are dropped.

    ``reject(u, v)`` vetoes a candidate pair (self-loops are always
    rejected); duplicates of ``existing`` or of pairs formed earlier in the
    same matching are re-queued and re-shuffled for up to ``max_rounds``.
    """
    pool = np.array(stubs, dtype=int)
    pairs: list[tuple[int, int]] = []
    for _ in range(max_rounds):
        if len(pool) < 2:
            break
        pool = rng.permutation(pool)
        if len(pool) % 2 == 1:
            pool, leftover = pool[:-1], pool[-1:]
        else:
            leftover = pool[:0]
        retry: list[int] = list(leftover)
        for a, b in zip(pool[0::2], pool[1::2]):
            u, v = (int(a), int(b)) if a < b else (int(b), int(a))
            if u == v or reject(u, v) or (u, v) in existing:
                retry.extend((int(a), int(b)))
                continue
            existing.add((u, v))
            pairs.append((u, v))
        if len(retry) == len(pool) + len(leftover):
            break  # no progress; give up on the remainder
        pool = np.array(retry, dtype=int)
    return pairs


def generate_lfr(cfg: LfrConfig) -> tuple[Graph, Partition]:
    """Simplified LFR-style benchmark via a two-phase configuration model.

    Degrees follow a truncated power law with exponent tau1 and mean near
    avg_degree; community sizes follow one with exponent tau2 and sum to n.
    Every node splits its stubs into ceil((1-mu) * deg) intra-community and
    the rest inter-community, then each phase is wired by stub matching
    with rejection of self-loops and duplicates. A small fraction of stubs
    can be dropped by rounding and failed matching, so the realized mixing
    tracks mu approximately.
    """
    rng = np.random.default_rng(cfg.seed)
    last_err: Exception | None = None
    for _ in range(20):
        try:
            return _generate_lfr_once(rng, cfg)
        except _LfrRetry as exc:
            last_err = exc
    raise ValueError(
        f"LFR configuration infeasible after 20 attempts: {last_err}"
    )


class _LfrRetry(Exception):
    pass


def _generate_lfr_once(rng: np.random.Generator, cfg: LfrConfig) -> tuple[Graph, Partition]:
    degrees = _degree_sequence(rng, cfg)
    sizes = _community_sizes(rng, cfg)
    k = len(sizes)
    intra_need = np.ceil((1.0 - cfg.mu) * degrees).astype(int)
    intra_need = np.minimum(intra_need, degrees)

    # Assign nodes to communities: hardest nodes first, random feasible pick.
    order = np.argsort(-intra_need, kind="stable")
    capacity = list(sizes)
    assign_of_node = np.full(cfg.n, -1, dtype=int)
    for node in order:
        feasible = [
            c for c in range(k) if capacity[c] > 0 and sizes[c] - 1 >= intra_need[node]
        ]
        if not feasible:
            raise _LfrRetry(
                f"node with intra degree {intra_need[node]} fits no community "
                f"(sizes {sorted(set(sizes))})"
            )
        c = feasible[int(rng.integers(len(feasible)))]
        assign_of_node[node] = c
        capacity[c] -= 1

    # Relabel vertices so communities are contiguous blocks.
    new_id = np.empty(cfg.n, dtype=int)
    nxt = 0
    for c in range(k):
        members = np.flatnonzero(assign_of_node == c)
        for old in members:
            new_id[old] = nxt
            nxt += 1
    degrees = degrees[np.argsort(new_id)]
    intra_need = intra_need[np.argsort(new_id)]
    assignment = tuple(c for c, s in enumerate(sizes) for _ in range(s))
    assign_arr = np.asarray(assignment)

    existing: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, float]] = []

    # Phase 1: intra-community matching, one community at a time.
    start = 0
    for c in range(k):
        stop = start + sizes[c]
        members = np.arange(start, stop)
        stubs = np.repeat(members, intra_need[start:stop])
        pairs = _pair_stubs(rng, stubs, lambda u, v: False, existing)
        edges.extend((u, v, 1.0) for u, v in pairs)
        start = stop

    # Phase 2: inter-community matching over all remaining stubs.
    inter_count = degrees - intra_need
    stubs = np.repeat(np.arange(cfg.n), inter_count)
    pairs = _pair_stubs(
        rng, stubs, lambda u, v: assign_arr[u] == assign_arr[v], existing
    )
    edges.extend((u, v, 1.0) for u, v in pairs)

    if not edges:
        raise _LfrRetry("generated an edgeless graph")
    graph = Graph.from_edges(cfg.n, edges)
    return graph, Partition(assignment=assignment, k=k)


def random_connected_graph(
    n: int,
    extra_edge_prob: float,
    seed: int,
    weighted: bool = False,
) -> Graph:
    """Random spanning tree plus independent extra edges; always connected.

    Weighted graphs draw weights uniformly from [0.5, 2.0); unweighted use
    unit weights. Used by the verification corpora.
    """
    if n < 1:
        raise ValueError(f"n={n} must be >= 1")
    rng = np.random.default_rng(seed)
    pairs: set[tuple[int, int]] = set()
    for v in range(1, n):
        u = int(rng.integers(v))
        pairs.add((u, v))
    if extra_edge_prob > 0 and n >= 2:
        iu, iv = np.triu_indices(n, k=1)
        mask = rng.random(len(iu)) < extra_edge_prob
        for u, v in zip(iu[mask], iv[mask]):
            pairs.add((int(u), int(v)))
    ordered = sorted(pairs)
    if weighted:
        ws = rng.uniform(0.5, 2.0, size=len(ordered))
    else:
        ws = np.ones(len(ordered))
    return Graph.from_edges(n, [(u, v, float(w)) for (u, v), w in zip(ordered, ws)])


def random_partition(n: int, k: int, seed: int) -> Partition:
    """Uniform random assignment with every cluster forced nonempty."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    assignment = rng.integers(k, size=n)
    forced = rng.permutation(n)[:k]
    assignment[forced] = np.arange(k)
    return Partition(assignment=tuple(int(c) for c in assignment), k=k)
