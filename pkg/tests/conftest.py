"""Shared fixtures: small closed-form graphs and seeded random corpora."""

from __future__ import annotations

import numpy as np
import pytest

from clsparse import Graph, Partition, random_connected_graph


def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def k2(weight: float = 1.0) -> Graph:
    return Graph.from_edges(2, [(0, 1, weight)])


def k4() -> Graph:
    return Graph.from_edges(4, [(u, v, 1.0) for u in range(4) for v in range(u + 1, 4)])


def star(leaves: int = 3) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i, 1.0) for i in range(1, leaves + 1)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def two_triangles() -> tuple[Graph, Partition]:
    """Two disjoint unit triangles with the ground-truth 2-way partition."""
    edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]
    return Graph.from_edges(6, edges), Partition(assignment=(0, 0, 0, 1, 1, 1), k=2)


def bridged_triangles(bridge_weight: float = 1.0) -> tuple[Graph, Partition]:
    g, p = two_triangles()
    edges = list(g.edges) + [(2, 3, bridge_weight)]
    return Graph.from_edges(6, edges), p


def connected_corpus(count: int, seed: int, n_lo: int = 10, n_hi: int = 60) -> list[Graph]:
    """Seeded random connected unweighted graphs with n in [n_lo, n_hi]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_lo, n_hi + 1))
        extra = float(rng.uniform(0.05, 0.3))
        out.append(random_connected_graph(n, extra, int(rng.integers(2**31))))
    return out


@pytest.fixture(scope="session")
def small_corpus() -> list[Graph]:
    return connected_corpus(30, seed=1234)
