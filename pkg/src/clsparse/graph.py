"""Undirected weighted graphs, Laplacians, and partition statistics.

The edge list is the single source of truth: edges are stored canonically
(u < v, sorted lexicographically, one entry per vertex pair, strictly
positive weights). Parallel edges produced upstream, e.g. by a sampler
drawing the same edge twice, merge by weight addition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GraphFormatError",
    "LaplacianVariant",
    "Partition",
    "conductance",
    "connected_components",
    "incidence_quadratic",
    "indicator_matrix",
    "intercluster_edges",
    "laplacian",
    "load_edge_list",
    "load_partition",
    "rho_of_partition",
    "save_edge_list",
    "save_partition",
    "volume",
]


class GraphFormatError(ValueError):
    """Malformed edge-list or partition file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LaplacianVariant(Enum):
    UNNORMALIZED = "unnormalized"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class Graph:
    """Immutable undirected weighted graph.

    ``edges`` must be canonical: each entry (u, v, w) with u < v, entries
    sorted, no repeated pair, w > 0. Use :meth:`from_edges` to canonicalize
    arbitrary input.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be >= 1, got {self.n}")
        prev = (-1, -1)
        for u, v, w in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.n):
                raise ValueError(
                    f"edge ({u},{v}) not canonical or out of range for n={self.n}"
                )
            if not w > 0:
                raise ValueError(f"non-positive weight {w} on edge ({u},{v})")
            if (u, v) <= prev:
                raise ValueError(f"edge list not sorted/unique at ({u},{v})")
            prev = (u, v)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> "Graph":
        """Build a Graph from raw (u, v, w) triples.

        Orients each pair as (min, max), merges duplicates by weight
        addition, and sorts. Self-loops and non-positive weights raise.
        """
        merged: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            merged[key] = merged.get(key, 0.0) + float(w)
        canon = tuple((u, v, w) for (u, v), w in sorted(merged.items()))
        return cls(n=n, edges=canon)

    @property
    def m(self) -> int:
        return len(self.edges)

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edge endpoints and weights as parallel arrays (us, vs, ws)."""
        if not self.edges:
            z = np.zeros(0)
            return z.astype(int), z.astype(int), z
        us, vs, ws = zip(*self.edges)
        return np.asarray(us, dtype=int), np.asarray(vs, dtype=int), np.asarray(ws)

    def degrees(self) -> np.ndarray:
        """Weighted degree of every vertex."""
        d = np.zeros(self.n)
        us, vs, ws = self.edge_arrays()
        np.add.at(d, us, ws)
        np.add.at(d, vs, ws)
        return d

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            a[u, v] = w
            a[v, u] = w
        return a


@dataclass(frozen=True)
class Partition:
    """Cluster assignment of vertices; ids are 0..k-1 and every id occurs."""

    assignment: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"cluster count must be >= 1, got {self.k}")
        seen = set()
        for i, c in enumerate(self.assignment):
            if not 0 <= c < self.k:
                raise ValueError(f"cluster id {c} at vertex {i} not in 0..{self.k - 1}")
            seen.add(c)
        if len(seen) != self.k:
            missing = sorted(set(range(self.k)) - seen)
            raise ValueError(f"empty clusters: {missing}")

    @property
    def n(self) -> int:
        return len(self.assignment)

    def clusters(self) -> list[np.ndarray]:
        """Vertex index array of each cluster, by cluster id."""
        a = np.asarray(self.assignment)
        return [np.flatnonzero(a == c) for c in range(self.k)]

    def sizes(self) -> np.ndarray:
        return np.bincount(np.asarray(self.assignment), minlength=self.k)


_HEADER_RE = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


def load_edge_list(path: str | Path) -> Graph:
    """Parse a plain-text edge list into a Graph.

    Each non-comment line is ``u v [w]`` (0-indexed, w defaults to 1.0).
    Lines starting with ``#`` are comments; a ``# n=<N>`` header overrides
    the inferred vertex count. Duplicate pairs merge by weight addition.
    """
    path = Path(path)
    header_n: int | None = None
    raw: list[tuple[int, int, float]] = []
    max_idx = -1
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                hm = _HEADER_RE.match(stripped)
                if hm:
                    header_n = int(hm.group(1))
                continue
            parts = stripped.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"expected 'u v [w]', got {stripped!r}", line=lineno
                )
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise GraphFormatError(str(exc), line=lineno) from exc
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}", line=lineno)
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative vertex index in {stripped!r}", line=lineno)
            if not w > 0:
                raise GraphFormatError(f"non-positive weight {w}", line=lineno)
            raw.append((u, v, w))
            max_idx = max(max_idx, u, v)
    if header_n is None and max_idx < 0:
        raise GraphFormatError("empty edge list and no '# n=<N>' header")
    n = header_n if header_n is not None else max_idx + 1
    if max_idx >= n:
        raise GraphFormatError(
            f"vertex index {max_idx} exceeds declared n={n}"
        )
    return Graph.from_edges(n, raw)


def save_edge_list(g: Graph, path: str | Path) -> None:
    """Write the canonical edge list with a ``# n=<N>`` header.

    Weights use repr so a load round-trips bit-exactly.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# n={g.n}\n")
        for u, v, w in g.edges:
            fh.write(f"{u} {v} {float(w)!r}\n")


def load_partition(path: str | Path, n: int | None = None) -> Partition:
    """Read one cluster id per line (line i = vertex i)."""
    path = Path(path)
    ids: list[int] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                ids.append(int(stripped))
            except ValueError as exc:
                raise GraphFormatError(str(exc), line=lineno) from exc
    if n is not None and len(ids) != n:
        raise GraphFormatError(f"partition has {len(ids)} lines, expected {n}")
    if not ids:
        raise GraphFormatError("empty partition file")
    return Partition(assignment=tuple(ids), k=max(ids) + 1)


def save_partition(p: Partition, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for c in p.assignment:
            fh.write(f"{c}\n")


def laplacian(
    g: Graph,
    variant: LaplacianVariant = LaplacianVariant.UNNORMALIZED,
    zero_degree_ok: bool = False,
) -> np.ndarray:
    """Dense Laplacian of ``g``, exactly symmetric.

    Unnormalized: D - A. Normalized: I - D^{-1/2} A D^{-1/2}, requiring
    every degree > 0 unless ``zero_degree_ok`` is set, in which case
    zero-degree vertices keep their identity diagonal entry (their scaling
    factor is treated as 0), pushing them to eigenvalue 1 instead of
    polluting the kernel.
    """
    a = g.adjacency()
    d = g.degrees()
    if variant is LaplacianVariant.UNNORMALIZED:
        lap = np.diag(d) - a
    elif variant is LaplacianVariant.NORMALIZED:
        if not zero_degree_ok and np.any(d <= 0):
            isolated = np.flatnonzero(d <= 0)
            raise ValueError(
                f"normalized Laplacian undefined for isolated vertices {isolated.tolist()}"
            )
        with np.errstate(divide="ignore"):
            dis = np.where(d > 0, 1.0 / np.sqrt(np.where(d > 0, d, 1.0)), 0.0)
        lap = np.eye(g.n) - (dis[:, None] * a) * dis[None, :]
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown variant {variant}")
    return (lap + lap.T) / 2.0


def incidence_quadratic(g: Graph, x: Sequence[float] | np.ndarray) -> float:
    """Sum of w * (x[u] - x[v])^2 over the edges; equals x^T L x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({g.n},)")
    us, vs, ws = g.edge_arrays()
    diff = x[us] - x[vs]
    return float(np.sum(ws * diff * diff))


def _subset_mask(g: Graph, subset: Iterable[int]) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    for i in subset:
        if not 0 <= i < g.n:
            raise ValueError(f"vertex {i} out of range for n={g.n}")
        mask[i] = True
    return mask


def volume(g: Graph, subset: Iterable[int]) -> float:
    """Sum of weighted degrees over the subset; volume(V) = 2 * total weight."""
    mask = _subset_mask(g, subset)
    return float(g.degrees()[mask].sum())


def cut_weight(g: Graph, subset: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in the subset."""
    mask = _subset_mask(g, subset)
    us, vs, ws = g.edge_arrays()
    crossing = mask[us] != mask[vs]
    return float(ws[crossing].sum())


def conductance(g: Graph, subset: Iterable[int]) -> float:
    """Weighted cut of S over vol(S). The full vertex set has conductance 0."""
    mask = _subset_mask(g, subset)
    if not mask.any():
        raise ValueError("conductance of the empty set is undefined")
    if mask.all():
        return 0.0
    vol = float(g.degrees()[mask].sum())
    if vol <= 0:
        raise ValueError("conductance undefined for a zero-volume subset")
    us, vs, ws = g.edge_arrays()
    crossing = mask[us] != mask[vs]
    return float(ws[crossing].sum()) / vol


def rho_of_partition(g: Graph, p: Partition) -> float:
    """Maximum cluster conductance of the supplied partition.

    This evaluates the expansion of the given clustering, an upper bound on
    the optimal k-way expansion. A single-cluster partition has expansion 0
    (empty complement).
    """
    if p.n != g.n:
        raise ValueError(f"partition has {p.n} vertices, graph has {g.n}")
    if p.k == 1:
        return 0.0
    return max(conductance(g, cluster) for cluster in p.clusters())


def indicator_matrix(p: Partition) -> np.ndarray:
    """Orthonormal n x k matrix; column i is the normalized indicator of cluster i."""
    mat = np.zeros((p.n, p.k))
    for c, cluster in enumerate(p.clusters()):
        mat[cluster, c] = 1.0 / np.sqrt(len(cluster))
    return mat


def intercluster_edges(g: Graph, p: Partition) -> tuple[int, float]:
    """Count and total weight of edges whose endpoints lie in different clusters."""
    if p.n != g.n:
        raise ValueError(f"partition has {p.n} vertices, graph has {g.n}")
    assign = np.asarray(p.assignment)
    us, vs, ws = g.edge_arrays()
    crossing = assign[us] != assign[vs]
    return int(crossing.sum()), float(ws[crossing].sum())


def connected_components(g: Graph) -> np.ndarray:
    """Component label of every vertex (labels are 0-based, order of discovery)."""
    parent = list(range(g.n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for u, v, _ in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru

    labels = np.empty(g.n, dtype=int)
    next_label = 0
    seen: dict[int, int] = {}
    for v in range(g.n):
        r = find(v)
        if r not in seen:
            seen[r] = next_label
            next_label += 1
        labels[v] = seen[r]
    return labels
