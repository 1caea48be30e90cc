"""Spectral embedding, k-means, and subspace alignment error metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Partition
from .spectral import Spectrum, StructureStats

__all__ = [
    "AngleReport",
    "adjusted_rand_index",
    "bound_reff",
    "bound_uniform",
    "kmeans",
    "principal_angles",
    "spectral_embedding",
]


def spectral_embedding(spec: Spectrum, k: int) -> np.ndarray:
    """Embed vertex i as row i of the bottom-k eigenvector matrix (no row scaling)."""
    if not 1 <= k <= spec.n:
        raise ValueError(f"k={k} must satisfy 1 <= k <= n={spec.n}")
    return np.array(spec.bottom(k))


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centers[0] = points[first]
    chosen = {first}
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass is on already-chosen locations; take any unchosen index
            idx = next(i for i in range(n) if i not in chosen)
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = points[idx]
        chosen.add(idx)
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int,
    max_iters: int = 100,
    tol: float = 1e-8,
) -> Partition:
    """Lloyd's algorithm with k-means++ seeding; deterministic per seed.

    The assignment objective is checked to be non-increasing on every
    iteration. Empty clusters are repaired by stealing the point farthest
    from its current center.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError(f"points must be 2-d, got shape {points.shape}")
    n = len(points)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must satisfy 1 <= k <= n={n}")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(points, k, rng)
    prev_obj = math.inf
    labels = np.zeros(n, dtype=int)
    for _ in range(max_iters):
        d2 = (
            np.sum(points**2, axis=1)[:, None]
            - 2.0 * points @ centers.T
            + np.sum(centers**2, axis=1)[None, :]
        )
        np.maximum(d2, 0.0, out=d2)
        labels = np.argmin(d2, axis=1)
        obj = float(d2[np.arange(n), labels].sum())
        if obj > prev_obj + 1e-9 * max(1.0, prev_obj):
            raise AssertionError(
                f"k-means objective increased: {prev_obj:g} -> {obj:g}"
            )
        prev_obj = obj
        new_centers = centers.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new_centers[c] = points[members].mean(axis=0)
        # repair empty clusters with the worst-fit points
        for c in range(k):
            if not (labels == c).any():
                worst = int(np.argmax(d2[np.arange(n), labels]))
                new_centers[c] = points[worst]
                labels[worst] = c
        shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        if shift < tol:
            break
    # final assignment against the converged centers
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    labels = np.argmin(d2, axis=1)
    for c in range(k):
        if not (labels == c).any():
            worst = int(np.argmax(d2[np.arange(n), labels]))
            labels[worst] = c
    return Partition(assignment=tuple(int(c) for c in labels), k=k)


@dataclass(frozen=True)
class AngleReport:
    """Principal angles between two k-dimensional subspaces.

    ``cosines`` are the singular values of U^T W in descending order,
    clamped to [0, 1]; ``sin_theta_max`` is the sine of the largest angle
    and ``frob_misalignment`` is k minus the squared cosine sum, i.e. the
    energy of the second subspace outside the first.
    """

    cosines: np.ndarray
    sin_theta_max: float
    frob_misalignment: float


def principal_angles(u: np.ndarray, w: np.ndarray) -> AngleReport:
    """Angles between the column spans of two orthonormal n x k matrices."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if u.ndim != 2 or w.ndim != 2 or u.shape != w.shape:
        raise ValueError(f"expected matching n x k bases, got {u.shape} and {w.shape}")
    k = u.shape[1]
    for name, basis in (("first", u), ("second", w)):
        gram = basis.T @ basis
        if float(np.max(np.abs(gram - np.eye(k)))) > 1e-6:
            raise ValueError(f"{name} basis columns are not orthonormal")
    sigma = np.linalg.svd(u.T @ w, compute_uv=False)
    cosines = np.clip(sigma, 0.0, 1.0)
    c_min = float(cosines.min()) if k else 1.0
    sin_theta_max = math.sqrt(max(0.0, 1.0 - c_min * c_min))
    frob_mis = float(k - np.sum(cosines * cosines))
    return AngleReport(
        cosines=cosines, sin_theta_max=sin_theta_max, frob_misalignment=frob_mis
    )


def bound_uniform(k: int, stats: StructureStats, epsilon: float) -> float:
    """Misalignment bound after uniform sampling: k (1/upsilon + eps/(1-eps) kappa)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
    if not stats.upsilon_finite:
        raise ValueError("bound requires a finite structure ratio")
    if not stats.kappa_defined:
        raise ValueError("bound requires kappa (lambda_{k+1} > 0)")
    return k * (1.0 / stats.upsilon + epsilon / (1.0 - epsilon) * stats.kappa)


def bound_reff(k: int, stats: StructureStats, epsilon: float) -> float:
    """Misalignment bound after resistance sampling: (1+eps)/(1-eps) * k/upsilon."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
    if not stats.upsilon_finite:
        raise ValueError("bound requires a finite structure ratio")
    return (1.0 + epsilon) / (1.0 - epsilon) * k / stats.upsilon


def adjusted_rand_index(a: Partition, b: Partition) -> float:
    """Chance-corrected pair-counting agreement between two partitions of [n]."""
    if a.n != b.n:
        raise ValueError(f"partitions disagree on n: {a.n} vs {b.n}")
    n = a.n
    contingency = np.zeros((a.k, b.k), dtype=np.int64)
    for ca, cb in zip(a.assignment, b.assignment):
        contingency[ca, cb] += 1

    def comb2(x: np.ndarray) -> np.ndarray:
        return x * (x - 1) // 2

    sum_cells = int(comb2(contingency).sum())
    sum_a = int(comb2(contingency.sum(axis=1)).sum())
    sum_b = int(comb2(contingency.sum(axis=0)).sum())
    total = n * (n - 1) // 2
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0  # both partitions trivial in the same way
    return float((sum_cells - expected) / (max_index - expected))
