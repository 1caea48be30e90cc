"""Randomized self-check suites behind the ``verify`` CLI subcommand.

Each suite runs a hard numerical identity or inequality over a seeded
random corpus and reports the worst observed deviation. The injected-bug
mode corrupts one leverage score on purpose, as a negative control that
the checks can actually fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generators import generate_sbm, random_connected_graph, random_partition, SbmConfig
from .graph import (
    Graph,
    LaplacianVariant,
    indicator_matrix,
    intercluster_edges,
    laplacian,
    rho_of_partition,
)
from .metrics import principal_angles
from .resistance import resistance_profile
from .sparsify import SampleMethod, SparsifyConfig, sparsify_reff, sparsify_uniform
from .spectral import alignment_frobenius, eig_sym, structure_residuals_part1, structure_stats

__all__ = ["SuiteResult", "SUITES", "run_suites"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _corpus(count: int, seed: int) -> list[Graph]:
    graphs = []
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(10, 61))
        extra = float(rng.uniform(0.05, 0.3))
        graphs.append(random_connected_graph(n, extra, int(rng.integers(2**31))))
    return graphs


def suite_foster(graphs: int = 100, seed: int = 7, inject_bug: bool = False) -> SuiteResult:
    """Sum of leverage scores on a connected graph equals n - 1."""
    worst = 0.0
    for g in _corpus(graphs, seed):
        profile = resistance_profile(g, k=1)
        total = profile.tau_full_sum
        if inject_bug:
            total += 0.01  # negative control: simulate a corrupted weight
        worst = max(worst, abs(total - (g.n - 1)))
    return SuiteResult("foster", worst <= 1e-8, f"max |sum(tau) - (n-1)| = {worst:.3e}")


def suite_ranknk(graphs: int = 100, seed: int = 7) -> SuiteResult:
    """Rank-restricted leverage scores sum to n - k."""
    worst = 0.0
    for g in _corpus(graphs, seed):
        for k in {1, 2, max(1, g.n // 4)}:
            profile = resistance_profile(g, k=k)
            worst = max(worst, abs(profile.tau_nk_sum - (g.n - k)))
    return SuiteResult("ranknk", worst <= 1e-8, f"max |sum(tau_nk) - (n-k)| = {worst:.3e}")


def suite_intercluster(instances: int = 200, seed: int = 11) -> SuiteResult:
    """Crossing-edge count is at most rho * m on unweighted graphs."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(instances):
        n = int(rng.integers(8, 40))
        g = random_connected_graph(n, float(rng.uniform(0.05, 0.4)), int(rng.integers(2**31)))
        k = int(rng.integers(2, min(6, n)))
        p = random_partition(n, k, int(rng.integers(2**31)))
        count, _w = intercluster_edges(g, p)
        rho = rho_of_partition(g, p)
        worst = max(worst, count - rho * g.m)
    return SuiteResult(
        "intercluster", worst <= 1e-9, f"max (count - rho*m) = {worst:.3e}"
    )


def suite_structure(instances: int = 20, seed: int = 3) -> SuiteResult:
    """Structure-theorem inequalities on well-clustered block-model graphs."""
    ok = True
    details = []
    worst_p1 = -math.inf
    worst_p2 = -math.inf
    worst_upper = -math.inf
    for i in range(instances):
        cfg = SbmConfig(
            cluster_sizes=(50, 50, 50, 50), p_intra=0.5, p_inter=0.01, seed=seed + i
        )
        g, part = generate_sbm(cfg)
        k = part.k
        rho = rho_of_partition(g, part)
        spec_n = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED, zero_degree_ok=True))
        stats = structure_stats(spec_n, rho, k)
        if not stats.upsilon_finite:
            continue
        cmat = indicator_matrix(part)
        resid = structure_residuals_part1(spec_n, cmat, k)
        worst_p1 = max(worst_p1, float(resid.max()) - 1.0 / stats.upsilon)
        align = alignment_frobenius(spec_n.dominant(k), cmat)
        worst_p2 = max(worst_p2, align - k / stats.upsilon)
        # unconditional resistance upper bound, on the unnormalized spectrum
        spec_u = eig_sym(laplacian(g, LaplacianVariant.UNNORMALIZED))
        profile = resistance_profile(g, k)
        worst_upper = max(
            worst_upper, float(profile.r_nk.max()) - 2.0 / float(spec_u.eigenvalues[k])
        )
    ok = worst_p1 <= 1e-9 and worst_p2 <= 1e-9 and worst_upper <= 1e-9
    details.append(f"part1 slack {worst_p1:.3e}, part2 slack {worst_p2:.3e}, upper slack {worst_upper:.3e}")
    return SuiteResult("structure", ok, "; ".join(details))


def suite_unbiased(seeds: int = 10000, tol: float = 0.02) -> SuiteResult:
    """Seed-averaged sparsified Laplacians match the original entrywise."""
    triangle = Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    worst = 0.0
    lap = laplacian(triangle, LaplacianVariant.UNNORMALIZED)
    profile = resistance_profile(triangle, k=1)
    for method in (SampleMethod.UNIFORM, SampleMethod.EFFECTIVE_RESISTANCE):
        acc = np.zeros_like(lap)
        for s in range(seeds):
            cfg = SparsifyConfig(method=method, budget=2, seed=s)
            if method is SampleMethod.UNIFORM:
                res = sparsify_uniform(triangle, cfg)
            else:
                res = sparsify_reff(triangle, profile, cfg)
            acc += laplacian(res.graph, LaplacianVariant.UNNORMALIZED)
        avg = acc / seeds
        rel = np.abs(avg - lap) / np.abs(lap)
        worst = max(worst, float(rel.max()))
    return SuiteResult("unbiased", worst <= tol, f"max entrywise rel err = {worst:.4f}")


def suite_alignment(instances: int = 30, seed: int = 5) -> SuiteResult:
    """Complementary identity between bottom-k cosines and dominant alignment."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(8, 30))
        k = int(rng.integers(2, min(5, n)))
        g = random_connected_graph(n, 0.2, int(rng.integers(2**31)), weighted=True)
        p = random_partition(n, k, int(rng.integers(2**31)))
        cmat = indicator_matrix(p)
        spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED, zero_degree_ok=True))
        frob_a = alignment_frobenius(spec.dominant(k), cmat)
        frob_b = principal_angles(spec.bottom(k), cmat).frob_misalignment
        worst = max(worst, abs(frob_a - frob_b))
    return SuiteResult("alignment", worst <= 1e-8, f"max identity gap = {worst:.3e}")


SUITES = {
    "foster": suite_foster,
    "ranknk": suite_ranknk,
    "intercluster": suite_intercluster,
    "structure": suite_structure,
    "unbiased": suite_unbiased,
    "alignment": suite_alignment,
}


def run_suites(
    names: list[str] | None = None,
    graphs: int | None = None,
    seeds: int | None = None,
    inject_bug: bool = False,
) -> list[SuiteResult]:
    """Run the named suites (all by default) and return their results."""
    selected = names or list(SUITES)
    results = []
    for name in selected:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        kwargs = {}
        if name in ("foster", "ranknk") and graphs is not None:
            kwargs["graphs"] = graphs
        if name == "intercluster" and graphs is not None:
            kwargs["instances"] = graphs
        if name == "unbiased" and seeds is not None:
            kwargs["seeds"] = seeds
        if name == "foster" and inject_bug:
            kwargs["inject_bug"] = True
        results.append(SUITES[name](**kwargs))
    return results
