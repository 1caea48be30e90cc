"""Edge samplers with unbiased reweighting and approximation certificates.

Two samplers are provided. The uniform sampler keeps each edge
independently with probability pi = min(1, q/m) and divides kept weights
by pi, so the sparsified Laplacian is unbiased and q >= m reproduces the
input exactly. The resistance sampler draws q edges with replacement from
a supplied probability distribution and adds w_e / (q p_e) per draw,
merging repeats.

Randomness comes from numpy's PCG64 generator seeded per run; per-edge
decisions consume draws in canonical edge order, so results are
reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .graph import Graph
from .resistance import ResistanceProfile
from .spectral import StructureStats

__all__ = [
    "CertificateReport",
    "RankMode",
    "SampleMethod",
    "SparsifyConfig",
    "SparsifyResult",
    "quadratic_form_certificate",
    "sample_count_reff",
    "sample_count_uniform",
    "sparsify_reff",
    "sparsify_uniform",
]


class SampleMethod(Enum):
    UNIFORM = "uniform"
    EFFECTIVE_RESISTANCE = "effective_resistance"


class RankMode(Enum):
    FULL = "full"
    RANK_NK = "rank_nk"


@dataclass(frozen=True)
class SparsifyConfig:
    method: SampleMethod
    budget: int
    seed: int
    epsilon: float = 0.5
    constant: float = 1.0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0,1), got {self.epsilon}")
        if not self.constant > 0:
            raise ValueError(f"constant must be positive, got {self.constant}")


@dataclass(frozen=True)
class SparsifyResult:
    graph: Graph
    kept_edges: int
    method: SampleMethod
    seed: int
    requested_q: int


def _check_hypotheses(stats: StructureStats) -> tuple[float, float]:
    if not stats.kappa_defined:
        raise ValueError("kappa undefined (lambda_{k+1} = 0)")
    k_over_ups = 0.0 if not stats.upsilon_finite else stats.k / stats.upsilon
    if k_over_ups >= 1.0:
        raise ValueError(f"vacuous hypothesis: k/upsilon = {k_over_ups:g} >= 1")
    if stats.rho >= 1.0:
        raise ValueError(f"vacuous hypothesis: rho = {stats.rho:g} >= 1")
    return k_over_ups, stats.rho


def sample_count_uniform(
    n: int, k: int, stats: StructureStats, epsilon: float, constant: float = 1.0
) -> int:
    """Edge budget for uniform sampling with structure preservation.

    q = constant * kappa^2 / ((1 - k/upsilon)^2 (1 - rho)^2) * n ln(n) / eps^2,
    rounded up. Callers clamp to m; at desk scale the bound often exceeds m.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
    k_over_ups, rho = _check_hypotheses(stats)
    factor = stats.kappa**2 / ((1.0 - k_over_ups) ** 2 * (1.0 - rho) ** 2)
    q = constant * factor * n * math.log(n) / epsilon**2
    return max(1, math.ceil(q))


def sample_count_reff(n: int, epsilon: float, constant: float = 1.0) -> int:
    """Classical resistance-sampling budget: constant * n ln(n) / eps^2, rounded up."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
    return max(1, math.ceil(constant * n * math.log(n) / epsilon**2))


def sparsify_uniform(g: Graph, cfg: SparsifyConfig) -> SparsifyResult:
    """Keep each edge independently with probability min(1, q/m), reweighted by 1/pi."""
    if cfg.method is not SampleMethod.UNIFORM:
        raise ValueError(f"config method is {cfg.method}, expected UNIFORM")
    m = g.m
    if m == 0 or cfg.budget >= m:
        return SparsifyResult(
            graph=g, kept_edges=m, method=cfg.method, seed=cfg.seed, requested_q=cfg.budget
        )
    pi = cfg.budget / m
    rng = np.random.default_rng(cfg.seed)
    draws = rng.random(m)  # one draw per edge, canonical order
    kept = []
    for (u, v, w), r in zip(g.edges, draws):
        if r < pi:
            kept.append((u, v, w / pi))
    sparsified = Graph(n=g.n, edges=tuple(kept))
    return SparsifyResult(
        graph=sparsified,
        kept_edges=len(kept),
        method=cfg.method,
        seed=cfg.seed,
        requested_q=cfg.budget,
    )


def sparsify_reff(
    g: Graph,
    profile: ResistanceProfile,
    cfg: SparsifyConfig,
    rank_mode: RankMode = RankMode.FULL,
) -> SparsifyResult:
    """Draw q edges with replacement proportional to resistance, reweighted unbiasedly.

    Each draw of edge e contributes w_e / (q p_e); repeated draws merge by
    addition, so the expected sparsified Laplacian equals the input's.
    """
    if cfg.method is not SampleMethod.EFFECTIVE_RESISTANCE:
        raise ValueError(f"config method is {cfg.method}, expected EFFECTIVE_RESISTANCE")
    if profile.edges != g.edges:
        raise ValueError("resistance profile does not match the graph's edge list")
    q = cfg.budget
    p = profile.p_full if rank_mode is RankMode.FULL else profile.p_nk
    p = np.asarray(p, dtype=float)
    p = p / p.sum()  # guard against 1e-16 drift before the multinomial
    rng = np.random.default_rng(cfg.seed)
    counts = rng.multinomial(q, p)
    kept = []
    max_w = max(w for _, _, w in g.edges)
    min_p = float(p.min())
    influence_cap = max_w / (q * min_p) + 1e-12
    for (u, v, w), c, pe in zip(g.edges, counts, p):
        if c > 0:
            increment = float(w / (q * pe))
            if increment > influence_cap:
                raise AssertionError(
                    f"draw weight {increment:g} exceeds influence cap {influence_cap:g}"
                )
            kept.append((u, v, int(c) * increment))
    sparsified = Graph(n=g.n, edges=tuple(kept))
    return SparsifyResult(
        graph=sparsified,
        kept_edges=len(kept),
        method=cfg.method,
        seed=cfg.seed,
        requested_q=q,
    )


@dataclass(frozen=True)
class CertificateReport:
    """Monte Carlo quadratic-form comparison between a matrix and its sparsifier.

    Ratios are x^T L~ x / x^T L x over random unit vectors; a trial passes
    when its ratio lies in [1 - eps, 1 + eps]. Trials whose denominator is
    numerically zero are skipped and counted.
    """

    ratios: np.ndarray
    passes: np.ndarray
    skipped: int
    epsilon: float

    @property
    def trials(self) -> int:
        return len(self.ratios) + self.skipped

    @property
    def pass_fraction(self) -> float:
        if len(self.ratios) == 0:
            return math.nan
        return float(self.passes.mean())

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("trial,ratio,pass\n")
            for i, (r, ok) in enumerate(zip(self.ratios, self.passes)):
                fh.write(f"{i},{float(r)!r},{int(ok)}\n")


def quadratic_form_certificate(
    lap: np.ndarray,
    lap_tilde: np.ndarray,
    epsilon: float,
    subspace: np.ndarray | None = None,
    trials: int = 200,
    seed: int = 0,
) -> CertificateReport:
    """Sample random unit vectors and compare the two quadratic forms.

    With ``subspace`` given (orthonormal columns), vectors are drawn inside
    it by sampling coefficients on the basis, which checks the sparsifier
    on the dominant eigenspace only.
    """
    lap = np.asarray(lap, dtype=float)
    lap_tilde = np.asarray(lap_tilde, dtype=float)
    if lap.shape != lap_tilde.shape or lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError(f"incompatible shapes {lap.shape} and {lap_tilde.shape}")
    n = lap.shape[0]
    if subspace is not None:
        subspace = np.asarray(subspace, dtype=float)
        if subspace.ndim != 2 or subspace.shape[0] != n:
            raise ValueError(f"subspace has shape {subspace.shape}, expected ({n}, d)")
        d = subspace.shape[1]
        gram = subspace.T @ subspace
        if float(np.max(np.abs(gram - np.eye(d)))) > 1e-6:
            raise ValueError("subspace columns are not orthonormal")
    rng = np.random.default_rng(seed)
    ratios = []
    skipped = 0
    for _ in range(trials):
        if subspace is None:
            x = rng.standard_normal(n)
        else:
            x = subspace @ rng.standard_normal(subspace.shape[1])
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            skipped += 1
            continue
        x = x / nrm
        denom = float(x @ (lap @ x))
        if denom < 1e-12:
            skipped += 1
            continue
        ratios.append(float(x @ (lap_tilde @ x)) / denom)
    ratios_arr = np.asarray(ratios)
    passes = (ratios_arr >= 1.0 - epsilon) & (ratios_arr <= 1.0 + epsilon)
    return CertificateReport(
        ratios=ratios_arr, passes=passes, skipped=skipped, epsilon=epsilon
    )
