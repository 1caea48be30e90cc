"""Exact effective resistances, leverage scores, and sampling distributions.

Everything here works on the unnormalized Laplacian, computed by exact
eigendecomposition (desk scale, no sketching). The rank-restricted variant
drops the bottom k eigenpairs, which for k = 1 on a connected graph
coincides with the classical pseudoinverse resistance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, LaplacianVariant, Partition, connected_components, laplacian
from .spectral import Spectrum, StructureStats, eig_sym

__all__ = [
    "DisconnectedGraphError",
    "EdgeBoundReport",
    "RelativeProbReport",
    "ResistanceProfile",
    "effective_resistance",
    "pinv_psd",
    "rank_nk_resistance",
    "resistance_profile",
    "verify_effres_bounds",
    "verify_relative_probabilities",
]

DEFAULT_RANK_TOL = 1e-10


class DisconnectedGraphError(ValueError):
    """Resistance queries across components are infinite and rejected."""


def pinv_psd(mat: np.ndarray, rank_tolerance: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix.

    Eigenvalues at or below ``rank_tolerance * lambda_max`` count as zero.
    """
    spec = eig_sym(np.asarray(mat, dtype=float))
    lam = spec.eigenvalues
    lam_max = float(lam[-1]) if len(lam) else 0.0
    cutoff = rank_tolerance * max(lam_max, 0.0)
    inv = np.where(lam > cutoff, 1.0 / np.where(lam > cutoff, lam, 1.0), 0.0)
    out = (spec.eigenvectors * inv) @ spec.eigenvectors.T
    return (out + out.T) / 2.0


def effective_resistance(g: Graph, u: int, v: int) -> float:
    """Electrical resistance between u and v, treating edges as resistors.

    Both endpoints must lie in the same connected component; otherwise the
    resistance is infinite and an error is raised.
    """
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError(f"vertex pair ({u},{v}) out of range for n={g.n}")
    if u == v:
        raise ValueError("effective resistance requires distinct vertices")
    comp = connected_components(g)
    if comp[u] != comp[v]:
        raise DisconnectedGraphError(
            f"vertices {u} and {v} lie in different components (infinite resistance)"
        )
    lp = pinv_psd(laplacian(g, LaplacianVariant.UNNORMALIZED))
    return float(lp[u, u] + lp[v, v] - 2.0 * lp[u, v])


def _zero_tol(spec: Spectrum) -> float:
    return 1e-12 * max(1.0, abs(float(spec.eigenvalues[-1])))


def rank_nk_resistance(spec: Spectrum, k: int, a: int, b: int) -> float:
    """Resistance restricted to the top n-k eigenpairs of the Laplacian.

    Equals sum over i > k of (v_i(a) - v_i(b))^2 / lambda_i. Requires
    lambda_{k+1} > 0, i.e. k at least the number of zero eigenvalues.
    """
    n = spec.n
    if not 0 <= k < n:
        raise ValueError(f"k={k} must satisfy 0 <= k < n={n}")
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError(f"vertex pair ({a},{b}) out of range for n={n}")
    if a == b:
        return 0.0
    lam = spec.eigenvalues[k:]
    ztol = _zero_tol(spec)
    if float(lam[0]) <= ztol:
        raise ValueError(f"lambda_{k + 1} is zero; rank-(n-k) resistance undefined")
    diff = spec.eigenvectors[a, k:] - spec.eigenvectors[b, k:]
    return float(np.sum(diff * diff / lam))


@dataclass(frozen=True)
class ResistanceProfile:
    """Per-edge resistances, leverage scores, and sampling distributions.

    ``r_full`` uses the full pseudoinverse; ``r_nk`` restricts to the top
    n-k eigenpairs. tau = w * r, and each p distribution is tau normalized
    to sum 1.
    """

    k: int
    edges: tuple[tuple[int, int, float], ...]
    r_full: np.ndarray
    r_nk: np.ndarray
    tau_full: np.ndarray
    tau_nk: np.ndarray
    p_full: np.ndarray
    p_nk: np.ndarray
    tau_full_sum: float
    tau_nk_sum: float

    @property
    def m(self) -> int:
        return len(self.edges)


def resistance_profile(g: Graph, k: int, rank_tolerance: float = DEFAULT_RANK_TOL) -> ResistanceProfile:
    """Compute the full and rank-(n-k) resistance profile of a connected graph."""
    if g.m == 0:
        raise ValueError("resistance profile of an edgeless graph is undefined")
    if not 1 <= k < g.n:
        raise ValueError(f"k={k} must satisfy 1 <= k < n={g.n}")
    comp = connected_components(g)
    if comp.max() > 0:
        raise DisconnectedGraphError(
            f"graph has {comp.max() + 1} components; resistances are infinite"
        )
    spec = eig_sym(laplacian(g, LaplacianVariant.UNNORMALIZED))
    lam = spec.eigenvalues
    lam_max = float(lam[-1])
    cutoff = rank_tolerance * max(lam_max, 0.0)
    nz = lam > cutoff

    us, vs, ws = g.edge_arrays()
    diff = spec.eigenvectors[us, :] - spec.eigenvectors[vs, :]  # m x n
    sq = diff * diff
    with np.errstate(divide="ignore"):
        inv_full = np.where(nz, 1.0 / np.where(nz, lam, 1.0), 0.0)
    r_full = sq @ inv_full
    r_nk = sq[:, k:] @ (1.0 / lam[k:])

    tau_full = ws * r_full
    tau_nk = ws * r_nk
    s_full = float(tau_full.sum())
    s_nk = float(tau_nk.sum())
    return ResistanceProfile(
        k=k,
        edges=g.edges,
        r_full=r_full,
        r_nk=r_nk,
        tau_full=tau_full,
        tau_nk=tau_nk,
        p_full=tau_full / s_full,
        p_nk=tau_nk / s_nk,
        tau_full_sum=s_full,
        tau_nk_sum=s_nk,
    )


@dataclass(frozen=True)
class EdgeBoundReport:
    """Per-edge two-sided bound check with aggregate pass rates.

    ``vacuous`` marks reports whose lower bound carries no content because
    the hypotheses (k/upsilon < 1 and, where it applies, rho < 1) fail.
    """

    pairs: tuple[tuple[int, int], ...]
    values: np.ndarray
    lower: float
    upper: float
    pass_lower: np.ndarray
    pass_upper: np.ndarray
    vacuous: bool

    @property
    def lower_pass_rate(self) -> float:
        return float(self.pass_lower.mean()) if len(self.pass_lower) else 1.0

    @property
    def upper_pass_rate(self) -> float:
        return float(self.pass_upper.mean()) if len(self.pass_upper) else 1.0

    @property
    def all_upper_pass(self) -> bool:
        return bool(self.pass_upper.all()) if len(self.pass_upper) else True

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("edge_u,edge_v,value,lower,upper,pass_lower,pass_upper\n")
            for (u, v), val, pl, pu in zip(
                self.pairs, self.values, self.pass_lower, self.pass_upper
            ):
                fh.write(
                    f"{u},{v},{float(val)!r},{float(self.lower)!r},"
                    f"{float(self.upper)!r},{int(pl)},{int(pu)}\n"
                )


@dataclass(frozen=True)
class RelativeProbReport(EdgeBoundReport):
    """EdgeBoundReport plus the observed spread of p_e relative to uniform."""

    ratio_max: float = 1.0
    ratio_min: float = 1.0


_BOUND_SLACK = 1e-9


def verify_effres_bounds(
    g: Graph,
    p: Partition,
    spec: Spectrum,
    stats: StructureStats,
    pairs: str = "edges",
) -> EdgeBoundReport:
    """Check the two-sided rank-(n-k) resistance bound on intra-cluster pairs.

    The upper bound 2/lambda_{k+1} holds unconditionally; the lower bound
    (1/kappa) (1 - k/upsilon) 2/lambda_{k+1} is only meaningful when
    k/upsilon < 1, so the report is flagged vacuous otherwise. ``pairs``
    selects intra-cluster "edges" (default) or "all" intra-cluster pairs.

    ``spec`` and ``stats`` must come from the same (unnormalized) Laplacian.
    """
    if pairs not in ("edges", "all"):
        raise ValueError(f"pairs must be 'edges' or 'all', got {pairs!r}")
    k = stats.k
    if stats.lambda_k1 <= 0:
        raise ValueError("lambda_{k+1} is zero; bounds undefined")
    upper = 2.0 / stats.lambda_k1
    k_over_ups = 0.0 if not stats.upsilon_finite else k / stats.upsilon
    vacuous = (not stats.kappa_defined) or k_over_ups >= 1.0
    if vacuous:
        lower = 0.0
    else:
        lower = (1.0 / stats.kappa) * (1.0 - k_over_ups) * upper

    assign = np.asarray(p.assignment)
    if pairs == "edges":
        pair_list = [(u, v) for u, v, _ in g.edges if assign[u] == assign[v]]
    else:
        pair_list = []
        for cluster in p.clusters():
            for i in range(len(cluster)):
                for j in range(i + 1, len(cluster)):
                    pair_list.append((int(cluster[i]), int(cluster[j])))

    if pair_list:
        idx = np.asarray(pair_list)
        diff = spec.eigenvectors[idx[:, 0], k:] - spec.eigenvectors[idx[:, 1], k:]
        values = (diff * diff) @ (1.0 / spec.eigenvalues[k:])
    else:
        values = np.zeros(0)
    pass_upper = values <= upper + _BOUND_SLACK
    pass_lower = values >= lower - _BOUND_SLACK
    return EdgeBoundReport(
        pairs=tuple(pair_list),
        values=values,
        lower=lower,
        upper=upper,
        pass_lower=pass_lower,
        pass_upper=pass_upper,
        vacuous=vacuous,
    )


def verify_relative_probabilities(
    profile: ResistanceProfile, stats: StructureStats
) -> RelativeProbReport:
    """Check that rank-(n-k) sampling probabilities stay near uniform.

    Bounds each p_e between c * p_unif and p_unif / c with
    c = (1 - k/upsilon)(1 - rho)/kappa; vacuous when rho >= 1,
    k/upsilon >= 1, or kappa is undefined.
    """
    m = profile.m
    p_unif = 1.0 / m
    k_over_ups = 0.0 if not stats.upsilon_finite else stats.k / stats.upsilon
    vacuous = (
        (not stats.kappa_defined)
        or k_over_ups >= 1.0
        or stats.rho >= 1.0
    )
    if vacuous:
        lower, upper = 0.0, math.inf
    else:
        factor = (1.0 - k_over_ups) * (1.0 - stats.rho) / stats.kappa
        lower = factor * p_unif
        upper = p_unif / factor

    values = profile.p_nk
    pass_lower = values >= lower - _BOUND_SLACK
    pass_upper = values <= upper + _BOUND_SLACK
    return RelativeProbReport(
        pairs=tuple((u, v) for u, v, _ in profile.edges),
        values=values,
        lower=lower,
        upper=upper,
        pass_lower=pass_lower,
        pass_upper=pass_upper,
        vacuous=vacuous,
        ratio_max=float(values.max()) * m,
        ratio_min=float(values.min()) * m,
    )
