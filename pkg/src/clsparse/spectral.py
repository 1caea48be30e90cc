"""Symmetric eigendecomposition and clusterability statistics.

All subspace comparisons go through projectors or singular values, so the
sign/rotation ambiguity of individual eigenvectors never matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Spectrum",
    "StructureStats",
    "alignment_frobenius",
    "eig_sym",
    "rayleigh",
    "structure_residuals_part1",
    "structure_stats",
]

_SYM_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order with matching orthonormal eigenvectors.

    Column i of ``eigenvectors`` pairs with ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def bottom(self, k: int) -> np.ndarray:
        """The k eigenvectors of smallest eigenvalue, as an n x k matrix."""
        if not 0 <= k <= self.n:
            raise ValueError(f"k={k} out of range for n={self.n}")
        return self.eigenvectors[:, :k]

    def dominant(self, k: int) -> np.ndarray:
        """The n-k eigenvectors of largest eigenvalue (all but the bottom k)."""
        if not 0 <= k <= self.n:
            raise ValueError(f"k={k} out of range for n={self.n}")
        return self.eigenvectors[:, k:]


def eig_sym(mat: np.ndarray) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix.

    The input must be symmetric to a small absolute tolerance; it is
    symmetrized exactly before the solve so results do not depend on which
    triangle carried rounding noise.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    scale = max(1.0, float(np.max(np.abs(mat))) if mat.size else 1.0)
    asym = float(np.max(np.abs(mat - mat.T))) if mat.size else 0.0
    if asym > _SYM_TOL * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:g})")
    sym = (mat + mat.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    return Spectrum(eigenvalues=vals, eigenvectors=vecs)


@dataclass(frozen=True)
class StructureStats:
    """Spectral clusterability summary for a k-way partition.

    upsilon = lambda_{k+1} / rho (infinite when rho = 0) and
    kappa = lambda_n / lambda_{k+1} (NaN when lambda_{k+1} = 0).
    """

    upsilon: float
    kappa: float
    rho: float
    k: int
    lambda_k1: float
    lambda_n: float

    @property
    def upsilon_finite(self) -> bool:
        return math.isfinite(self.upsilon)

    @property
    def kappa_defined(self) -> bool:
        return not math.isnan(self.kappa)


def structure_stats(spec: Spectrum, rho: float, k: int) -> StructureStats:
    """Compute the structure ratio and restricted condition number.

    lambda_{k+1} is the ascending eigenvalue at 0-based index k; lambda_n is
    the largest. Eigenvalues that are zero up to solver noise are treated as
    exact zeros.
    """
    n = spec.n
    if not 1 <= k < n:
        raise ValueError(f"k={k} must satisfy 1 <= k < n={n}")
    if rho < 0:
        raise ValueError(f"negative expansion rho={rho}")
    lam = spec.eigenvalues
    lam_k1 = float(lam[k])
    lam_n = float(lam[-1])
    ztol = 1e-12 * max(1.0, abs(lam_n))
    if lam_k1 <= ztol:
        lam_k1_eff = 0.0
    else:
        lam_k1_eff = lam_k1
    if lam_k1_eff == 0.0:
        kappa = math.nan
    else:
        kappa = lam_n / lam_k1_eff
    if rho == 0.0:
        upsilon = math.inf
    else:
        upsilon = lam_k1_eff / rho
    return StructureStats(
        upsilon=upsilon, kappa=kappa, rho=float(rho), k=k,
        lambda_k1=lam_k1_eff, lambda_n=lam_n,
    )


def rayleigh(mat: np.ndarray, x: np.ndarray) -> float:
    """x^T M x / ||x||^2."""
    x = np.asarray(x, dtype=float)
    nrm2 = float(x @ x)
    if nrm2 <= 0:
        raise ValueError("Rayleigh quotient of the zero vector is undefined")
    return float(x @ (np.asarray(mat) @ x)) / nrm2


def structure_residuals_part1(spec: Spectrum, indicators: np.ndarray, k: int) -> np.ndarray:
    """Squared distance of each normalized cluster indicator to the bottom-k eigenspace.

    Entry i is ||c_i - V_k V_k^T c_i||^2, which lies in [0, 1] and, for a
    partition whose structure ratio is finite, is bounded by its reciprocal.
    """
    indicators = np.asarray(indicators, dtype=float)
    if indicators.ndim != 2 or indicators.shape[0] != spec.n:
        raise ValueError(
            f"indicator matrix has shape {indicators.shape}, expected ({spec.n}, k)"
        )
    if indicators.shape[1] != k:
        raise ValueError(f"indicator matrix has {indicators.shape[1]} columns, expected k={k}")
    vk = spec.bottom(k)
    proj = vk @ (vk.T @ indicators)
    resid = indicators - proj
    return np.sum(resid * resid, axis=0)


def alignment_frobenius(basis: np.ndarray, indicators: np.ndarray) -> float:
    """Squared Frobenius norm of the indicator projection onto a subspace.

    ``basis`` is any n x d matrix with orthonormal columns (checked to
    1e-6); the value is ||basis^T C||_F^2 and lies in [0, k].
    """
    basis = np.asarray(basis, dtype=float)
    indicators = np.asarray(indicators, dtype=float)
    if basis.ndim != 2 or indicators.ndim != 2 or basis.shape[0] != indicators.shape[0]:
        raise ValueError(
            f"incompatible shapes {basis.shape} and {indicators.shape}"
        )
    d = basis.shape[1]
    if d:
        gram = basis.T @ basis
        if float(np.max(np.abs(gram - np.eye(d)))) > 1e-6:
            raise ValueError("basis columns are not orthonormal")
    cross = basis.T @ indicators
    return float(np.sum(cross * cross))
