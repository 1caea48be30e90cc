import math

import numpy as np
import pytest

from clsparse import (
    Graph,
    LaplacianVariant,
    Partition,
    alignment_frobenius,
    eig_sym,
    indicator_matrix,
    laplacian,
    rayleigh,
    rho_of_partition,
    structure_residuals_part1,
    structure_stats,
)
from clsparse.generators import (
    SbmConfig,
    generate_sbm,
    random_connected_graph,
    random_partition,
)

from conftest import k2, two_triangles


def random_symmetric(n, rng):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2.0


class TestEigSym:
    def test_k2_laplacian(self):
        spec = eig_sym(laplacian(k2()))
        assert np.allclose(spec.eigenvalues, [0.0, 2.0], atol=1e-12)

    def test_identity(self):
        spec = eig_sym(np.eye(3))
        assert np.allclose(spec.eigenvalues, [1.0, 1.0, 1.0])

    def test_two_disjoint_edges_block_oracle(self):
        # block-diagonal of two K2 Laplacians: union of per-block eigenvalues
        g = Graph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
        single = np.linalg.eigvalsh(laplacian(k2()))
        expected = np.sort(np.concatenate([single, single]))
        spec = eig_sym(laplacian(g))
        assert np.allclose(spec.eigenvalues, expected, atol=1e-12)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_spectrum_invariants_random(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            n = int(rng.integers(2, 30))
            mat = random_symmetric(n, rng)
            spec = eig_sym(mat)
            lam, vec = spec.eigenvalues, spec.eigenvectors
            assert np.all(np.diff(lam) >= -1e-12)
            assert np.max(np.abs(vec.T @ vec - np.eye(n))) <= 1e-8
            for i in range(n):
                resid = np.linalg.norm(mat @ vec[:, i] - lam[i] * vec[:, i])
                assert resid <= 1e-7 * max(1.0, abs(lam[i]))

    def test_reconstruction(self):
        rng = np.random.default_rng(20)
        for _ in range(25):
            n = int(rng.integers(2, 40))
            mat = random_symmetric(n, rng)
            spec = eig_sym(mat)
            rebuilt = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.T
            assert np.linalg.norm(rebuilt - mat) <= 1e-7 * np.linalg.norm(mat)

    def test_bottom_dominant_split(self):
        spec = eig_sym(np.diag([1.0, 2.0, 3.0]))
        assert spec.bottom(1).shape == (3, 1)
        assert spec.dominant(1).shape == (3, 2)


class TestStructureStats:
    def test_direct_ratios(self):
        spec = eig_sym(np.diag([0.0, 0.01, 0.02, 0.9, 1.1, 2.0]))
        st = structure_stats(spec, rho=0.05, k=3)
        assert st.upsilon == pytest.approx(18.0)
        assert st.kappa == pytest.approx(2.0 / 0.9)
        assert st.lambda_k1 == pytest.approx(0.9)
        assert st.lambda_n == pytest.approx(2.0)

    def test_zero_rho_flags_infinite(self):
        g, p = two_triangles()
        spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
        st = structure_stats(spec, rho_of_partition(g, p), k=2)
        assert math.isinf(st.upsilon)
        assert not st.upsilon_finite
        assert st.kappa_defined

    def test_k_equals_n_minus_1(self):
        spec = eig_sym(np.diag([0.0, 1.0, 3.0]))
        st = structure_stats(spec, rho=0.5, k=2)
        assert st.kappa == pytest.approx(1.0)

    def test_zero_lambda_k1_undefined_kappa(self):
        g, _ = two_triangles()
        spec = eig_sym(laplacian(g))
        st = structure_stats(spec, rho=0.5, k=1)  # lambda_2 = 0 (two components)
        assert not st.kappa_defined
        assert math.isnan(st.kappa)

    def test_k_out_of_range(self):
        spec = eig_sym(np.eye(3))
        with pytest.raises(ValueError):
            structure_stats(spec, 0.1, k=3)


class TestRayleigh:
    def test_top_eigenvector(self):
        assert rayleigh(laplacian(k2()), np.array([1.0, -1.0])) == pytest.approx(2.0)

    def test_kernel_vector(self):
        assert rayleigh(laplacian(k2()), np.array([1.0, 1.0])) == pytest.approx(0.0)

    def test_average(self):
        assert rayleigh(np.diag([1.0, 3.0]), np.array([1.0, 1.0])) == pytest.approx(2.0)

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            rayleigh(np.eye(2), np.zeros(2))


class TestStructureResiduals:
    def test_exact_for_disjoint_triangles(self):
        g, p = two_triangles()
        spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
        resid = structure_residuals_part1(spec, indicator_matrix(p), 2)
        assert np.all(resid <= 1e-10)

    def test_residuals_in_unit_interval(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n = int(rng.integers(6, 30))
            k = int(rng.integers(2, 5))
            g = random_connected_graph(n, 0.3, int(rng.integers(2**31)), weighted=True)
            p = random_partition(n, k, int(rng.integers(2**31)))
            spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
            resid = structure_residuals_part1(spec, indicator_matrix(p), k)
            assert np.all(resid >= -1e-12)
            assert np.all(resid <= 1.0 + 1e-12)

    def test_sbm_bounded_by_inverse_upsilon(self):
        cfg = SbmConfig(cluster_sizes=(50, 50), p_intra=0.5, p_inter=0.01, seed=1)
        g, p = generate_sbm(cfg)
        spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
        st = structure_stats(spec, rho_of_partition(g, p), 2)
        resid = structure_residuals_part1(spec, indicator_matrix(p), 2)
        assert st.upsilon_finite
        assert np.all(resid <= 1.0 / st.upsilon + 1e-9)

    def test_dimension_mismatch(self):
        g, p = two_triangles()
        spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
        with pytest.raises(ValueError):
            structure_residuals_part1(spec, indicator_matrix(p)[:4], 2)


class TestAlignment:
    def test_disjoint_triangles_aligned(self):
        g, p = two_triangles()
        spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
        assert alignment_frobenius(spec.dominant(2), indicator_matrix(p)) <= 1e-10

    def test_orthogonal_columns_zero(self):
        basis = np.eye(4)[:, :2]
        cmat = np.eye(4)[:, 2:]
        assert alignment_frobenius(basis, cmat) == 0.0

    def test_full_space_gives_k(self):
        rng = np.random.default_rng(2)
        q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        cmat = indicator_matrix(Partition(assignment=(0, 0, 1, 1, 2), k=3))
        assert alignment_frobenius(q, cmat) == pytest.approx(3.0, abs=1e-9)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError, match="orthonormal"):
            alignment_frobenius(np.ones((4, 2)), np.eye(4)[:, :2])

    def test_complementary_identity(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            n = int(rng.integers(5, 30))
            k = int(rng.integers(1, 5))
            g = random_connected_graph(n, 0.3, int(rng.integers(2**31)), weighted=True)
            p = random_partition(n, min(k, n), int(rng.integers(2**31)))
            cmat = indicator_matrix(p)
            spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
            bottom = alignment_frobenius(spec.bottom(p.k), cmat)
            top = alignment_frobenius(spec.dominant(p.k), cmat)
            assert bottom + top == pytest.approx(p.k, abs=1e-8)

    def test_part2_inequality_on_sbm_corpus(self):
        for seed in range(50):
            cfg = SbmConfig(cluster_sizes=(40, 40, 40), p_intra=0.5, p_inter=0.02,
                            seed=seed)
            g, p = generate_sbm(cfg)
            spec = eig_sym(laplacian(g, LaplacianVariant.NORMALIZED))
            st = structure_stats(spec, rho_of_partition(g, p), p.k)
            if not st.upsilon_finite:
                continue
            align = alignment_frobenius(spec.dominant(p.k), indicator_matrix(p))
            assert align <= p.k / st.upsilon + 1e-9

    def test_trace_chain(self):
        # trace(C^T L C) equals the Rayleigh sum and dominates lambda_{k+1} * alignment
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(6, 30))
            k = int(rng.integers(2, 5))
            g = random_connected_graph(n, 0.3, int(rng.integers(2**31)))
            p = random_partition(n, k, int(rng.integers(2**31)))
            cmat = indicator_matrix(p)
            lap = laplacian(g, LaplacianVariant.NORMALIZED)
            spec = eig_sym(lap)
            trace = float(np.trace(cmat.T @ lap @ cmat))
            ray_sum = sum(rayleigh(lap, cmat[:, i]) for i in range(k))
            assert trace == pytest.approx(ray_sum, abs=1e-9)
            align = alignment_frobenius(spec.dominant(k), cmat)
            assert trace >= float(spec.eigenvalues[k]) * align - 1e-9
