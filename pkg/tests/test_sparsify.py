import math

import numpy as np
import pytest

from clsparse import (
    Graph,
    LaplacianVariant,
    RankMode,
    SampleMethod,
    SparsifyConfig,
    eig_sym,
    laplacian,
    quadratic_form_certificate,
    resistance_profile,
    sample_count_reff,
    sample_count_uniform,
    sparsify_reff,
    sparsify_uniform,
    structure_stats,
)
from clsparse.generators import random_connected_graph
from clsparse.spectral import StructureStats

from conftest import k4, triangle


def make_stats(upsilon, kappa, rho, k=4, lam_k1=1.0, lam_n=2.0):
    return StructureStats(
        upsilon=upsilon, kappa=kappa, rho=rho, k=k, lambda_k1=lam_k1, lambda_n=lam_n
    )


class TestSampleCounts:
    def test_uniform_arithmetic_oracle(self):
        # independent recomputation of the closed form at these inputs
        st = make_stats(upsilon=8.0, kappa=2.0, rho=0.5, k=4)  # k/ups = 0.5
        expected = math.ceil(
            (2.0**2 / ((1 - 0.5) ** 2 * (1 - 0.5) ** 2)) * 800 * math.log(800) / 0.5**2
        )
        assert expected == 1369009
        assert sample_count_uniform(800, 4, st, epsilon=0.5) == expected

    def test_uniform_kappa_quadratic(self):
        st1 = make_stats(upsilon=math.inf, kappa=1.0, rho=0.0)
        st2 = make_stats(upsilon=math.inf, kappa=2.0, rho=0.0)
        q1 = sample_count_uniform(1000, 4, st1, epsilon=0.3)
        q2 = sample_count_uniform(1000, 4, st2, epsilon=0.3)
        assert q2 == pytest.approx(4 * q1, rel=1e-6)

    def test_uniform_vacuous_hypotheses(self):
        with pytest.raises(ValueError, match="vacuous"):
            sample_count_uniform(100, 4, make_stats(2.0, 1.5, 0.1), epsilon=0.5)
        with pytest.raises(ValueError, match="vacuous"):
            sample_count_uniform(100, 4, make_stats(50.0, 1.5, 1.0), epsilon=0.5)

    def test_reff_arithmetic_oracle(self):
        expected = math.ceil(800 * math.log(800) / 0.25)
        assert expected == 21391
        assert sample_count_reff(800, epsilon=0.5) == expected

    def test_reff_constant_scales(self):
        full = 800 * math.log(800) / 0.25
        assert sample_count_reff(800, 0.5, constant=0.5) == math.ceil(full / 2)

    def test_epsilon_validation(self):
        with pytest.raises(ValueError):
            sample_count_reff(10, epsilon=1.0)


class TestUniformSampler:
    def test_budget_at_least_m_is_identity(self):
        g = triangle()
        cfg = SparsifyConfig(method=SampleMethod.UNIFORM, budget=3, seed=0)
        res = sparsify_uniform(g, cfg)
        assert res.graph == g
        assert res.kept_edges == 3

    def test_deterministic_per_seed(self):
        g = random_connected_graph(30, 0.3, seed=2)
        cfg = SparsifyConfig(method=SampleMethod.UNIFORM, budget=g.m // 3, seed=77)
        assert sparsify_uniform(g, cfg) == sparsify_uniform(g, cfg)
        other = SparsifyConfig(method=SampleMethod.UNIFORM, budget=g.m // 3, seed=78)
        assert sparsify_uniform(g, other).graph != sparsify_uniform(g, cfg).graph

    def test_kept_edges_subset_with_scaled_weights(self):
        g = random_connected_graph(25, 0.4, seed=3, weighted=True)
        q = g.m // 2
        cfg = SparsifyConfig(method=SampleMethod.UNIFORM, budget=q, seed=5)
        res = sparsify_uniform(g, cfg)
        original = {(u, v): w for u, v, w in g.edges}
        pi = q / g.m
        for u, v, w in res.graph.edges:
            assert (u, v) in original
            assert w == pytest.approx(original[(u, v)] / pi)
            assert w > 0

    def test_binomial_kept_count(self):
        # m = 1000, q = 500: kept count averages 500 over many seeds
        g = random_connected_graph(300, 0.0223, seed=11)
        # trim/pad to exactly 1000 edges for round numbers
        edges = list(g.edges)[:1000]
        assert len(edges) == 1000
        g = Graph.from_edges(300, edges)
        cfg_proto = dict(method=SampleMethod.UNIFORM, budget=500)
        counts = []
        for s in range(10000):
            res = sparsify_uniform(g, SparsifyConfig(seed=s, **cfg_proto))
            counts.append(res.kept_edges)
        mean = float(np.mean(counts))
        assert abs(mean - 500.0) <= 3.0 * math.sqrt(250.0)
        # and the mean estimator itself is within 3 standard errors
        assert abs(mean - 500.0) <= 3.0 * math.sqrt(250.0 / 10000.0)

    def test_unbiased_laplacian_small_mc(self):
        g = triangle()
        lap = laplacian(g)
        acc = np.zeros_like(lap)
        seeds = 3000
        for s in range(seeds):
            cfg = SparsifyConfig(method=SampleMethod.UNIFORM, budget=2, seed=s)
            acc += laplacian(sparsify_uniform(g, cfg).graph)
        rel = np.abs(acc / seeds - lap) / np.abs(lap)
        assert rel.max() <= 0.05


class TestReffSampler:
    def test_triangle_weight_quantization(self):
        # uniform probabilities (1/3 each) and q = 3 make every increment 1.0
        g = triangle()
        prof = resistance_profile(g, 1)
        cfg = SparsifyConfig(method=SampleMethod.EFFECTIVE_RESISTANCE, budget=3, seed=9)
        res = sparsify_reff(g, prof, cfg)
        for _u, _v, w in res.graph.edges:
            assert w == pytest.approx(round(w))

    def test_single_draw(self):
        g = triangle()
        prof = resistance_profile(g, 1)
        cfg = SparsifyConfig(method=SampleMethod.EFFECTIVE_RESISTANCE, budget=1, seed=4)
        res = sparsify_reff(g, prof, cfg)
        assert res.kept_edges == 1
        (u, v, w) = res.graph.edges[0]
        idx = [e[:2] for e in g.edges].index((u, v))
        assert w == pytest.approx(g.edges[idx][2] / prof.p_full[idx])

    def test_deterministic_per_seed(self):
        g = random_connected_graph(20, 0.4, seed=6)
        prof = resistance_profile(g, 1)
        cfg = SparsifyConfig(method=SampleMethod.EFFECTIVE_RESISTANCE, budget=15, seed=1)
        assert sparsify_reff(g, prof, cfg) == sparsify_reff(g, prof, cfg)

    def test_rank_mode_changes_distribution(self):
        g = random_connected_graph(20, 0.4, seed=6)
        prof = resistance_profile(g, 4)
        cfg = SparsifyConfig(
            method=SampleMethod.EFFECTIVE_RESISTANCE, budget=200, seed=1
        )
        res_full = sparsify_reff(g, prof, cfg, rank_mode=RankMode.FULL)
        res_nk = sparsify_reff(g, prof, cfg, rank_mode=RankMode.RANK_NK)
        assert res_full.graph != res_nk.graph

    def test_profile_mismatch_rejected(self):
        g = triangle()
        prof = resistance_profile(k4(), 1)
        cfg = SparsifyConfig(method=SampleMethod.EFFECTIVE_RESISTANCE, budget=3, seed=0)
        with pytest.raises(ValueError, match="profile"):
            sparsify_reff(g, prof, cfg)

    def test_unbiased_laplacian_small_mc(self):
        g = triangle()
        prof = resistance_profile(g, 1)
        lap = laplacian(g)
        acc = np.zeros_like(lap)
        seeds = 3000
        for s in range(seeds):
            cfg = SparsifyConfig(
                method=SampleMethod.EFFECTIVE_RESISTANCE, budget=3, seed=s
            )
            acc += laplacian(sparsify_reff(g, prof, cfg).graph)
        rel = np.abs(acc / seeds - lap) / np.abs(lap)
        assert rel.max() <= 0.05

    def test_method_tag_mismatch(self):
        g = triangle()
        cfg = SparsifyConfig(method=SampleMethod.EFFECTIVE_RESISTANCE, budget=3, seed=0)
        with pytest.raises(ValueError):
            sparsify_uniform(g, cfg)


class TestCertificate:
    def test_identical_matrices_all_pass(self):
        lap = laplacian(k4())
        rep = quadratic_form_certificate(lap, lap, epsilon=0.01, trials=50, seed=1)
        assert rep.pass_fraction == 1.0
        assert np.all(rep.ratios == 1.0)

    def test_scaled_matrix_all_fail(self):
        lap = laplacian(k4())
        eps = 0.2
        rep = quadratic_form_certificate(lap, (1 + 2 * eps) * lap, epsilon=eps,
                                         trials=50, seed=1)
        assert rep.pass_fraction == 0.0
        assert np.allclose(rep.ratios, 1 + 2 * eps)

    def test_zero_denominator_skipped(self):
        zero = np.zeros((4, 4))
        rep = quadratic_form_certificate(zero, zero, epsilon=0.5, trials=10, seed=0)
        assert rep.skipped == 10
        assert math.isnan(rep.pass_fraction)

    def test_subspace_mode_restricts_vectors(self):
        # L acts as 0 on the kernel; restricted to the dominant eigenvectors the
        # ratio of L~ = 2 L is exactly 2 for every trial
        lap = laplacian(k4())
        spec = eig_sym(lap)
        dominant = spec.dominant(1)
        rep = quadratic_form_certificate(
            lap, 2.0 * lap, epsilon=0.5, subspace=dominant, trials=30, seed=3
        )
        assert np.allclose(rep.ratios, 2.0, atol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            quadratic_form_certificate(np.eye(3), np.eye(4), 0.5)

    def test_csv_round_trip(self, tmp_path):
        lap = laplacian(k4())
        rep = quadratic_form_certificate(lap, lap, epsilon=0.5, trials=5, seed=0)
        out = tmp_path / "cert.csv"
        rep.write_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "trial,ratio,pass"
        assert len(lines) == 6
        assert lines[1].split(",")[1] == "1.0"


class TestConfigValidation:
    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            SparsifyConfig(method=SampleMethod.UNIFORM, budget=1, seed=0, epsilon=1.5)

    def test_bad_budget(self):
        with pytest.raises(ValueError):
            SparsifyConfig(method=SampleMethod.UNIFORM, budget=0, seed=0)

    def test_bad_constant(self):
        with pytest.raises(ValueError):
            SparsifyConfig(method=SampleMethod.UNIFORM, budget=1, seed=0, constant=0.0)
