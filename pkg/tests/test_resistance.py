import numpy as np
import pytest

from clsparse import (
    DisconnectedGraphError,
    Graph,
    LaplacianVariant,
    Partition,
    effective_resistance,
    eig_sym,
    laplacian,
    pinv_psd,
    rank_nk_resistance,
    resistance_profile,
    rho_of_partition,
    structure_stats,
    verify_effres_bounds,
    verify_relative_probabilities,
)
from clsparse.generators import (
    SbmConfig,
    generate_sbm,
    random_connected_graph,
)

from conftest import cycle, k2, k4, star, triangle, two_triangles


class TestPinv:
    def test_diagonal(self):
        assert np.allclose(pinv_psd(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    def test_identity(self):
        assert np.allclose(pinv_psd(np.eye(3)), np.eye(3))

    def test_k2_laplacian_hand_oracle(self):
        # eigenpairs: (0, (1,1)/sqrt2), (2, (1,-1)/sqrt2) -> pinv = (1/4) [[1,-1],[-1,1]]
        lap = laplacian(k2())
        assert np.allclose(pinv_psd(lap), 0.25 * np.array([[1, -1], [-1, 1]]))

    def test_penrose_identity_random(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            n = int(rng.integers(2, 25))
            g = random_connected_graph(n, 0.3, int(rng.integers(2**31)), weighted=True)
            lap = laplacian(g)
            pinv = pinv_psd(lap)
            assert np.linalg.norm(lap @ pinv @ lap - lap) <= 1e-7 * np.linalg.norm(lap)


class TestEffectiveResistance:
    def test_single_edge(self):
        assert effective_resistance(k2(), 0, 1) == pytest.approx(1.0, abs=1e-12)

    def test_triangle_series_parallel(self):
        # direct edge (1 ohm) in parallel with the two-edge path (2 ohm): 2/3
        assert effective_resistance(triangle(), 0, 1) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_k4_by_symmetry(self):
        assert effective_resistance(k4(), 1, 3) == pytest.approx(0.5, abs=1e-12)

    def test_disconnected_pair_rejected(self):
        g, _ = two_triangles()
        with pytest.raises(DisconnectedGraphError):
            effective_resistance(g, 0, 4)

    def test_same_vertex_rejected(self):
        with pytest.raises(ValueError):
            effective_resistance(triangle(), 1, 1)

    def test_rayleigh_monotonicity(self):
        # adding an edge never increases the resistance between a fixed pair
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(5, 25))
            g = random_connected_graph(n, 0.15, int(rng.integers(2**31)))
            existing = {(u, v) for u, v, _ in g.edges}
            candidates = [
                (u, v)
                for u in range(n)
                for v in range(u + 1, n)
                if (u, v) not in existing
            ]
            if not candidates:
                continue
            u, v = candidates[int(rng.integers(len(candidates)))]
            a, b = 0, n - 1
            before = effective_resistance(g, a, b)
            g2 = Graph.from_edges(n, list(g.edges) + [(u, v, 1.0)])
            after = effective_resistance(g2, a, b)
            assert after <= before + 1e-10


class TestRankRestricted:
    def test_k1_matches_full_on_connected(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            n = int(rng.integers(3, 30))
            g = random_connected_graph(n, 0.25, int(rng.integers(2**31)), weighted=True)
            spec = eig_sym(laplacian(g))
            a, b = 0, int(rng.integers(1, n))
            assert rank_nk_resistance(spec, 1, a, b) == pytest.approx(
                effective_resistance(g, a, b), abs=1e-9
            )

    def test_same_vertex_is_zero(self):
        spec = eig_sym(laplacian(triangle()))
        assert rank_nk_resistance(spec, 1, 2, 2) == 0.0

    def test_triangle_spectral_sum_oracle(self):
        # both nonzero eigenvalues are 3; (delta_0 - delta_1) has squared norm 2
        # in their eigenspace, so the sum is 2/3
        spec = eig_sym(laplacian(triangle()))
        assert rank_nk_resistance(spec, 1, 0, 1) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_k_out_of_range(self):
        spec = eig_sym(laplacian(triangle()))
        with pytest.raises(ValueError):
            rank_nk_resistance(spec, 3, 0, 1)

    def test_zero_lambda_rejected(self):
        g, _ = two_triangles()
        spec = eig_sym(laplacian(g))
        with pytest.raises(ValueError, match="zero"):
            rank_nk_resistance(spec, 1, 0, 1)  # lambda_2 = 0: two components

    def test_monotone_in_k(self):
        rng = np.random.default_rng(14)
        for _ in range(15):
            n = int(rng.integers(5, 25))
            g = random_connected_graph(n, 0.3, int(rng.integers(2**31)))
            spec = eig_sym(laplacian(g))
            for u, v, _w in g.edges:
                prev = np.inf
                for k in range(1, n):
                    val = rank_nk_resistance(spec, k, u, v)
                    assert val <= prev + 1e-12
                    prev = val


class TestProfile:
    def test_triangle_uniform_distribution(self):
        prof = resistance_profile(triangle(), 1)
        assert np.allclose(prof.p_nk, 1.0 / 3.0, atol=1e-12)
        assert np.allclose(prof.p_full, 1.0 / 3.0, atol=1e-12)

    def test_star_tree_leverage(self):
        prof = resistance_profile(star(3), 1)
        assert np.allclose(prof.tau_full, 1.0, atol=1e-10)
        assert prof.tau_full_sum == pytest.approx(3.0, abs=1e-10)

    def test_probabilities_sum_to_one(self, small_corpus):
        for g in small_corpus[:10]:
            prof = resistance_profile(g, 1)
            assert abs(prof.p_full.sum() - 1.0) <= 1e-10
            assert abs(prof.p_nk.sum() - 1.0) <= 1e-10

    def test_foster_identity(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            n = int(rng.integers(5, 61))
            g = random_connected_graph(n, 0.2, int(rng.integers(2**31)))
            prof = resistance_profile(g, 1)
            assert abs(prof.tau_full_sum - (n - 1)) <= 1e-8

    def test_rank_trace_identity(self, small_corpus):
        for g in small_corpus[:15]:
            for k in range(1, g.n // 2 + 1, max(1, g.n // 6)):
                prof = resistance_profile(g, k)
                assert abs(prof.tau_nk_sum - (g.n - k)) <= 1e-8

    def test_disconnected_rejected(self):
        g, _ = two_triangles()
        with pytest.raises(DisconnectedGraphError):
            resistance_profile(g, 2)

    def test_all_pairs_upper_bound(self, small_corpus):
        # 2/lambda_{k+1} bounds the rank-restricted resistance of every pair
        for g in small_corpus[:8]:
            spec = eig_sym(laplacian(g))
            for k in (1, 2):
                bound = 2.0 / float(spec.eigenvalues[k])
                for a in range(0, g.n, max(1, g.n // 5)):
                    for b in range(a + 1, g.n, max(1, g.n // 5)):
                        assert rank_nk_resistance(spec, k, a, b) <= bound + 1e-9


class TestBoundVerifiers:
    def _stats_unnorm(self, g, p, k):
        spec = eig_sym(laplacian(g, LaplacianVariant.UNNORMALIZED))
        return spec, structure_stats(spec, rho_of_partition(g, p), k)

    def test_upper_bound_always_passes(self):
        rng = np.random.default_rng(33)
        for _ in range(10):
            n = int(rng.integers(8, 30))
            g = random_connected_graph(n, 0.3, int(rng.integers(2**31)))
            p = Partition(
                assignment=tuple(int(i >= n // 2) for i in range(n)), k=2
            )
            spec, st = self._stats_unnorm(g, p, 2)
            rep = verify_effres_bounds(g, p, spec, st)
            assert rep.all_upper_pass

    def test_near_disconnected_lower_bound(self):
        edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0),
                 (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1e-6)]
        g = Graph.from_edges(6, edges)
        p = Partition(assignment=(0, 0, 0, 1, 1, 1), k=2)
        spec, st = self._stats_unnorm(g, p, 2)
        rep = verify_effres_bounds(g, p, spec, st)
        assert not rep.vacuous
        assert rep.pass_lower.all()
        assert rep.pass_upper.all()

    def test_vacuous_flagged(self):
        # path on 6 vertices with the alternating partition: rho = 1 and
        # lambda_3 = 1, so k/upsilon = 2 and the lower bound carries nothing
        g = Graph.from_edges(6, [(i, i + 1, 1.0) for i in range(5)])
        p = Partition(assignment=(0, 1, 0, 1, 0, 1), k=2)
        spec, st = self._stats_unnorm(g, p, 2)
        rep = verify_effres_bounds(g, p, spec, st)
        assert rep.vacuous
        assert rep.all_upper_pass

    def test_all_pairs_mode_includes_nonedges(self):
        g, p = two_triangles()
        g = Graph.from_edges(6, list(g.edges) + [(2, 3, 1.0)])
        spec, st = self._stats_unnorm(g, p, 2)
        rep_edges = verify_effres_bounds(g, p, spec, st, pairs="edges")
        rep_all = verify_effres_bounds(g, p, spec, st, pairs="all")
        assert len(rep_all.pairs) == 6  # C(3,2) per triangle
        assert len(rep_edges.pairs) == 6  # all triangle edges are intra
        assert set(rep_edges.pairs) == set(rep_all.pairs)

    def test_report_csv_schema(self, tmp_path):
        g, p = two_triangles()
        g = Graph.from_edges(6, list(g.edges) + [(2, 3, 1.0)])
        spec, st = self._stats_unnorm(g, p, 2)
        rep = verify_effres_bounds(g, p, spec, st)
        out = tmp_path / "rep.csv"
        rep.write_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "edge_u,edge_v,value,lower,upper,pass_lower,pass_upper"
        assert len(lines) == 1 + len(rep.pairs)
        first = lines[1].split(",")
        assert float(first[2]) == pytest.approx(rep.values[0])


class TestRelativeProbabilities:
    def test_triangle_exact_uniform(self):
        prof = resistance_profile(triangle(), 1)
        spec = eig_sym(laplacian(triangle()))
        st = structure_stats(spec, 0.5, 1)
        rep = verify_relative_probabilities(prof, st)
        assert rep.ratio_max == pytest.approx(1.0, abs=1e-10)
        assert rep.ratio_min == pytest.approx(1.0, abs=1e-10)

    def test_cycle_edge_transitive(self):
        g = cycle(6)
        prof = resistance_profile(g, 1)
        assert np.allclose(prof.p_nk * g.m, 1.0, atol=1e-10)

    def test_sbm_strong_all_pass(self):
        cfg = SbmConfig(cluster_sizes=(50,) * 4, p_intra=0.5, p_inter=0.005, seed=1)
        g, p = generate_sbm(cfg)
        prof = resistance_profile(g, 4)
        spec = eig_sym(laplacian(g))
        st = structure_stats(spec, rho_of_partition(g, p), 4)
        rep = verify_relative_probabilities(prof, st)
        assert not rep.vacuous
        assert rep.pass_lower.all()
        assert rep.pass_upper.all()
