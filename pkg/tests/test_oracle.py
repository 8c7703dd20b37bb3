import numpy as np
import pytest

from cossc.exceptions import ContractViolationError, EnumerationGuardError
from cossc.graph import (
    MustLinkSet,
    SimilarityGraph,
    connected_components,
    scale_must_links,
)
from cossc.model import EdgeIndicator
from cossc.oracle import (
    TheoremVerdict,
    brute_force_mip,
    compute_beta_bar,
    phi,
    verify_mustlink_theorem,
)
from cossc.solver import SolverConfig, cossc_solve, default_h0

from _helpers import random_graph


def single_unit_edge():
    return SimilarityGraph.from_edges(2, [(0, 1)], [1.0])


def tiny_instance(rng, max_edges=12):
    G = random_graph(rng, n_min=4, n_max=7, density=0.5, w_lo=0.2, max_edges=max_edges)
    _, c_full = connected_components(G.n, G.rows, G.cols)
    d = min(G.n - 1, c_full + int(rng.integers(0, 2)))
    d = max(d, c_full)
    if d >= G.n:
        d = G.n - 1
    return G, d, c_full


class TestPhi:
    def test_zero_indicator(self):
        G = single_unit_edge()
        assert phi(G, EdgeIndicator.zeros(1), beta=0.5, d=1) == 0.0

    def test_single_edge_kept(self):
        G = single_unit_edge()
        assert phi(G, EdgeIndicator.all_ones(1), beta=0.5, d=1) == pytest.approx(-1.0)

    def test_global_minimizer_is_kept_edge(self):
        result = brute_force_mip(single_unit_edge(), beta=0.5, d=1)
        assert result.phi_table == pytest.approx([0.0, -1.0])
        assert result.global_value == pytest.approx(-1.0)
        assert result.num_minimizers == 1
        assert np.all(result.minimizers[0].values == 1.0)


class TestBruteForce:
    def test_guard(self):
        rng = np.random.default_rng(0)
        G = random_graph(rng, n_min=10, n_max=10, density=1.0)
        assert G.num_edges > 20
        with pytest.raises(EnumerationGuardError):
            brute_force_mip(G, beta=0.5, d=2, guard=20)

    def test_large_beta_unique_all_ones(self):
        rng = np.random.default_rng(1)
        for _ in range(15):
            G, d, _ = tiny_instance(rng)
            result = brute_force_mip(G, beta=1.5, d=d)
            assert result.num_minimizers == 1
            assert np.all(result.minimizers[0].values == 1.0)

    def test_small_beta_exactly_d_components(self):
        rng = np.random.default_rng(2)
        for _ in range(15):
            G, d, _ = tiny_instance(rng)
            result = brute_force_mip(G, beta=1.0, d=d)
            assert result.beta_bar > 0
            rescored = result.rescored(result.beta_bar / 2.0)
            for z in rescored.minimizers:
                keep = z.values > 0.5
                _, count = connected_components(G.n, G.rows[keep], G.cols[keep])
                assert count == d

    def test_minimizer_component_bound(self):
        # minimizers never produce more than d components
        rng = np.random.default_rng(3)
        for _ in range(15):
            G, d, _ = tiny_instance(rng)
            beta = float(rng.uniform(0.05, 1.2))
            result = brute_force_mip(G, beta=beta, d=d)
            for z in result.minimizers:
                keep = z.values > 0.5
                _, count = connected_components(G.n, G.rows[keep], G.cols[keep])
                assert count <= d

    def test_concavity_floor(self):
        # phi is concave in the indicator, so the box minimum sits at a vertex
        rng = np.random.default_rng(4)
        for _ in range(10):
            G, d, _ = tiny_instance(rng, max_edges=8)
            beta = float(rng.uniform(0.1, 1.0))
            result = brute_force_mip(G, beta=beta, d=d)
            for _ in range(20):
                frac = EdgeIndicator(rng.uniform(0, 1, G.num_edges))
                assert phi(G, frac, beta, d) >= result.global_value - 1e-9

    def test_solver_never_beats_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            G, d, _ = tiny_instance(rng)
            beta = float(rng.uniform(0.1, 1.2))
            result = brute_force_mip(G, beta=beta, d=d)
            _, _, trace = cossc_solve(G, SolverConfig(d=d, beta=beta))
            assert trace.f_history[-1] >= result.global_value - 1e-9


class TestCeilingProperty:
    def test_tied_fractional_edge(self):
        # two equal disjoint edges at beta=1, d=3: the second edge's gradient
        # vanishes at the optimal embedding of the kept-first-edge indicator,
        # so any fractional value there leaves phi unchanged, and the
        # entrywise ceiling attains the same value
        G = SimilarityGraph.from_edges(4, [(0, 1), (2, 3)], [1.0, 1.0])
        beta, d = 1.0, 3
        result = brute_force_mip(G, beta=beta, d=d)
        assert result.global_value == pytest.approx(-2.0)
        assert result.num_minimizers == 3  # masks 01, 10, 11
        for t in (0.25, 0.4, 0.9):
            frac = EdgeIndicator(np.array([1.0, t]))
            ceil = EdgeIndicator(np.array([1.0, 1.0]))
            assert phi(G, frac, beta, d) == pytest.approx(
                phi(G, ceil, beta, d), abs=1e-9
            )


class TestBetaBar:
    def test_single_unit_edge(self):
        assert compute_beta_bar(single_unit_edge(), p=1.0) == pytest.approx(1.0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            G = random_graph(rng, n_min=4, n_max=6, max_edges=8)
            value = compute_beta_bar(G, p=1.0)
            scaled = SimilarityGraph.from_edges(
                G.n, np.stack([G.rows, G.cols], axis=1), G.a * 7.5
            )
            assert compute_beta_bar(scaled, p=1.0) == pytest.approx(value, rel=1e-9)

    def test_empty_mustlinks_alpha_is_p(self):
        G = single_unit_edge()
        assert compute_beta_bar(G, p=2.0) == pytest.approx(0.5)

    def test_brute_force_embeds_threshold(self):
        G = single_unit_edge()
        result = brute_force_mip(G, beta=0.5, d=1)
        assert result.beta_bar == pytest.approx(1.0)


class TestMustLinkTheorem:
    def setup_instance(self):
        G = SimilarityGraph.from_edges(3, [(0, 1), (1, 2)], [1.0, 1.0])
        J = MustLinkSet.from_pairs([(0, 1)])
        scaled = scale_must_links(G, J, p=10.0)
        return scaled, J

    def test_pass_on_solver_output(self):
        scaled, J = self.setup_instance()
        beta, p = 0.5, 10.0
        config = SolverConfig(d=2, beta=beta, p=p, eps=1e-3)
        z, H, _ = cossc_solve(scaled, config)
        verdict = verify_mustlink_theorem(scaled, J, beta, p, z, H, eps_gap=1e-3)
        assert verdict is TheoremVerdict.PASS

    def test_not_applicable_when_product_small(self):
        scaled, J = self.setup_instance()
        z = EdgeIndicator.all_ones(2)
        H = default_h0(scaled, SolverConfig(d=2, beta=0.05))
        verdict = verify_mustlink_theorem(scaled, J, 0.05, 10.0, z, H, eps_gap=1e-3)
        assert verdict is TheoremVerdict.NOT_APPLICABLE

    def test_vacuous_pass_empty_set(self):
        scaled, _ = self.setup_instance()
        z = EdgeIndicator.all_ones(2)
        H = default_h0(scaled, SolverConfig(d=2, beta=0.5))
        verdict = verify_mustlink_theorem(
            scaled, MustLinkSet.empty(), 0.5, 10.0, z, H, eps_gap=1e-3
        )
        assert verdict is TheoremVerdict.PASS

    def test_eps_gap_bound_enforced(self):
        scaled, J = self.setup_instance()
        z = EdgeIndicator.all_ones(2)
        H = default_h0(scaled, SolverConfig(d=2, beta=0.5))
        with pytest.raises(ContractViolationError):
            verify_mustlink_theorem(scaled, J, 0.5, 10.0, z, H, eps_gap=5.0)

    def test_far_from_optimal_rejected(self):
        scaled, J = self.setup_instance()
        z = EdgeIndicator.zeros(2)
        H = default_h0(scaled, SolverConfig(d=2, beta=0.5))
        with pytest.raises(ContractViolationError):
            verify_mustlink_theorem(scaled, J, 0.5, 10.0, z, H, eps_gap=1e-6)
