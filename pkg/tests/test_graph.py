import numpy as np
import pytest

from cossc.exceptions import ContractViolationError, MustLinkInfeasibleError
from cossc.graph import (
    MustLinkSet,
    SimilarityGraph,
    auto_neighbor_count,
    build_knn_similarity,
    connected_components,
    row_normalize_symmetrize,
    scale_must_links,
    validate_mustlinks,
)
from cossc.linalg import laplacian, numerical_rank


def path_graph(weights=(1.0, 1.0)):
    pairs = [(i, i + 1) for i in range(len(weights))]
    return SimilarityGraph.from_edges(len(weights) + 1, pairs, np.asarray(weights, float))


class TestAutoNeighborCount:
    def test_n8(self):
        assert auto_neighbor_count(8) == 3

    def test_n100(self):
        assert auto_neighbor_count(100) == 5

    def test_floor(self):
        assert auto_neighbor_count(2) == 1


class TestBuildKnn:
    def test_two_separated_clusters(self):
        # mutual kNN with k_n = 5 cannot bridge a gap of 100x the spread
        rng = np.random.default_rng(0)
        gx, gy = np.meshgrid(np.linspace(0, 1, 10), np.linspace(0, 1, 5))
        blob = np.column_stack([gx.ravel(), gy.ravel()])
        a = blob + rng.uniform(-0.02, 0.02, blob.shape)
        b = blob + rng.uniform(-0.02, 0.02, blob.shape) + np.array([100.0, 0.0])
        G = build_knn_similarity(np.concatenate([a, b]))
        assert auto_neighbor_count(G.n) == 5
        _, count = connected_components(G.n, G.rows, G.cols)
        assert count == 2

    def test_coincident_points_complete_graph(self):
        pts = np.zeros((5, 2))
        G = build_knn_similarity(pts, k_n=2)
        assert G.num_edges == 10  # complete graph via inclusive distance ties
        assert np.allclose(G.a, G.a[0])

    def test_rejects_single_point(self):
        with pytest.raises(ContractViolationError):
            build_knn_similarity(np.zeros((1, 2)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ContractViolationError):
            build_knn_similarity(np.array([[0.0, 0.0], [np.nan, 1.0]]))

    def test_symmetric_support_and_zero_diagonal(self):
        rng = np.random.default_rng(4)
        pts = rng.standard_normal((40, 3))
        G = build_knn_similarity(pts)
        W = G.adjacency()
        assert np.array_equal(W, W.T)
        assert np.all(np.diag(W) == 0)
        assert np.array_equal(W > 0, G.adjacency(weights="abar") > 0)

    def test_deterministic(self):
        rng = np.random.default_rng(9)
        pts = rng.standard_normal((60, 2))
        G1 = build_knn_similarity(pts)
        G2 = build_knn_similarity(pts.copy())
        assert np.array_equal(G1.rows, G2.rows)
        assert np.array_equal(G1.cols, G2.cols)
        assert np.array_equal(G1.a, G2.a)

    def test_component_count_matches_rank(self):
        rng = np.random.default_rng(14)
        pts = np.concatenate([
            rng.uniform(0, 1, (30, 2)),
            rng.uniform(0, 1, (30, 2)) + 50.0,
        ])
        G = build_knn_similarity(pts)
        _, count = connected_components(G.n, G.rows, G.cols)
        assert count == G.n - numerical_rank(laplacian(G.adjacency()))


class TestRowNormalizeSymmetrize:
    def test_unit_edge(self):
        G = row_normalize_symmetrize(path_graph([1.0]))
        assert G.a == pytest.approx([1.0])

    def test_weight_two_edge(self):
        G = row_normalize_symmetrize(path_graph([2.0]))
        assert G.a == pytest.approx([1.0])

    def test_path_degrees(self):
        G = row_normalize_symmetrize(path_graph([1.0, 1.0]))
        assert G.a == pytest.approx([0.75, 0.75])

    def test_preserves_support(self):
        rng = np.random.default_rng(2)
        raw = SimilarityGraph.from_edges(
            6, [(0, 1), (1, 2), (3, 4)], rng.uniform(0.5, 2.0, 3)
        )
        G = row_normalize_symmetrize(raw)
        assert np.array_equal(G.rows, raw.rows)
        assert np.array_equal(G.cols, raw.cols)
        assert np.all(G.a > 0)


class TestMustLinks:
    def test_scale_basic(self):
        G = SimilarityGraph.from_edges(2, [(0, 1)], [0.2])
        scaled = scale_must_links(G, MustLinkSet.from_pairs([(0, 1)]), p=10.0)
        assert scaled.abar == pytest.approx([2.0])
        assert scaled.a == pytest.approx([0.2])
        assert scaled.mustlink.tolist() == [True]

    def test_empty_set_noop(self):
        G = path_graph([1.0, 2.0])
        scaled = scale_must_links(G, MustLinkSet.empty(), p=7.0)
        assert np.array_equal(scaled.abar, G.abar)

    def test_unit_p_noop(self):
        G = path_graph([1.0, 2.0])
        scaled = scale_must_links(G, MustLinkSet.from_pairs([(0, 1)]), p=1.0)
        assert np.array_equal(scaled.abar, G.abar)

    def test_rescale_with_unit_p_keeps_abar(self):
        G = path_graph([1.0, 2.0])
        J = MustLinkSet.from_pairs([(0, 1)])
        once = scale_must_links(G, J, p=10.0)
        twice = scale_must_links(once, J, p=1.0)
        assert np.array_equal(twice.abar, once.abar)

    def test_validate_reports_missing(self):
        G = path_graph([1.0, 1.0])
        missing = validate_mustlinks(G, MustLinkSet.from_pairs([(0, 1), (0, 2)]))
        assert missing == [(0, 2)]

    def test_missing_pair_raises(self):
        G = path_graph([1.0, 1.0])
        with pytest.raises(MustLinkInfeasibleError) as err:
            scale_must_links(G, MustLinkSet.from_pairs([(0, 2)]), p=2.0)
        assert err.value.pairs == [(0, 2)]

    def test_inject_missing_uses_mean_weight(self):
        G = path_graph([1.0, 3.0])
        scaled = scale_must_links(
            G, MustLinkSet.from_pairs([(0, 2)]), p=2.0, inject_missing=True
        )
        e = scaled.edge_index[(0, 2)]
        assert scaled.a[e] == pytest.approx(2.0)  # mean of existing weights
        assert scaled.abar[e] == pytest.approx(4.0)

    def test_pair_canonicalization_and_dedup(self):
        J = MustLinkSet.from_pairs([(3, 1), (1, 3), (0, 2)])
        assert [tuple(p) for p in J.pairs] == [(0, 2), (1, 3)]

    def test_self_pair_rejected(self):
        with pytest.raises(ContractViolationError):
            MustLinkSet.from_pairs([(1, 1)])


class TestConnectedComponents:
    def test_two_disjoint_edges(self):
        labels, count = connected_components(4, [0, 2], [1, 3])
        assert count == 2
        assert labels.tolist() == [0, 0, 1, 1]

    def test_path(self):
        _, count = connected_components(3, [0, 1], [1, 2])
        assert count == 1

    def test_no_edges(self):
        labels, count = connected_components(4, [], [])
        assert count == 4
        assert labels.tolist() == [0, 1, 2, 3]

    def test_discovery_order_labels(self):
        # component of vertex 0 gets label 0 even if listed later
        labels, count = connected_components(4, [2, 0], [3, 1])
        assert labels.tolist() == [0, 0, 1, 1]


class TestSimilarityGraphType:
    def test_edges_are_canonical(self):
        G = SimilarityGraph.from_edges(3, [(2, 1), (1, 0)], [1.0, 2.0])
        assert list(zip(G.rows, G.cols)) == [(0, 1), (1, 2)]
        assert G.a.tolist() == [2.0, 1.0]

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ContractViolationError):
            SimilarityGraph.from_edges(3, [(0, 1), (1, 0)], [1.0, 1.0])

    def test_arrays_read_only(self):
        G = path_graph([1.0])
        with pytest.raises(ValueError):
            G.a[0] = 5.0

    def test_adjacency_mask(self):
        G = path_graph([1.0, 2.0])
        W = G.adjacency(z=[1.0, 0.0])
        assert W[0, 1] == 1.0 and W[1, 2] == 0.0
