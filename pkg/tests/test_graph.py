import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse

from conftest import EXAMPLE1_SIGNAL, example1_graph, random_digraph
from oracles import dense, matrix_power_oracle, walk_oracle
from pegraph import (
    Graph,
    InvalidGraphError,
    InvalidParameterError,
    InvalidSignalError,
    InvalidSizeError,
    UnsupportedModeError,
    build_complete,
    build_complete_bipartite,
    build_cycle,
    build_erdos_renyi,
    build_family,
    build_grid2d,
    build_path,
    build_star,
    from_edges,
    gaussian_kernel_graph,
    reachable_set,
    walk_aggregate,
)


def arcs(g):
    return {(i + 1, j + 1) for i, j, _ in g.edges()}


class TestBuilders:
    def test_directed_path_arcs(self):
        assert arcs(build_path(3, directed=True)) == {(1, 2), (2, 3)}

    def test_undirected_path_two_vertices(self):
        g = build_path(2)
        assert arcs(g) == {(1, 2)}
        assert g.n_edges == 1
        assert not g.directed

    def test_directed_path_out_degrees(self):
        g = build_path(5, directed=True)
        assert g.out_degree.tolist() == [1, 1, 1, 1, 0]

    @pytest.mark.parametrize("n", [0, 1])
    def test_path_too_small(self, n):
        with pytest.raises(InvalidSizeError):
            build_path(n)

    def test_triangle(self):
        g = build_family("cycle", 3)
        assert g.n_edges == 3
        assert g.out_degree.tolist() == [2, 2, 2]

    def test_complete_edge_count(self):
        assert build_family("complete", 4).n_edges == 6
        assert build_complete(7).n_edges == 21

    def test_bipartite_one_side_is_star(self):
        assert arcs(build_family("complete_bipartite", n=6, n1=1)) == arcs(build_star(6))

    def test_bipartite_sides(self):
        g = build_complete_bipartite(2, 3)
        assert arcs(g) == {(a, b) for a in (1, 2) for b in (3, 4, 5)}

    @pytest.mark.parametrize("kind,n", [("cycle", 2), ("complete", 1), ("star", 1)])
    def test_family_sizes(self, kind, n):
        with pytest.raises(InvalidSizeError):
            build_family(kind, n)

    def test_bipartite_sizes(self):
        with pytest.raises(InvalidSizeError):
            build_complete_bipartite(0, 3)

    def test_unknown_family(self):
        with pytest.raises(InvalidParameterError):
            build_family("wheel", 5)

    def test_fast_builders_pass_validation(self):
        # the trusted constructors must produce graphs the validator accepts
        for g in (build_complete(9), build_complete_bipartite(3, 4), build_path(5, True),
                  build_cycle(6), build_grid2d(3, 4, True)):
            Graph(g.adjacency, g.directed, g.weighted)


class TestGrid:
    def test_row_is_directed_path(self):
        assert build_grid2d(1, 7, directed=True) == build_path(7, directed=True)

    def test_column_is_directed_path(self):
        assert arcs(build_grid2d(6, 1, directed=True)) == arcs(build_path(6, directed=True))

    def test_two_by_two_orientation(self):
        g = build_grid2d(2, 2, directed=True)
        assert arcs(g) == {(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}

    def test_king_centre_degree(self):
        g = build_grid2d(3, 3)
        assert g.out_degree[4] == 8
        assert g.out_degree[0] == 3

    def test_directed_interior_out_degree(self):
        g = build_grid2d(4, 5, directed=True)
        # E, S, SE, SW from an interior vertex
        v = 1 * 5 + 2
        assert {j for i, j, _ in g.edges() if i == v} == {v + 1, v + 5, v + 6, v + 4}

    def test_too_small(self):
        with pytest.raises(InvalidSizeError):
            build_grid2d(1, 1)


class TestErdosRenyi:
    def test_p_zero(self):
        assert build_erdos_renyi(30, 0.0, 1).n_edges == 0

    def test_p_one(self):
        assert arcs(build_erdos_renyi(12, 1.0, 1)) == arcs(build_complete(12))

    def test_seed_determinism(self):
        assert build_erdos_renyi(500, 0.5, 11) == build_erdos_renyi(500, 0.5, 11)

    def test_seed_sensitivity(self):
        assert not build_erdos_renyi(60, 0.5, 1) == build_erdos_renyi(60, 0.5, 2)

    @pytest.mark.parametrize("p", [-0.1, 1.5])
    def test_bad_p(self, p):
        with pytest.raises(InvalidParameterError):
            build_erdos_renyi(10, p, 0)

    def test_edge_density(self):
        g = build_erdos_renyi(400, 0.3, 3)
        pairs = 400 * 399 / 2
        assert abs(g.n_edges / pairs - 0.3) < 5 * np.sqrt(0.3 * 0.7 / pairs)


class TestKernel:
    def test_cutoff(self):
        g = gaussian_kernel_graph([[0, 0], [3, 0]], 1.0, 2.0)
        assert g.n_edges == 0

    def test_weight_value(self):
        g = gaussian_kernel_graph([[0, 0], [1.5, 0]], 2.0, 2.0)
        w = g.adjacency[0, 1]
        assert w == pytest.approx(np.exp(-1.5 ** 2 / 4.0), rel=1e-15)
        assert 0 < w <= 1

    def test_collinear_symmetry(self):
        g = gaussian_kernel_graph([[0, 0], [1, 0], [2, 0]], 1.0, 1.5)
        assert g.adjacency[0, 1] == g.adjacency[1, 2]
        assert g.adjacency[0, 2] == 0

    def test_bad_scale(self):
        with pytest.raises(InvalidParameterError):
            gaussian_kernel_graph([[0, 0], [1, 0]], 0.0, 1.0)

    def test_large_kernel_parameters_accepted(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 2e5, size=(20, 2))
        g = gaussian_kernel_graph(pts, 5.1 ** 8, 1e5)
        assert g.weighted

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 15), st.integers(0, 10_000), st.floats(0.1, 5.0), st.floats(0.0, 4.0))
    def test_symmetric_zero_diagonal_unit_range(self, n, seed, s1, s2):
        pts = np.random.default_rng(seed).uniform(0, 3, size=(n, 2))
        w = gaussian_kernel_graph(pts, s1, s2).adjacency.toarray()
        assert np.array_equal(w, w.T)
        assert np.all(np.diag(w) == 0)
        assert np.all((w >= 0) & (w <= 1))


class TestValidation:
    def test_self_loop(self):
        with pytest.raises(InvalidGraphError):
            from_edges(3, [(0, 0)])

    def test_asymmetric_undirected(self):
        a = sparse.csr_array(np.array([[0, 1.0], [0, 0]]))
        with pytest.raises(InvalidGraphError):
            Graph(a)

    def test_negative_weight(self):
        with pytest.raises(InvalidGraphError):
            from_edges(3, [(0, 1, -1.0)])

    def test_unweighted_must_be_ones(self):
        a = sparse.csr_array(np.array([[0, 2.0], [2.0, 0]]))
        with pytest.raises(InvalidGraphError):
            Graph(a, weighted=False)

    def test_duplicate_edge(self):
        with pytest.raises(InvalidGraphError):
            from_edges(3, [(0, 1), (1, 0)])

    def test_immutable(self):
        g = build_cycle(4)
        with pytest.raises(ValueError):
            g.adjacency.data[0] = 5.0

    def test_add_remove_edges(self):
        g = build_path(4)
        h = g.add_edges([(0, 3)])
        assert h.has_edge(3, 0) and not g.has_edge(0, 3)
        assert h.remove_edges([(3, 0)]) == g
        with pytest.raises(InvalidGraphError):
            g.remove_edges([(0, 2)])
        with pytest.raises(InvalidGraphError):
            g.add_edges([(0, 1)])


class TestWalkAggregate:
    def test_example1_neighbour_means(self):
        g = example1_graph()
        agg = walk_aggregate(g, EXAMPLE1_SIGNAL, 1)
        expected = [-1.15, -0.5, -1.325, 2.5, 2.5, -1 / 3, 1.95, 1.0]
        np.testing.assert_allclose(agg.values, expected, rtol=0, atol=1e-12)

    def test_k0_is_identity(self):
        g = example1_graph()
        agg = walk_aggregate(g, EXAMPLE1_SIGNAL, 0)
        assert np.array_equal(agg.values, EXAMPLE1_SIGNAL)
        assert agg.support_size.tolist() == [1] * 8

    @pytest.mark.parametrize("mode", ["walk", "set"])
    def test_constant_signal(self, mode):
        g = build_cycle(9)
        for k in range(5):
            assert np.allclose(walk_aggregate(g, np.full(9, 2.5), k, mode).values, 2.5, rtol=0, atol=1e-15)

    def test_path4_k2_both_modes(self):
        # from vertex 2 the length-2 walks are 2-1-2, 2-3-2, 2-3-4
        g = build_path(4)
        x = np.array([1.0, 10.0, 100.0, 1000.0])
        w = walk_aggregate(g, x, 2, "walk").values
        s = walk_aggregate(g, x, 2, "set").values
        np.testing.assert_allclose(w, [(1 + 100) / 2, (10 + 10 + 1000) / 3, (1 + 100 + 100) / 3, (10 + 1000) / 2])
        np.testing.assert_allclose(s, [(1 + 100) / 2, (10 + 1000) / 2, (1 + 100) / 2, (10 + 1000) / 2])

    def test_missing_marker_on_sinks(self):
        agg = walk_aggregate(build_path(5, directed=True), np.arange(5.0), 2)
        assert agg.missing.tolist() == [False, False, False, True, True]
        np.testing.assert_array_equal(agg.values[:3], [2.0, 3.0, 4.0])
        assert agg.support_size.tolist() == [1, 1, 1, 0, 0]
        assert agg.weight_sum.tolist() == [1, 1, 1, 0, 0]

    def test_set_mode_rejects_weighted(self):
        g = gaussian_kernel_graph([[0, 0], [1, 0], [2, 0]], 1.0, 1.5)
        with pytest.raises(UnsupportedModeError):
            walk_aggregate(g, [1.0, 2.0, 3.0], 1, "set")

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidSignalError):
            walk_aggregate(build_cycle(4), [1.0, 2.0], 1)

    def test_unknown_mode(self):
        with pytest.raises(UnsupportedModeError):
            walk_aggregate(build_cycle(4), np.zeros(4), 1, "mean")

    def test_large_power_no_overflow(self):
        g = build_complete(200)
        x = np.random.default_rng(0).standard_normal(200)
        agg = walk_aggregate(g, x, 200)
        assert np.all(np.isfinite(agg.values))
        assert np.allclose(agg.values, x.mean(), atol=1e-9)

    def test_oracle_small_graphs(self, small_graph):
        x = np.random.default_rng(3).standard_normal(small_graph.n)
        adj = dense(small_graph)
        for k in range(5):
            wm, sm, weight, support = walk_oracle(adj, x, k)
            agg = walk_aggregate(small_graph, x, k)
            np.testing.assert_allclose(agg.values, wm, rtol=0, atol=1e-12, equal_nan=True)
            np.testing.assert_allclose(agg.weight_sum, weight, rtol=1e-12)
            assert agg.support_size.tolist() == support.tolist()
            mp, rs = matrix_power_oracle(adj, x, k)
            np.testing.assert_allclose(agg.values, mp, rtol=0, atol=1e-12, equal_nan=True)
            np.testing.assert_allclose(agg.weight_sum, rs, rtol=1e-12)
            if not small_graph.weighted:
                sagg = walk_aggregate(small_graph, x, k, "set")
                np.testing.assert_allclose(sagg.values, sm, rtol=0, atol=1e-12, equal_nan=True)
                assert np.array_equal(np.isnan(sagg.values), support == 0)

    def test_modes_agree_at_k1(self, small_graph):
        if small_graph.weighted:
            pytest.skip("set mode is unweighted only")
        x = np.random.default_rng(4).standard_normal(small_graph.n)
        a = walk_aggregate(small_graph, x, 1, "walk").values
        b = walk_aggregate(small_graph, x, 1, "set").values
        assert np.array_equal(a, b, equal_nan=True)

    def test_support_iff_weight(self, small_graph):
        x = np.zeros(small_graph.n)
        for k in range(5):
            agg = walk_aggregate(small_graph, x, k)
            assert np.array_equal(agg.support_size == 0, agg.weight_sum == 0)


@st.composite
def unweighted_graphs(draw, max_n=8):
    n = draw(st.integers(2, max_n))
    directed = draw(st.booleans())
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and (directed or i < j)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return from_edges(n, chosen, directed=directed)


@settings(max_examples=60, deadline=None)
@given(unweighted_graphs(), st.integers(0, 4), st.integers(0, 2 ** 31))
def test_walk_aggregate_matches_enumeration(g, k, seed):
    x = np.random.default_rng(seed).standard_normal(g.n)
    wm, sm, _, _ = walk_oracle(dense(g), x, k)
    np.testing.assert_allclose(walk_aggregate(g, x, k, "walk").values, wm, rtol=0, atol=1e-12, equal_nan=True)
    np.testing.assert_allclose(walk_aggregate(g, x, k, "set").values, sm, rtol=0, atol=1e-12, equal_nan=True)


class TestReachableSet:
    @pytest.mark.parametrize("n,s", [(10, 0), (10, 1), (10, 4), (6, 5), (6, 7)])
    def test_directed_path(self, n, s):
        got = reachable_set(build_path(n, directed=True), s)
        assert got.indices.tolist() == list(range(max(n - s, 0)))

    def test_zero_steps(self):
        assert len(reachable_set(random_digraph(7, 0.1, 2), 0)) == 7

    def test_undirected_all_included(self, small_graph):
        if small_graph.directed:
            pytest.skip("undirected only")
        for s in range(6):
            assert reachable_set(small_graph, s).included.all()

    def test_undirected_isolated_excluded(self):
        g = from_edges(4, [(0, 1), (1, 2)])
        assert reachable_set(g, 3).included.tolist() == [True, True, True, False]

    @settings(max_examples=60, deadline=None)
    @given(unweighted_graphs(), st.integers(0, 5))
    def test_matches_enumeration_and_prefix(self, g, steps):
        adj = dense(g)
        _, _, _, support = walk_oracle(adj, np.zeros(g.n), steps)
        got = reachable_set(g, steps).included
        assert got.tolist() == (support > 0).tolist()
        for k in range(steps + 1):
            assert np.all(reachable_set(g, k).included[got])

    def test_bad_steps(self):
        with pytest.raises(InvalidParameterError):
            reachable_set(build_cycle(4), -1)
