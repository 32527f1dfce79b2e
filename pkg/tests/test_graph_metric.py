"""Tests for weighted graphs and path metrics."""

import json
import os
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from coarse_toolkit.core.errors import DomainError, PreconditionError, SchemaError
from coarse_toolkit.graph_metric import (
    EdgeKind,
    GraphBuilder,
    WeightedGraph,
    floyd_warshall_oracle,
    metric_skeleton,
    metric_to_complete_graph,
    path_metric,
    plain_rips,
)
from coarse_toolkit.metric_core import INF, check_metric
from tests.strategies import grid_spaces, weighted_edge_lists


def path_graph(n, weight=1):
    builder = GraphBuilder(range(n))
    for i in range(n - 1):
        builder.add_edge(i, i + 1, weight)
    return builder.build()


def graph_from_edges(n, edges):
    builder = GraphBuilder(range(n))
    for u, v, w in edges:
        builder.add_edge(u, v, w)
    return builder.build()


class TestBuilder:
    def test_parallel_edges_keep_lightest(self):
        """Parallel edges collapse to the lightest; its kind is kept."""
        builder = GraphBuilder(["a", "b"])
        builder.add_edge("a", "b", 3, EdgeKind.INTERNAL)
        builder.add_edge("b", "a", 1, EdgeKind.GLUED)
        graph = builder.build()
        assert graph.size == 1
        assert graph.edges() == [("a", "b", 1.0, EdgeKind.GLUED)]

    def test_self_loops_dropped(self):
        builder = GraphBuilder(["a"])
        builder.add_edge("a", "a", 1)
        assert builder.build().size == 0

    def test_bad_edges(self):
        """Unknown vertices and nonpositive weights are domain errors."""
        builder = GraphBuilder(["a", "b"])
        with pytest.raises(DomainError):
            builder.add_edge("a", "c", 1)
        with pytest.raises(DomainError):
            builder.add_edge("a", "b", 0)
        with pytest.raises(DomainError):
            builder.add_edge("a", "b", INF)

    def test_kind_counts_and_induced(self):
        builder = GraphBuilder(range(3))
        builder.add_edge(0, 1, 1, EdgeKind.INTERNAL)
        builder.add_edge(1, 2, 1, EdgeKind.AUGMENTED)
        graph = builder.build()
        assert graph.kind_counts() == {"internal": 1, "glued": 0, "augmented": 1}
        assert graph.without_kind(EdgeKind.AUGMENTED).size == 1
        sub = graph.induced([2, 1])
        assert sub.vertices == (2, 1)
        assert sub.edges() == [(2, 1, 1.0, EdgeKind.AUGMENTED)]

    def test_json_round_trip(self):
        """Graphs survive JSON with their edge kinds."""
        builder = GraphBuilder(["a", "b", "c"])
        builder.add_edge("a", "b", 2, EdgeKind.GLUED)
        builder.add_edge("b", "c", 1)
        graph = builder.build()
        data = json.loads(graph.to_json())
        assert data["edges"] == [["a", "b", 2, "glued"], ["b", "c", 1, "internal"]]
        again = WeightedGraph.from_dict(data)
        assert again.edges() == graph.edges()

    def test_from_dict_errors(self):
        """Bad edges point at their position in the document."""
        with pytest.raises(SchemaError) as info:
            WeightedGraph.from_dict({"vertices": ["a", "b"], "edges": [["a", "b", -1, "internal"]]})
        assert info.value.pointer == "/edges/0"
        with pytest.raises(SchemaError) as info:
            WeightedGraph.from_dict({"vertices": ["a", "a"], "edges": []})
        assert info.value.pointer == "/vertices"


class TestPathMetric:
    def test_path_graph(self):
        X = path_metric(path_graph(4, 2))
        assert X.dist[0, 3] == 6.0
        assert X.integral

    def test_disconnected(self):
        """Different components are at INF."""
        builder = GraphBuilder(range(3))
        builder.add_edge(0, 1, 1)
        X = path_metric(builder.build())
        assert X.dist[0, 2] == INF
        assert check_metric(X).ok

    def test_dense_and_sparse_agree(self):
        """Floyd-Warshall and Dijkstra give the same matrix."""
        graph = graph_from_edges(5, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 7), (3, 4, 4)])
        dense = path_metric(graph, dense_threshold=0.01)
        sparse = path_metric(graph, dense_threshold=1.0)
        assert np.array_equal(dense.dist, sparse.dist)
        assert dense.dist[0, 3] == 4.0

    def test_oracle_agrees(self):
        graph = graph_from_edges(5, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 7)])
        assert np.array_equal(path_metric(graph).dist, floyd_warshall_oracle(graph))

    def test_oracle_limit(self):
        with pytest.raises(PreconditionError):
            floyd_warshall_oracle(path_graph(5), max_vertices=4)

    def test_plain_rips(self):
        """Unit edges join pairs within sigma."""
        X = path_metric(path_graph(4))
        graph = plain_rips(X, 2)
        assert graph.size == 5
        assert path_metric(graph).dist[0, 3] == 2.0

    @given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), weighted_edge_lists(n))))
    @settings(max_examples=50, deadline=None)
    def test_path_metric_matches_oracle(self, case):
        """Path metrics agree with the cubic oracle and satisfy the triangle inequality."""
        n, edges = case
        graph = graph_from_edges(n, edges)
        X = path_metric(graph)
        assert np.array_equal(X.dist, floyd_warshall_oracle(graph))
        assert check_metric(X).ok

    @given(
        st.integers(2, 6).flatmap(
            lambda n: st.tuples(st.just(n), weighted_edge_lists(n), st.integers(0, n - 1), st.integers(0, n - 1))
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_adding_edges_never_increases_distances(self, case):
        n, edges, u, v = case
        before = path_metric(graph_from_edges(n, edges)).dist
        after = path_metric(graph_from_edges(n, edges + [(u, v, 1)])).dist
        assert np.all(after <= before)


class TestSkeleton:
    def test_complete_graph(self):
        X = path_metric(path_graph(4))
        assert metric_to_complete_graph(X).size == 6

    @given(grid_spaces(max_size=10))
    @settings(max_examples=40, deadline=None)
    def test_skeleton_recovers_metric(self, X):
        """The skeleton's path metric is the space itself."""
        skeleton = metric_skeleton(X)
        assert skeleton.size <= metric_to_complete_graph(X).size
        assert np.array_equal(path_metric(skeleton).dist, X.dist)
