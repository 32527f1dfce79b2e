"""Weighted graphs with typed edges and exact path-metric extraction."""

from .weighted_graph import (
    EdgeKind,
    GraphBuilder,
    WeightedGraph,
    floyd_warshall_oracle,
    metric_skeleton,
    metric_to_complete_graph,
    path_metric,
    plain_rips,
    skeleton_edges,
)
