"""
Weighted graphs with typed edges and their path metrics.

A `GraphBuilder` collects vertices and edges; `build()` freezes them into a
`WeightedGraph`, collapsing parallel edges to the lightest one. Path metrics
come from scipy's sparse shortest-path routines; networkx provides the
Floyd-Warshall oracle and an inspection view.
"""

import json
import logging
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ..core.config import get_settings
from ..core.documents import GraphDocument, parse_document
from ..core.errors import DomainError, PreconditionError, SchemaError
from ..metric_core.space import INF, FiniteExtMetricSpace, format_point_id

logger = logging.getLogger(__name__)


class EdgeKind(IntEnum):
    """Origin of an edge; kept for audit and reports."""

    INTERNAL = 0
    GLUED = 1
    AUGMENTED = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "EdgeKind":
        return cls[label.upper()]


class GraphBuilder:
    """Accumulates vertices and edges before freezing them into a WeightedGraph."""

    def __init__(self, vertices: Iterable[Hashable] = ()):
        """
        Initialize the builder.

        Args:
            vertices: Initial vertex ids, in order.
        """
        self.vertices: List[Hashable] = []
        self.index: Dict[Hashable, int] = {}
        self._src: List[np.ndarray] = []
        self._dst: List[np.ndarray] = []
        self._weight: List[np.ndarray] = []
        self._kind: List[np.ndarray] = []
        for v in vertices:
            self.add_vertex(v)

    def add_vertex(self, vertex: Hashable) -> int:
        """Add a vertex if absent and return its index."""
        if vertex not in self.index:
            self.index[vertex] = len(self.vertices)
            self.vertices.append(vertex)
        return self.index[vertex]

    def add_edge(self, u: Hashable, v: Hashable, weight: float, kind: EdgeKind = EdgeKind.INTERNAL) -> None:
        """Add one edge between existing vertices."""
        try:
            i, j = self.index[u], self.index[v]
        except KeyError as exc:
            raise DomainError(f"unknown vertex {exc.args[0]!r}") from exc
        self.add_edges(np.array([i]), np.array([j]), np.array([weight], dtype=np.float64), kind)

    def add_edges(self, src: np.ndarray, dst: np.ndarray, weight: np.ndarray, kind: EdgeKind) -> None:
        """
        Add edges by vertex index.

        Self-loops are dropped. Nonpositive or infinite weights raise DomainError.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weight = np.broadcast_to(np.asarray(weight, dtype=np.float64), src.shape)
        keep = src != dst
        src, dst, weight = src[keep], dst[keep], weight[keep]
        if weight.size and not (np.all(weight > 0) and np.all(np.isfinite(weight))):
            raise DomainError("edge weights must be positive and finite")
        self._src.append(np.minimum(src, dst))
        self._dst.append(np.maximum(src, dst))
        self._weight.append(weight.copy())
        self._kind.append(np.full(src.shape, int(kind), dtype=np.int8))

    def build(self) -> "WeightedGraph":
        """Freeze the graph, keeping the lightest of each set of parallel edges."""
        if self._src:
            src = np.concatenate(self._src)
            dst = np.concatenate(self._dst)
            weight = np.concatenate(self._weight)
            kind = np.concatenate(self._kind)
        else:
            src = dst = np.empty(0, dtype=np.int64)
            weight = np.empty(0)
            kind = np.empty(0, dtype=np.int8)
        # first in (u, v, weight, insertion order) wins
        order = np.lexsort((np.arange(src.size), weight, dst, src))
        src, dst, weight, kind = src[order], dst[order], weight[order], kind[order]
        first = np.ones(src.size, dtype=bool)
        first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
        graph = WeightedGraph(tuple(self.vertices), src[first], dst[first], weight[first], kind[first])
        logger.debug(
            "built graph: %d vertices, %d edges (%d parallel edges collapsed)",
            graph.order, graph.size, int((~first).sum()),
        )
        return graph


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """
    An undirected graph with positive weights and typed edges.

    Edges are stored as parallel arrays with src < dst and no repeated pair.
    """

    vertices: Tuple[Hashable, ...]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    kind: np.ndarray

    def __post_init__(self):
        for name in ("src", "dst", "weight", "kind"):
            getattr(self, name).setflags(write=False)

    @property
    def order(self) -> int:
        """Number of vertices."""
        return len(self.vertices)

    @property
    def size(self) -> int:
        """Number of edges."""
        return int(self.src.size)

    @cached_property
    def index(self) -> Dict[Hashable, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def edges(self) -> List[Tuple[Hashable, Hashable, float, EdgeKind]]:
        return [
            (self.vertices[u], self.vertices[v], float(w), EdgeKind(k))
            for u, v, w, k in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist(), self.kind.tolist())
        ]

    def kind_counts(self) -> Dict[str, int]:
        return {kind.label: int((self.kind == kind).sum()) for kind in EdgeKind}

    @property
    def density(self) -> float:
        n = self.order
        return self.size / (n * (n - 1) / 2) if n > 1 else 0.0

    def induced(self, vertices: Sequence[Hashable]) -> "WeightedGraph":
        """The subgraph spanned by `vertices`, in the given order."""
        position = np.full(self.order, -1, dtype=np.int64)
        for k, v in enumerate(vertices):
            position[self.index[v]] = k
        keep = (position[self.src] >= 0) & (position[self.dst] >= 0)
        u, v = position[self.src[keep]], position[self.dst[keep]]
        return WeightedGraph(
            tuple(vertices),
            np.minimum(u, v),
            np.maximum(u, v),
            self.weight[keep].copy(),
            self.kind[keep].copy(),
        )

    def without_kind(self, kind: EdgeKind) -> "WeightedGraph":
        keep = self.kind != kind
        return WeightedGraph(
            self.vertices, self.src[keep].copy(), self.dst[keep].copy(),
            self.weight[keep].copy(), self.kind[keep].copy(),
        )

    def to_networkx(self) -> nx.Graph:
        """A networkx view with `weight` and `kind` edge attributes."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.order))
        for u, v, w, k in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist(), self.kind.tolist()):
            graph.add_edge(u, v, weight=w, kind=EdgeKind(k).label)
        return graph

    def to_dict(self) -> Dict[str, Any]:
        """Convert the graph to its JSON document form."""
        integral = bool(np.all(self.weight == np.round(self.weight)))
        return {
            "vertices": [format_point_id(v) for v in self.vertices],
            "edges": [
                [
                    format_point_id(self.vertices[u]),
                    format_point_id(self.vertices[v]),
                    int(w) if integral else w,
                    EdgeKind(k).label,
                ]
                for u, v, w, k in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist(), self.kind.tolist())
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WeightedGraph":
        """Create a graph from its JSON document form; vertex ids become strings."""
        doc = parse_document(GraphDocument, data)
        builder = GraphBuilder(doc.vertices)
        if len(builder.vertices) != len(doc.vertices):
            raise SchemaError("duplicate vertex ids", "/vertices")
        for k, (u, v, w, kind) in enumerate(doc.edges):
            try:
                builder.add_edge(u, v, w, EdgeKind.from_label(kind))
            except DomainError as exc:
                raise SchemaError(str(exc), f"/edges/{k}") from exc
        return builder.build()

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _csr(graph: WeightedGraph) -> csr_matrix:
    n = graph.order
    return csr_matrix((graph.weight, (graph.src, graph.dst)), shape=(n, n))


def path_metric(graph: WeightedGraph, dense_threshold: Optional[float] = None, name: str = "") -> FiniteExtMetricSpace:
    """
    The shortest-path metric of `graph`; INF between components.

    Dense graphs use Floyd-Warshall, sparse ones Dijkstra from every source.
    Sums of integer weights stay exact below 2**53.
    """
    n = graph.order
    if n == 0:
        return FiniteExtMetricSpace((), np.empty((0, 0)), name=name)
    threshold = get_settings().dense_threshold if dense_threshold is None else dense_threshold
    method = "FW" if graph.density > threshold else "D"
    dist = shortest_path(_csr(graph), method=method, directed=False)
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    logger.debug("path metric on %d vertices, %d edges via %s", n, graph.size, method)
    return FiniteExtMetricSpace(graph.vertices, dist, name=name)


def floyd_warshall_oracle(graph: WeightedGraph, max_vertices: Optional[int] = None) -> np.ndarray:
    """All-pairs distances by networkx's cubic Floyd-Warshall, for cross-checks."""
    limit = get_settings().oracle_max_vertices if max_vertices is None else max_vertices
    if graph.order > limit:
        raise PreconditionError(f"oracle limited to {limit} vertices, graph has {graph.order}")
    if graph.order == 0:
        return np.empty((0, 0))
    return np.asarray(nx.floyd_warshall_numpy(graph.to_networkx(), nodelist=range(graph.order), weight="weight"))


def metric_to_complete_graph(X: FiniteExtMetricSpace, kind: EdgeKind = EdgeKind.INTERNAL) -> WeightedGraph:
    """One edge of weight d(x,x') for every pair at finite positive distance."""
    builder = GraphBuilder(X.points)
    iu, ju = np.triu_indices(X.size, 1)
    d = X.dist[iu, ju]
    finite = np.isfinite(d)
    builder.add_edges(iu[finite], ju[finite], d[finite], kind)
    return builder.build()


def skeleton_edges(X: FiniteExtMetricSpace) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edges of the complete graph on X not realized by a two-step detour (cached on X)."""
    return X.skeleton_pairs


def metric_skeleton(X: FiniteExtMetricSpace, kind: EdgeKind = EdgeKind.INTERNAL) -> WeightedGraph:
    """Sparse graph whose path metric is X."""
    builder = GraphBuilder(X.points)
    builder.add_edges(*skeleton_edges(X), kind)
    graph = builder.build()
    logger.debug("metric skeleton keeps %d of %d pairs", graph.size, X.size * (X.size - 1) // 2)
    return graph


def plain_rips(Y: FiniteExtMetricSpace, sigma: float) -> WeightedGraph:
    """Unit-weight Rips graph: an edge for each pair at distance <= sigma."""
    builder = GraphBuilder(Y.points)
    iu, ju = np.triu_indices(Y.size, 1)
    close = Y.dist[iu, ju] <= sigma + Y.tolerance
    builder.add_edges(iu[close], ju[close], 1.0, EdgeKind.INTERNAL)
    return builder.build()
