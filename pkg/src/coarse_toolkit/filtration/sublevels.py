"""
Equaliser sublevels, the coarse kernel K_sigma(f) and the coarse quotient Q_sigma(f).

K_sigma(f) lives in X x X with the l-infinity metric. It is kept as a pair of
index arrays; `as_space()` materializes it for small inputs.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.errors import DomainError
from ..graph_metric.weighted_graph import EdgeKind, GraphBuilder, WeightedGraph, path_metric, skeleton_edges
from ..metric_core.space import (
    FiniteExtMetricSpace,
    MappedPair,
    inclusion,
    restrict_indices,
    same_space,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SublevelResult:
    space: FiniteExtMetricSpace
    inclusion: MappedPair


def _require_scale(value: float, name: str) -> None:
    if not value >= 0:
        raise DomainError(f"{name} must be nonnegative, got {value}")


def eq_sublevel(f: MappedPair, g: MappedPair, kappa: float) -> SublevelResult:
    """The subspace of points x with d_Y(fx, gx) <= kappa, with its isometric inclusion."""
    _require_scale(kappa, "kappa")
    if not (same_space(f.source, g.source) and same_space(f.target, g.target)):
        raise DomainError("maps must share source and target")
    gaps = f.target.dist[f.assign, g.assign]
    tol = f.tolerance
    rows = np.flatnonzero(gaps <= kappa + tol)
    sub = restrict_indices(f.source, rows, name=f"Eq_{kappa:g}")
    return SublevelResult(space=sub, inclusion=inclusion(sub, f.source))


@dataclass(frozen=True, eq=False)
class KernelSublevel:
    """
    K_sigma(f): ordered source pairs (x, x') with d_Y(fx, fx') <= sigma.

    `first[k], second[k]` are the source rows of the k-th pair, in row-major order.
    """

    factor: MappedPair
    sigma: float
    first: np.ndarray
    second: np.ndarray

    @property
    def size(self) -> int:
        return int(self.first.size)

    def contains(self, x, x_prime) -> bool:
        X = self.factor.source
        i, j = X.index[x], X.index[x_prime]
        return bool(self.factor.image_distances[i, j] <= self.sigma + self.factor.tolerance)

    def as_space(self) -> FiniteExtMetricSpace:
        """The induced l-infinity subspace of X x X."""
        D = self.factor.source.dist
        dist = np.maximum(D[np.ix_(self.first, self.first)], D[np.ix_(self.second, self.second)])
        points = tuple(
            (self.factor.source.points[i], self.factor.source.points[j])
            for i, j in zip(self.first.tolist(), self.second.tolist())
        )
        return FiniteExtMetricSpace(points, dist, name=f"K_{self.sigma:g}")

    def projections(self, space: FiniteExtMetricSpace = None) -> Tuple[MappedPair, MappedPair]:
        """pi1.iota and pi2.iota from the materialized K_sigma into X."""
        space = space or self.as_space()
        X = self.factor.source
        return (
            MappedPair(space, X, self.first, name="pi1"),
            MappedPair(space, X, self.second, name="pi2"),
        )


def kernel_sublevel(f: MappedPair, sigma: float) -> KernelSublevel:
    """All ordered pairs whose images lie within sigma."""
    _require_scale(sigma, "sigma")
    first, second = np.nonzero(f.image_distances <= sigma + f.tolerance)
    logger.debug("K_%g has %d pairs", sigma, first.size)
    return KernelSublevel(factor=f, sigma=sigma, first=first, second=second)


@dataclass(frozen=True, eq=False)
class QuotientResult:
    """Q_sigma(f), the 1-Lipschitz quotient map q and the induced map f_sigma into Y."""

    space: FiniteExtMetricSpace
    graph: WeightedGraph
    quotient: MappedPair
    factor: MappedPair


def quotient_graph(f: MappedPair, sigma: float) -> WeightedGraph:
    """Skeleton of X plus a unit glued edge for every pair of K_sigma(f)."""
    kernel = kernel_sublevel(f, sigma)
    X = f.source
    builder = GraphBuilder(X.points)
    builder.add_edges(*skeleton_edges(X), EdgeKind.INTERNAL)
    upper = kernel.first < kernel.second
    builder.add_edges(kernel.first[upper], kernel.second[upper], 1.0, EdgeKind.GLUED)
    return builder.build()


def quotient_space(f: MappedPair, sigma: float) -> QuotientResult:
    """Q_sigma(f) = Coeq(pi1.iota, pi2.iota), built directly on the points of X."""
    _require_scale(sigma, "sigma")
    graph = quotient_graph(f, sigma)
    space = path_metric(graph, name=f"Q_{sigma:g}")
    logger.debug("Q_%g: %d points, %d edges %s", sigma, space.size, graph.size, graph.kind_counts())
    return QuotientResult(
        space=space,
        graph=graph,
        quotient=MappedPair(f.source, space, np.arange(space.size), name="q"),
        factor=MappedPair(space, f.target, f.assign, name="f"),
    )
