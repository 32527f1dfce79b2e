"""Products with the l-infinity metric and coproducts (disjoint unions at infinite distance)."""

import logging
from dataclasses import dataclass

import numpy as np

from .space import INF, FiniteExtMetricSpace, MappedPair

logger = logging.getLogger(__name__)

LEFT = 0
RIGHT = 1


@dataclass(frozen=True, eq=False)
class ProductResult:
    space: FiniteExtMetricSpace
    first: MappedPair
    second: MappedPair


@dataclass(frozen=True, eq=False)
class CoproductResult:
    space: FiniteExtMetricSpace
    left: MappedPair
    right: MappedPair


def product_linf(X: FiniteExtMetricSpace, Y: FiniteExtMetricSpace) -> ProductResult:
    """
    X x Y with d((x,y),(x',y')) = max(d_X(x,x'), d_Y(y,y')).

    Points are the pairs (x, y) in row-major order.
    """
    n, m = X.size, Y.size
    dist = np.maximum(X.dist[:, None, :, None], Y.dist[None, :, None, :]).reshape(n * m, n * m)
    points = tuple((x, y) for x in X.points for y in Y.points)
    space = FiniteExtMetricSpace(points, dist, name=f"{X.name}x{Y.name}")
    rows = np.arange(n * m)
    logger.debug("product of %d and %d points", n, m)
    return ProductResult(
        space=space,
        first=MappedPair(space, X, rows // max(m, 1), name="pi1"),
        second=MappedPair(space, Y, rows % max(m, 1), name="pi2"),
    )


def coproduct(X: FiniteExtMetricSpace, Y: FiniteExtMetricSpace) -> CoproductResult:
    """
    Disjoint union of X and Y with every cross distance infinite.

    Points are tagged (0, x) and (1, y).
    """
    n, m = X.size, Y.size
    dist = np.full((n + m, n + m), INF)
    dist[:n, :n] = X.dist
    dist[n:, n:] = Y.dist
    points = tuple((LEFT, x) for x in X.points) + tuple((RIGHT, y) for y in Y.points)
    space = FiniteExtMetricSpace(points, dist, name=f"{X.name}+{Y.name}")
    return CoproductResult(
        space=space,
        left=MappedPair(X, space, np.arange(n), name="i1"),
        right=MappedPair(Y, space, n + np.arange(m), name="i2"),
    )
